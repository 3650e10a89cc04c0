"""Smoke test for the coop_bandit_py extension.

Build and install first:
    pip install --no-build-isolation ./crates/python
then run:
    python python/smoke_test.py
"""

import math

import coop_bandit_py as cb

FIXED_2X2 = {
    "v": 1,
    "variant": "masked_bernoulli",
    "shape": [2, 2],
    "means": [0.8, 0.4, 0.2, 0.6],
    "observabilities": [1.0, 0.5],
}


def check_bound():
    bound = cb.theorem1_bound(FIXED_2X2, 10_000)
    assert abs(bound - 4979.0) < 0.05, bound
    assert cb.theorem1_bound(FIXED_2X2, 10_000, conservative=True) >= bound


def check_ucb():
    assert cb.ucb_index(0.5, 0, 1.0, 0.1) == math.inf
    expected = 0.5 + math.sqrt(2.0 * math.log(10.0) / 4)
    assert abs(cb.ucb_index(0.5, 4, 2.0, 0.1) - expected) < 1e-12


def check_batch():
    exp = cb.Experiment(
        {
            "instance": {"kind": "fixed2x2"},
            "agents": [
                {"strategy": "pa_leader", "c": 0.025},
                {"strategy": "pa_follower", "c": 0.025, "w": 25},
            ],
            "horizon": 400,
            "runs": 6,
            "seed": 2,
        }
    )
    a, b = exp.run_batch(), exp.run_batch()
    assert a == b
    assert len(a["aggregate"]["mean"]) == 400
    assert exp.run_curve(a["seeds"][0]) == a["curves"][0]
    ratio, _, _ = cb.sublinearity(a["aggregate"]["mean"])
    assert ratio > 0
    trace = exp.run_episode(5)
    assert len(trace["steps"]) == 400


def check_session():
    s = cb.Session({"seed": 11, "horizon": 50})
    for seq in range(50):
        r = s.act(seq % 2, seq)
        assert r["team_action"][0] == seq % 2
    assert s.state()["terminal"]
    try:
        s.act(0, 50)
    except cb.CoopBanditError as e:
        assert "budget" in str(e)
    else:
        raise AssertionError("terminal session accepted an action")
    summary = s.close()
    assert summary["steps"] == 50
    replay = s.replay_experiment().run_episode(s.seed)
    assert [st["team_action"] for st in replay["steps"]] == [
        st["team_action"] for st in s.trace()["steps"]
    ]


def check_errors():
    for bad in ({"agents": []}, {"instance": {"kind": "fixed2x2"}, "agents": [], "horizon": 5}):
        try:
            cb.Experiment(bad)
        except cb.CoopBanditError:
            pass
        else:
            raise AssertionError(f"accepted {bad}")


def main():
    for check in (check_bound, check_ucb, check_batch, check_session, check_errors):
        check()
        print(f"ok {check.__name__}")
    labels = [label for label, _ in cb.Experiment.figure("l_sweep", runs=1, horizon=10)]
    print("figures ok:", labels)


if __name__ == "__main__":
    main()
