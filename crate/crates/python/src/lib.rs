//! Python bindings. Structured values cross the boundary as plain Python
//! dicts and lists, in the same JSON shapes the CLI and server use.

use coop_bandit::env::InstanceFile;
use coop_bandit::runner::{self, ExperimentConfig, FigureOptions};
use coop_bandit::session::{Session as CoreSession, SessionRequest};
use coop_bandit::{ArmStats, ConfidenceParams};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(coop_bandit_py, CoopBanditError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    CoopBanditError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = value.py().import("json")?.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(err)
}

/// A validated experiment configuration.
#[pyclass(module = "coop_bandit_py", frozen)]
struct Experiment {
    config: ExperimentConfig,
}

#[pymethods]
impl Experiment {
    #[new]
    fn new(config: &Bound<'_, PyAny>) -> PyResult<Self> {
        let config: ExperimentConfig = from_py(config)?;
        config.validate().map_err(err)?;
        Ok(Self { config })
    }

    /// Built-in sweep batches as `(label, Experiment)` pairs.
    #[staticmethod]
    #[pyo3(signature = (name, runs=100, horizon=10_000, seed=0))]
    fn figure(name: &str, runs: usize, horizon: u64, seed: u64) -> PyResult<Vec<(String, Experiment)>> {
        let configs = runner::figure_configs(name, FigureOptions { runs, horizon, seed }).map_err(err)?;
        Ok(configs
            .into_iter()
            .map(|(label, config)| (label, Experiment { config }))
            .collect())
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.config)
    }

    /// Every run in parallel: `{seeds, curves, aggregate: {runs, mean, stderr}}`.
    fn run_batch(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let batch = py.detach(|| runner::run_batch(&self.config)).map_err(err)?;
        to_py(py, &batch)
    }

    /// Full trace of one run with the given seed.
    fn run_episode(&self, py: Python<'_>, seed: u64) -> PyResult<Py<PyAny>> {
        let trace = py.detach(|| runner::run_episode(&self.config, seed)).map_err(err)?;
        to_py(py, &trace)
    }

    /// Pseudo-regret curve of one run.
    fn run_curve(&self, py: Python<'_>, seed: u64) -> PyResult<Vec<f64>> {
        py.detach(|| runner::run_curve(&self.config, seed)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Experiment(agents={}, horizon={}, runs={}, seed={})",
            self.config.agents.len(),
            self.config.horizon,
            self.config.runs,
            self.config.seed
        )
    }
}

/// One human-in-the-loop game; the caller plays seat 0.
#[pyclass(module = "coop_bandit_py")]
struct Session {
    inner: CoreSession,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (request=None, id="local"))]
    fn new(request: Option<&Bound<'_, PyAny>>, id: &str) -> PyResult<Self> {
        let request: SessionRequest = request.map(from_py).transpose()?.unwrap_or_default();
        let config = request.resolve(0).map_err(err)?;
        Ok(Self {
            inner: CoreSession::new(id, config).map_err(err)?,
        })
    }

    fn act(&mut self, py: Python<'_>, action: usize, seq: u64) -> PyResult<Py<PyAny>> {
        let result = self.inner.submit(action, seq).map_err(err)?;
        to_py(py, &result)
    }

    fn state(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.state())
    }

    fn trace(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.public_trace())
    }

    fn close(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let summary = self.inner.close().map_err(err)?;
        to_py(py, &summary)
    }

    /// The experiment that replays this session in the batch runner.
    fn replay_experiment(&self) -> Experiment {
        let config = self.inner.config();
        Experiment {
            config: config.to_experiment(self.inner.human_actions().to_vec()),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config().seed
    }
}

/// Two-agent regret bound for an instance given as a dict.
#[pyfunction]
#[pyo3(signature = (instance, horizon, conservative=false))]
fn theorem1_bound(instance: &Bound<'_, PyAny>, horizon: u64, conservative: bool) -> PyResult<f64> {
    let file: InstanceFile = from_py(instance)?;
    let model = file.to_model().map_err(err)?;
    runner::theorem1_bound(&model, horizon, conservative).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (horizon=10_000, runs=100, seed=0))]
fn verify_theorem(py: Python<'_>, horizon: u64, runs: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let check = py.detach(|| runner::verify_theorem(horizon, runs, seed)).map_err(err)?;
    to_py(py, &check)
}

/// `(doubling_ratio, log_slope, tail_rate)` of a cumulative regret curve.
#[pyfunction]
fn sublinearity(curve: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let s = runner::sublinearity_metrics(&curve).map_err(err)?;
    Ok((s.doubling_ratio, s.log_slope, s.tail_rate))
}

#[pyfunction]
fn ucb_index(mean: f64, count: u64, c: f64, delta: f64) -> PyResult<f64> {
    let params = ConfidenceParams::new(c, delta).map_err(err)?;
    Ok(coop_bandit::ucb_index(ArmStats { count, mean }, params))
}

#[pymodule]
fn coop_bandit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CoopBanditError", m.py().get_type::<CoopBanditError>())?;
    m.add_class::<Experiment>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(theorem1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(sublinearity, m)?)?;
    m.add_function(wrap_pyfunction!(ucb_index, m)?)?;
    Ok(())
}
