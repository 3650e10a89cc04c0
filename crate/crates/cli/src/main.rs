//! `coop-bandit`: run experiments, reproduce figures, evaluate the regret
//! bound and serve human sessions.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use coop_bandit::env::InstanceFile;
use coop_bandit::runner::{
    reproduce_figure, run_batch, theorem1_bound, verify_theorem, ExperimentConfig, FigureOptions, Format, ResultSet,
    Series,
};
use coop_bandit::session::SessionManager;

#[derive(Parser)]
#[command(name = "coop-bandit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch described by a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        horizon: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Reproduce one of the built-in sweeps.
    Figure {
        name: String,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate the two-agent regret bound for an instance file.
    Bound {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        horizon: u64,
        /// Use the smallest observability in the second sum.
        #[arg(long)]
        conservative: bool,
    },
    /// Run the theorem-mode batch and compare it with the bound.
    VerifyTheorem {
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Append session logs here and restore sessions found there.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

fn emit(results: &ResultSet, output: &Output) -> Result<()> {
    if let Some(path) = &output.out {
        return results
            .export(path, output.format)
            .with_context(|| format!("writing {}", path.display()));
    }
    let stdout = std::io::stdout().lock();
    match output.format {
        Format::Csv => results.write_csv(stdout)?,
        Format::Json => {
            let mut stdout = stdout;
            serde_json::to_writer_pretty(&mut stdout, results)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Run {
            config,
            seed,
            runs,
            horizon,
            output,
        } => {
            let mut experiment = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                experiment.seed = seed;
            }
            if let Some(runs) = runs {
                experiment.runs = runs;
            }
            if let Some(horizon) = horizon {
                experiment.horizon = horizon;
            }
            let batch = run_batch(&experiment)?;
            let name = config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            let series = Series {
                label: name.clone(),
                config: Some(experiment),
                aggregate: batch.aggregate,
            };
            emit(&ResultSet::new(name, vec![series]), &output)?;
        }
        Command::Figure {
            name,
            runs,
            horizon,
            seed,
            output,
        } => {
            let results = reproduce_figure(&name, FigureOptions { runs, horizon, seed })?;
            emit(&results, &output)?;
        }
        Command::Bound {
            instance,
            horizon,
            conservative,
        } => {
            let model = InstanceFile::load(&instance)?.to_model()?;
            println!("{}", theorem1_bound(&model, horizon, conservative)?);
        }
        Command::VerifyTheorem { horizon, runs, seed } => {
            let check = verify_theorem(horizon, runs, seed)?;
            println!(
                "T={} runs={} mean regret {:.3} (se {:.3}) bound {:.4}: {}",
                check.horizon,
                check.runs,
                check.mean_regret,
                check.stderr,
                check.bound,
                if check.holds { "holds" } else { "VIOLATED" }
            );
            return Ok(check.holds);
        }
        Command::Serve { addr, log_dir } => {
            let manager = match log_dir {
                Some(dir) => SessionManager::restore(dir)?,
                None => SessionManager::new(),
            };
            eprintln!("listening on http://{addr} ({} restored sessions)", manager.len());
            tokio::runtime::Runtime::new()?.block_on(coop_bandit_server::serve(addr, Arc::new(manager)))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
