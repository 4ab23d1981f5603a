//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 1 usage/validation error, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wdrbo::harness::{
    emit, run_experiment, run_selftest, stream_rng, ExperimentConfig, ResolvedConfig,
    STREAM_PANEL,
};
use wdrbo::regret::{context_panel, oracle_best};

#[derive(Parser)]
#[command(
    name = "wdrbo",
    about = "Distributionally robust Bayesian optimization experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single algorithm from a JSON config and emit traces + summary.
    Run { config: PathBuf },
    /// Run several algorithms on shared per-seed context streams and panels.
    Compare { config: PathBuf },
    /// Print the benchmark decision and its expected value per seed.
    Oracle { config: PathBuf },
    /// Run the fast invariant checks.
    Selftest,
}

fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config `{}`: {e}", path.display()))?;
    ExperimentConfig::from_json(&text).map_err(|e| e.to_string())
}

fn resolve(path: &Path, single: bool) -> Result<ResolvedConfig, String> {
    load_config(path)?.resolve(single).map_err(|e| e.to_string())
}

fn execute(rc: &ResolvedConfig) -> Result<(), String> {
    let runs = run_experiment(rc).map_err(|e| e.to_string())?;
    for run in &runs {
        for (seed, reason) in &run.failures {
            eprintln!("warning: {} seed {seed} aborted: {reason}", run.algo);
        }
    }
    let written = emit(rc, &runs).map_err(|e| e.to_string())?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    let any_failures = runs.iter().any(|r| !r.failures.is_empty());
    if any_failures {
        Err("some seeds failed; outputs cover the completed seeds only".into())
    } else {
        Ok(())
    }
}

fn oracle_table(rc: &ResolvedConfig) -> Result<(), String> {
    let env = rc.environment().map_err(|e| e.to_string())?;
    println!(
        "# oracle decisions for `{}` (time-invariant context distribution; one panel per seed)",
        rc.env
    );
    println!("seed,x,value");
    for &seed in &rc.seeds {
        let mut rng = stream_rng(seed, STREAM_PANEL);
        let panel = context_panel(&env, rc.panel_size, &mut rng);
        let oracle = oracle_best(&env, &panel, rc.oracle_grid).map_err(|e| e.to_string())?;
        let xs: Vec<String> = oracle.x.iter().map(|v| format!("{v:.6}")).collect();
        println!("{seed},[{}],{:.6}", xs.join(" "), oracle.value);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own usage text; map every parse problem to the
            // validation exit code.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match cli.command {
        Command::Run { config } => match resolve(&config, true) {
            Ok(rc) => match execute(&rc) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Compare { config } => match resolve(&config, false) {
            Ok(rc) => match execute(&rc) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Oracle { config } => match resolve(&config, false) {
            Ok(rc) => match oracle_table(&rc) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Selftest => {
            let mut failed = false;
            for (name, outcome) in run_selftest() {
                match outcome {
                    Ok(()) => println!("PASS {name}"),
                    Err(e) => {
                        failed = true;
                        println!("FAIL {name}: {e}");
                    }
                }
            }
            if failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
