use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fbsing::config::RunConfig;
use fbsing::exit;
use fbsing::oracle::oracle_check;
use fbsing::pipeline::{run, RunError};

#[derive(Parser)]
#[command(name = "fbsing", version, about = "ε-solutions and degeneracy diagnostics on m-fold symmetric disks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for `run`.
    #[arg(long, global = true, default_value = "fbsing-out")]
    out: PathBuf,
    /// Worker threads; 1 gives bit-reproducible dumps.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep ε, dump fields and write the diagnostics report.
    Run { config: PathBuf },
    /// Parse and validate a config, then print it with defaults filled in.
    Validate { config: PathBuf },
    /// Run the 1D oracle suite.
    OracleCheck,
}

fn load(path: &PathBuf) -> Result<RunConfig, ExitCode> {
    RunConfig::load(path).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(exit::CONFIG)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        eprintln!("config error: --workers must be positive");
        return ExitCode::from(exit::CONFIG);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
        eprintln!("warning: {e}");
    }

    match cli.command {
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                print!("{}", cfg.resolved());
                ExitCode::from(exit::OK)
            }
            Err(code) => code,
        },
        Command::Run { config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run(&cfg, &cli.out, workers) {
                Ok(outcome) => {
                    for w in &outcome.sweep.warnings {
                        eprintln!("warning: {w}");
                    }
                    if let Some(rep) = &outcome.report {
                        println!("degenerate = {} slope = {:.4}", rep.degenerate, rep.slope);
                    }
                    ExitCode::from(if outcome.complete { exit::OK } else { exit::NOT_CONVERGED })
                }
                Err(e @ RunError::Io { .. }) => {
                    eprintln!("I/O error: {e}");
                    ExitCode::from(exit::IO)
                }
                Err(RunError::Geometry(fbsing_core::geometry::GeometryError::Io(e))) => {
                    eprintln!("I/O error: {e}");
                    ExitCode::from(exit::IO)
                }
                Err(RunError::Diagnostics(fbsing_core::diagnostics::DiagnosticsError::Io(e))) => {
                    eprintln!("I/O error: {e}");
                    ExitCode::from(exit::IO)
                }
                Err(e) => {
                    eprintln!("solver error: {e}");
                    ExitCode::from(exit::NOT_CONVERGED)
                }
            }
        }
        Command::OracleCheck => match oracle_check() {
            Ok(check) => {
                print!("{}", check.table);
                ExitCode::from(if check.passed { exit::OK } else { exit::NOT_CONVERGED })
            }
            Err(e) => {
                eprintln!("oracle error: {e}");
                ExitCode::from(exit::NOT_CONVERGED)
            }
        },
    }
}
