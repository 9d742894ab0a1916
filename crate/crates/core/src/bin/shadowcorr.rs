//! Command-line runner for bundled and user experiment configs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shadowcorr::experiment::{run, verify, Overrides, Suite, VerifyOptions};
use shadowcorr::Error;

#[derive(Parser)]
#[command(name = "shadowcorr", version, about = "Correlated vs independent shadowing experiments")]
struct Cli {
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replications per sweep point (overrides the config).
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Single CSV output file for `run`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON experiment config and write CSV.
    Run { config: PathBuf },
    /// Run a property suite: ordering, moments, convergence, cross-validation.
    Verify { suite: String },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.command {
        Command::Run { config } => {
            let ov = Overrides {
                seed: cli.seed,
                replications: cli.reps,
                output: cli.out,
            };
            match run(&config, &ov) {
                Ok(report) => {
                    for line in &report.summary {
                        println!("{line}");
                    }
                    for path in &report.outputs {
                        println!("wrote {}", path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::Verify { suite } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let mut opts = VerifyOptions::default();
            if let Some(s) = cli.seed {
                opts.seed = s;
            }
            if let Some(r) = cli.reps {
                opts.replications = r;
            }
            match verify(suite, opts) {
                Ok(results) => {
                    let mut ok = true;
                    for r in &results {
                        ok &= r.passed;
                        println!("{}", serde_json::to_string(r).expect("serializable result"));
                    }
                    let failed = results.iter().filter(|r| !r.passed).count();
                    eprintln!("{} properties, {failed} failed", results.len());
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
    }
}
