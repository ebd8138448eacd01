use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nldirac::config::load_config;
use nldirac::experiment::{print_sweep, run_experiment_in, sweep_in};
use nldirac::output::print_table;
use nldirac::Error;

/// Worker threads for the per-node solve; everything else is configured in the file.
const THREADS_VAR: &str = "NLDIRAC_THREADS";

#[derive(Parser)]
#[command(name = "nldirac", version, about = "Characteristics solver for massless nonlinear Dirac systems in 1+1D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Check { config: PathBuf },
    /// Refinement study at h, h/2, ..., h/2^k.
    Sweep {
        config: PathBuf,
        #[arg(long = "halve-h", default_value_t = 2)]
        halve_h: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// exit codes
const OK: u8 = 0;
const CHECKS_FAILED: u8 = 1;
const BAD_CONFIG: u8 = 2;
const RUN_ERROR: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(match err {
        Error::InvalidConfig(_) => BAD_CONFIG,
        _ => RUN_ERROR,
    })
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_VAR}={raw:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(BAD_CONFIG);
    }
    match cli.command {
        Command::Check { config } => match load_config(&config) {
            Ok(cfg) => {
                println!("ok {} (config hash {})", config.display(), cfg.hash());
                ExitCode::from(OK)
            }
            Err(e) => fail(&e),
        },
        Command::Run { config, out } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            match run_experiment_in(&cfg, &dir) {
                Ok(outcome) => {
                    let rows: Vec<Vec<String>> = outcome
                        .summary
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.name.clone(),
                                format!("{:.3e}", c.value.0),
                                format!("{:.3e}", c.tolerance.0),
                                if c.pass { "pass" } else { "FAIL" }.to_string(),
                            ]
                        })
                        .collect();
                    let _ = print_table(&mut io::stdout(), &["check", "value", "tolerance", "status"], &rows);
                    println!("artifacts in {}", dir.display());
                    ExitCode::from(if outcome.all_pass() { OK } else { CHECKS_FAILED })
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { config, halve_h, out } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            match sweep_in(&cfg, halve_h, &dir) {
                Ok(rows) => {
                    let _ = print_sweep(&mut io::stdout(), &rows);
                    ExitCode::from(OK)
                }
                Err(e) => fail(&e),
            }
        }
    }
}
