//! `zx`: coefficients of the second moment of zeta at its local extrema,
//! the identity suites behind them, and the Z-function experiment.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 non-convergence, 3 verification
//! failure, 4 missed zero, 5 data integrity, 6 invalid configuration.

mod commands;
mod config;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::{GlobalArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "zx",
    version,
    about = "Lower-order terms for the second moment of zeta at its local extrema",
    after_help = "Settings resolve as flags > ZX_* environment variables > --config file > defaults.\n\
                  Exit codes: 0 ok, 1 I/O, 2 non-convergence, 3 verification failure, \
                  4 missed zero, 5 data integrity, 6 invalid configuration."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute alpha_-2 .. alpha_{n-max}; writes alphas.csv and alphas.txt
    Coeffs,
    /// Run the arithmetic identity and oracle suites, one line per property
    Verify,
    /// Compute or load zero ordinates; writes zeros.txt, readable by --zeros-file
    Zeros,
    /// Locate the maximum of Z^2 in each gap; writes extrema.csv and flagged.csv
    Extrema,
    /// Error table against the asymptotic formula plus figure data
    Tables,
    /// Figure data only: t, true cumulative sum, asymptotic values and errors
    Figure,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(&cli.global).map_err(|e| Failure::Config(e.0))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))?;
    match cli.command {
        Command::Coeffs => commands::cmd_coeffs(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
        Command::Zeros => commands::cmd_zeros(&cfg),
        Command::Extrema => commands::cmd_extrema(&cfg),
        Command::Tables => commands::cmd_tables(&cfg),
        Command::Figure => commands::cmd_figure(&cfg),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 6 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = run(cli) {
        eprintln!("zx: {}", f.message());
        std::process::exit(f.exit_code());
    }
}
