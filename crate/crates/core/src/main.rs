use std::path::PathBuf;

use clap::Parser;
use slag_moduli::cli::{execute, Command, RunConfig, EXIT_INPUT};

/// Moduli of special Lagrangian tori: batch checks with JSON reports.
#[derive(Debug, Parser)]
#[command(name = "slag-moduli", version)]
struct Args {
    command: Command,
    /// JSON configuration for the command.
    #[arg(long)]
    config: PathBuf,
    /// Override the fixed tolerances of the command.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory for report.json and CSV dumps.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Cross-check the Ricci form through Christoffel symbols.
    #[arg(long)]
    oracle: bool,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            std::process::exit(EXIT_INPUT);
        }
    };
    let cfg = RunConfig {
        command: args.command,
        config: args.config,
        tol: args.tol,
        out: args.out,
        oracle: args.oracle,
    };
    std::process::exit(execute(&cfg));
}
