use std::path::PathBuf;
use std::process::ExitCode;

use absentia_cli::{parse_config, run, write_outputs, Command};
use clap::Parser;

/// Certification and verification runs for magnetic Schrödinger operators.
#[derive(Parser, Debug)]
#[command(name = "absentia", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solver seed (overrides `solver.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the Hamiltonian matrix in MatrixMarket format.
    #[arg(long)]
    dump_matrix: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("absentia: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let report = match run(args.command, &config, args.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("absentia: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    print!("{}", report.summary());
    let dir = args.out.unwrap_or_else(|| PathBuf::from(&report.config.output.dir));
    match write_outputs(&report, &dir, args.dump_matrix) {
        Ok(w) => {
            for f in w.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("absentia: cannot write outputs to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if report.operational_failure() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
