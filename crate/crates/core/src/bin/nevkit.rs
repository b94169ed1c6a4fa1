use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nevkit::cli::{render, run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "nevkit", version, about = "Checks on finite sequences in the unit disk")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u128,
    #[arg(long)]
    majorant: Option<PathBuf>,
    /// Covering constant C
    #[arg(long)]
    c: Option<f64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = ExperimentConfig {
        command: args.command,
        input: args.input,
        out: args.out,
        n: args.n,
        seed: args.seed,
        budget: args.budget,
        majorant: args.majorant,
        c: args.c,
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match render(&outcome.report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
