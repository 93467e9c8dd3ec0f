use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};
use nonlocal_gc::run::{exit_code, run, Subcommand};

/// Gauge obstacles, nonlocal double obstacle and gradient-constraint solves,
/// and their verification suite.
#[derive(Parser)]
#[command(name = "nlgc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the configuration and `NLGC_OUT`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for node-parallel work.
    #[arg(long)]
    max_parallel: Option<usize>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Gauge and polar tables plus data validation.
    Geometry(Common),
    /// Obstacle fields and ridge masks.
    Obstacle(Common),
    /// Solve the configured problem and certify the result.
    Solve(Common),
    /// Run the verification suite.
    Verify(Common),
    /// Solve along the smoothing sequence of the body.
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (sub, args) = match cli.command {
        Command::Geometry(a) => (Subcommand::Geometry, a),
        Command::Obstacle(a) => (Subcommand::Obstacle, a),
        Command::Solve(a) => (Subcommand::Solve, a),
        Command::Verify(a) => (Subcommand::Verify, a),
        Command::Sweep(a) => (Subcommand::Sweep, a),
    };
    match run(&args.config, sub, args.out.as_deref(), args.max_parallel) {
        Ok(outcome) => {
            println!(
                "{} {}: {} artifacts in {}",
                sub.name(),
                if outcome.pass() { "passed" } else { "FAILED" },
                outcome.manifest.artifacts.len(),
                outcome.out_dir.display()
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("nlgc {}: {e}", sub.name());
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
