use std::path::PathBuf;
use std::process::ExitCode;

use beamwave::{load_config, run, Command, EXIT_CONFIG};
use clap::Parser;

/// Solitary waves of fourth-order beam and NLS equations.
#[derive(Parser, Debug)]
#[command(name = "beamwave", version)]
struct Cli {
    /// solve, branch, stability, evolve, kernel, variational or nls-branch
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Rerun the independent checks and fail on mismatch
    #[arg(long)]
    verify: bool,
    /// Overrides `output_dir` from the config
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut config = match load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if config.command != cli.command {
        eprintln!(
            "config error: command `{}` on the command line but `{}` in {}",
            cli.command.name(),
            config.command.name(),
            cli.config.display()
        );
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    if let Some(dir) = cli.output_dir {
        config.output_dir = dir;
    }
    let report = run(&config, cli.verify);
    for (key, value) in &report.headline {
        println!("{key} = {value}");
    }
    if let Some(message) = &report.failure {
        eprintln!("{}: {message}", config.command.name());
    }
    ExitCode::from(report.exit_code as u8)
}
