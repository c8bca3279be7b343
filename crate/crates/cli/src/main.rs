use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trinity_cli::commands::{cmd_clock_info, cmd_scenario, cmd_verify, Scenario};
use trinity_cli::CliError;
use trinity_core::exec::Strategy;

/// Relational quantum dynamics checks on finite clock-system models.
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 bad config or i/o.
/// TRINITY_THREADS caps the worker pool; 1 runs sequentially.
#[derive(Parser)]
#[command(name = "trinity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check suite on the configured model.
    Verify {
        config: PathBuf,
        /// Write reports here instead of the config's `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run one scenario and write its CSV table.
    Scenario {
        #[arg(value_enum)]
        name: Scenario,
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print clock diagnostics.
    ClockInfo { config: PathBuf },
}

fn strategy() -> Result<Strategy, CliError> {
    let Ok(raw) = std::env::var("TRINITY_THREADS") else {
        return Ok(Strategy::available());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("TRINITY_THREADS must be a positive integer, got `{raw}`")))?;
    if n == 1 {
        return Ok(Strategy::Sequential);
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Strategy::available())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let strategy = strategy()?;
    match cli.command {
        Command::Verify { config, output_dir } => cmd_verify(&config, output_dir, strategy),
        Command::Scenario { name, config, output_dir } => cmd_scenario(name, &config, output_dir, strategy),
        Command::ClockInfo { config } => cmd_clock_info(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("trinity: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
