use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use iqctl::{check, execute, load, CliError, Mode, Status};

#[derive(Parser)]
#[command(
    name = "iqctl",
    version,
    about = "Run indirect-control experiments from JSON configs"
)]
struct Cli {
    /// Directory for result files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config of any mode.
    Run { config: PathBuf },
    /// Execute a sweep config.
    Sweep { config: PathBuf },
    /// Validate a config without executing it.
    Check { config: PathBuf },
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "result".into())
}

fn dispatch(cli: &Cli) -> Result<Status, CliError> {
    match &cli.command {
        Command::Check { config } => {
            let parsed = load(config)?;
            check(&parsed)?;
            if !cli.quiet {
                eprintln!("{}: ok ({})", config.display(), parsed.mode().name());
            }
            Ok(Status::Completed)
        }
        Command::Run { config } | Command::Sweep { config } => {
            let parsed = load(config)?;
            if matches!(cli.command, Command::Sweep { .. }) && parsed.mode() != Mode::Sweep {
                return Err(CliError::Invalid(format!(
                    "`sweep` needs a sweep config, got mode \"{}\"",
                    parsed.mode().name()
                )));
            }
            let start = Instant::now();
            let report = execute(&parsed, &stem(config), &cli.out)?;
            if !cli.quiet {
                eprintln!(
                    "{}: {} -> {} ({:.3} s){}",
                    config.display(),
                    report.mode.name(),
                    report.output.display(),
                    start.elapsed().as_secs_f64(),
                    if report.status == Status::Infeasible {
                        ", target not reached"
                    } else {
                        ""
                    }
                );
            }
            Ok(report.status)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
