use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use transmutant_cli::commands::{run, Cli};
use transmutant_cli::error::CliError;

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("TRANSMUTANT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "TRANSMUTANT_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Ignores a closed stdout, as when piped into `head`.
fn print(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| run(cli));
    match result {
        Ok(summary) => {
            print(&serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::VerifyFailed { report, .. } = &e {
                print(report);
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
