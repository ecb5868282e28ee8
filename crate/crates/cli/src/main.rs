use std::process::ExitCode;

use clap::Parser;
use gpdephase_cli::args::Cli;
use gpdephase_cli::{execute, init_threads};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("GPDEPHASE_THREADS").ok();
    if let Err(e) = init_threads(threads.as_deref()) {
        eprintln!("gpdephase: {e}");
        return ExitCode::from(2);
    }
    let (command, flags) = cli.command.split();
    match execute(command, &flags) {
        Ok(manifest) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest).expect("manifest serializes")
            );
            if manifest.total_failure() {
                eprintln!("gpdephase: every grid point failed");
                return ExitCode::from(1);
            }
            if manifest.failed_points > 0 {
                eprintln!(
                    "gpdephase: {} of {} points failed; see \"failures\" in the table metadata",
                    manifest.failed_points, manifest.points
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gpdephase: {e}");
            ExitCode::from(match e {
                gpdephase_cli::CliError::Config { .. } | gpdephase_cli::CliError::ConfigFile(_) => {
                    2
                }
                _ => 1,
            })
        }
    }
}
