//! Command-line front end for `gpdephase-core`: configuration, dispatch,
//! table output with a verified manifest, and gnuplot scripts.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;

pub use config::{load_config, Command, Figure, Format, RunConfig};
pub use error::{CliError, Result};
pub use output::Manifest;

/// Size the global rayon pool from `GPDEPHASE_THREADS` when it is set.
pub fn init_threads(value: Option<&str>) -> Result<()> {
    let Some(text) = value else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Threads(text.to_string()))?;
    if n == 0 {
        return Err(CliError::Threads(text.to_string()));
    }
    // A second initialisation in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parse-free entry point: resolve the configuration and run it.
pub fn execute(command: Command, flags: &args::Flags) -> Result<Manifest> {
    let cfg = load_config(command, flags.config.as_deref(), flags.to_partial())?;
    run::run(&cfg)
}
