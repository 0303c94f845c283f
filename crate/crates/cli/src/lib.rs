//! Command-line driver: data preparation, training, evaluation, sweeps,
//! one-shot recommendation and report rendering.

pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;

pub use cli::Cli;
pub use config::RunConfig;

pub fn run(cli: Cli) -> anyhow::Result<()> {
    commands::dispatch(cli)
}
