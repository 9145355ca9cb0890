//! Command-line front end for `cellbath`: configuration handling, named
//! figure recipes, CSV output, parameter sweeps and the verification report.

pub mod config;
pub mod recipes;
pub mod run;
pub mod sweep;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cellbath::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
