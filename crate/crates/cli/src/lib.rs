//! Command-line driver: reads a TOML run description, evaluates the mass and
//! the requested checks, and writes a JSON report and a plain-text table.

pub mod checks;
pub mod config;
pub mod output;

pub use checks::{build_metric, check_radii, run};
pub use config::{Check, Format, MetricSpec, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or usage; exit status 2.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] hypmass::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
