//! Experiment harness for `entangler-core`: JSON configuration, named
//! experiments, and CSV/JSON result files.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::Config;
pub use experiments::{run, Experiment};
pub use table::{csv_bytes, write_run, RunOutput, Table, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] entangler_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}
