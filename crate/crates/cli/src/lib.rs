//! Library side of the `szilard` binary: config loading, report assembly
//! and the subcommand implementations.

pub mod compile_cmd;
pub mod config;
pub mod report;
pub mod run;
pub mod selftest;
pub mod sweep;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Compile(String),
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Nmr(#[from] nmr_sim::NmrError),
    #[error(transparent)]
    Metrology(#[from] metrology::MetrologyError),
    #[error(transparent)]
    PulseOpt(#[from] pulse_opt::PulseOptError),
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            // Bad parameters and unreadable input files are user input too.
            CliError::Engine(engine::EngineError::InvalidParams(_)) => 2,
            CliError::Nmr(_) => 2,
            CliError::Compile(_) => 3,
            CliError::PulseOpt(pulse_opt::PulseOptError::CompilationFailed { .. }) => 3,
            _ => 1,
        }
    }
}
