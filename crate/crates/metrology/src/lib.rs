//! Readout side of the experiment: single-qubit tomography (exact or with
//! binomial shot noise), energy extraction, and Monte Carlo error bars from
//! rerunning the cycle under pulse/gradient/readout jitter.

pub mod montecarlo;
pub mod tomography;

pub use montecarlo::{
    energy_label, monte_carlo_errorbars, noiseless_ledger, ErrorBarReport, McExperiment, McMode,
    NoiseParams, WEIGHT_FEEDBACK_LABEL,
};
pub use tomography::{energy_of, project_to_state, tomograph_qubit, Shots, TomographyResult};

#[derive(Debug, thiserror::Error)]
pub enum MetrologyError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Nmr(#[from] nmr_sim::NmrError),
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
}

pub type Result<T> = std::result::Result<T, MetrologyError>;
