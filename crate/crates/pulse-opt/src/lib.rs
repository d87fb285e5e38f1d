//! GRAPE-style compiler from register gates to piecewise-constant
//! (amplitude, phase) pulse schedules under the spin simulator's drift and
//! global-control Hamiltonians.

pub mod compile;
pub mod grape;

pub use compile::{
    compile_cycle, default_gate_settings, CompilationReport, CompileSettings, GateReport,
    GateSettings,
};
pub use grape::{
    gate_fidelity, gradient_fd_relative_error, optimize, OptimizationProblem, OptimizationReport,
};

#[derive(Debug, thiserror::Error)]
pub enum PulseOptError {
    #[error("invalid optimization problem: {0}")]
    InvalidProblem(String),
    #[error("pulse compilation failed for gate(s) {gate}: best fidelity {best_fidelity:.6} < goal {goal:.6} after {attempts} attempt(s)")]
    CompilationFailed {
        gate: String,
        best_fidelity: f64,
        goal: f64,
        attempts: usize,
    },
    #[error(transparent)]
    Nmr(#[from] nmr_sim::NmrError),
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
}

pub type Result<T> = std::result::Result<T, PulseOptError>;
