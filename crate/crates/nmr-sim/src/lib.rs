//! Spin-dynamics backend for liquid-state NMR registers.
//!
//! Provides the rotating-frame drift Hamiltonian (offsets + scalar
//! J couplings), the global radio-frequency control Hamiltonian, pulse
//! sequences as piecewise-constant (amplitude, phase) schedules, unitary
//! propagation, and phenomenological per-spin T1/T2 relaxation.

pub mod hamiltonian;
pub mod molecule;
pub mod propagate;
pub mod pulse;
pub mod relax;

pub use hamiltonian::{control_generators, control_hamiltonian, drift_angular, drift_hamiltonian, free_evolution};
pub use molecule::{FrequencyForm, MoleculeSpec};
pub use propagate::{propagate, pulse_unitary, segment_hamiltonian_angular, Relaxation};
pub use pulse::{PulseSegment, PulseSequence};
pub use relax::{apply_relaxation, apply_relaxation_adjoint};

/// ℏ in peV·s; fixes the energy unit used across the workspace.
pub const HBAR_PEV_S: f64 = 6.582119569e-4;

#[derive(Debug, thiserror::Error)]
pub enum NmrError {
    #[error("invalid molecule: {0}")]
    InvalidMolecule(String),
    #[error("{path}:{line}: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid pulse sequence: {0}")]
    InvalidPulse(String),
    #[error("dimension mismatch: state has {state_qubits} qubits, molecule has {spins} spins")]
    DimensionMismatch { state_qubits: usize, spins: usize },
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
}

pub type Result<T> = std::result::Result<T, NmrError>;
