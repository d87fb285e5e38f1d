//! Complex linear algebra and quantum-state primitives for small qubit
//! registers: density matrices, unitaries, operator embedding, partial
//! trace, spectral matrix functions, entropy and fidelity.
//!
//! Everything works on dense matrices; registers of up to ~8 qubits are the
//! intended regime, so correctness is prioritized over scaling.
//!
//! Conventions fixed here and relied on by every downstream crate:
//! - qubit 0 is the most significant bit of a basis index,
//! - basis bit 0 of a qubit is its ground state (`σ_z|0⟩ = +|0⟩`).

pub mod matrix;
pub mod metrics;
pub mod randgen;
pub mod spectral;
pub mod state;

pub use matrix::{bit_of, dagger, embed, identity, kron, max_abs_diff, trace, CMatrix, C64};
pub use matrix::{sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z};
pub use metrics::{fidelity, von_neumann_entropy};
pub use spectral::{hermitian_eigen, matrix_exp, matrix_function, matrix_sqrt, unitary_exp};
pub use state::{DensityMatrix, UnitaryOp};

/// Tolerance for algebraic identities (Hermiticity, unit trace, unitarity).
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for spectral-function inputs (Hermiticity check before eigen).
pub const SPECTRAL_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum QcoreError {
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid qubit targets: {0}")]
    InvalidTargets(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid unitary: U†U deviates from I by {deviation:.3e}")]
    NotUnitary { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, QcoreError>;
