//! Seeded generators for random Hermitian matrices, unitaries and density
//! matrices. Used by tests and by the Monte Carlo harness.

use crate::matrix::{CMatrix, C64};
use crate::spectral::unitary_exp;
use crate::state::{DensityMatrix, UnitaryOp};
use rand::Rng;

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(n_qubits: usize, rng: &mut impl Rng) -> CMatrix {
    let dim = 1usize << n_qubits;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    (&g + g.adjoint()).map(|x| x * 0.5)
}

/// Haar-ish random unitary: exp(-iH) of a random Hermitian generator.
pub fn random_unitary(n_qubits: usize, rng: &mut impl Rng) -> UnitaryOp {
    let h = random_hermitian(n_qubits, rng);
    UnitaryOp::new(unitary_exp(&h, 1.0).expect("Hermitian by construction"))
        .expect("exponential of Hermitian is unitary")
}

/// Random full-rank density matrix via GG†/Tr.
pub fn random_density(n_qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let pos = &g * g.adjoint();
    let tr: f64 = pos.diagonal().iter().map(|x| x.re).sum();
    DensityMatrix::new(pos.map(|x| x / tr)).expect("normalized Gram matrix is a valid state")
}
