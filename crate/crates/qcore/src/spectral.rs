//! Spectral functions of Hermitian matrices.
//!
//! A single eigendecomposition backend serves exp, sqrt, log and the
//! propagator exponential `exp(-iHt)`; at register dimensions ≤ 16 this is
//! the simplest correct choice.

use crate::matrix::{hermiticity_deviation, CMatrix, C64};
use crate::{QcoreError, Result, SPECTRAL_TOL};

/// Eigendecomposition of a Hermitian matrix. Returns `(eigenvalues, V)` with
/// real eigenvalues and unitary `V` whose columns are the eigenvectors.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let dev = hermiticity_deviation(h);
    if dev > SPECTRAL_TOL {
        return Err(QcoreError::NotHermitian { deviation: dev });
    }
    // Symmetrize to kill the sub-tolerance asymmetry before factorizing.
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Apply a real scalar function to the eigenvalues of a Hermitian matrix.
pub fn matrix_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(h)?;
    Ok(recompose(&vals.iter().map(|&l| C64::new(f(l), 0.0)).collect::<Vec<_>>(), &vecs))
}

/// exp(H) for Hermitian H.
pub fn matrix_exp(h: &CMatrix) -> Result<CMatrix> {
    matrix_function(h, f64::exp)
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
/// Eigenvalues within numerical noise below zero are clipped.
pub fn matrix_sqrt(h: &CMatrix) -> Result<CMatrix> {
    matrix_function(h, |l| l.max(0.0).sqrt())
}

/// exp(-iHt) for Hermitian H: the propagator of a constant Hamiltonian.
pub fn unitary_exp(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let phases: Vec<C64> = vals.iter().map(|&l| C64::new(0.0, -l * t).exp()).collect();
    Ok(recompose(&phases, &vecs))
}

/// V diag(d) V† without forming the intermediate diagonal matrix.
pub fn recompose(diag: &[C64], vecs: &CMatrix) -> CMatrix {
    let mut scaled = vecs.clone();
    for (j, &d) in diag.iter().enumerate() {
        for x in scaled.column_mut(j).iter_mut() {
            *x *= d;
        }
    }
    scaled * vecs.adjoint()
}
