//! State functionals: von Neumann entropy and Uhlmann fidelity.

use crate::matrix::trace;
use crate::spectral::{hermitian_eigen, matrix_sqrt};
use crate::state::DensityMatrix;
use crate::{QcoreError, Result};

/// S(ρ) = -Σ λ ln λ in nats, with 0·ln 0 ≡ 0.
/// Eigenvalues below 1e-12 are clipped to zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(rho.matrix()).expect("density matrix is Hermitian");
    vals.iter()
        .map(|&l| if l < 1e-12 { 0.0 } else { -l * l.ln() })
        .sum()
}

/// Uhlmann fidelity F = Tr √(√a b √a), clamped into [0, 1].
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QcoreError::DimensionMismatch {
            context: "fidelity",
            got: b.dim(),
            expected: a.dim(),
        });
    }
    let sa = matrix_sqrt(a.matrix())?;
    let inner = &sa * b.matrix() * &sa;
    // Symmetrize the numerically near-Hermitian product before the sqrt.
    let inner = (&inner + inner.adjoint()).map(|x| x * 0.5);
    let f = trace(&matrix_sqrt(&inner)?).re;
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen::{random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let rho = DensityMatrix::basis_state(&[0, 1]);
        assert!(von_neumann_entropy(&rho).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_maximally_mixed_qubit() {
        let rho = DensityMatrix::maximally_mixed(1);
        assert!((von_neumann_entropy(&rho) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_binary_mixture() {
        let rho = DensityMatrix::from_probabilities(&[0.87861, 0.12139]).unwrap();
        // -Σ p ln p evaluated independently.
        assert!((von_neumann_entropy(&rho) - 0.36968535132718383).abs() < 1e-10);
    }

    #[test]
    fn entropy_bounds_and_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let rho = random_density(3, &mut rng);
            let s = von_neumann_entropy(&rho);
            assert!(s >= 0.0 && s <= (rho.dim() as f64).ln() + 1e-12);
            let u = random_unitary(3, &mut rng);
            let s2 = von_neumann_entropy(&rho.apply_unitary(&u).unwrap());
            assert!((s - s2).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_identical_and_orthogonal() {
        let g = DensityMatrix::basis_state(&[0]);
        let e = DensityMatrix::basis_state(&[1]);
        assert!((fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&g, &e).unwrap() < 1e-10);
    }

    #[test]
    fn fidelity_pure_vs_mixed_closed_form() {
        let g = DensityMatrix::basis_state(&[0]);
        let m = DensityMatrix::maximally_mixed(1);
        // √⟨0|I/2|0⟩ = 1/√2.
        assert!((fidelity(&g, &m).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let a = random_density(2, &mut rng);
            let b = random_density(2, &mut rng);
            let fab = fidelity(&a, &b).unwrap();
            let fba = fidelity(&b, &a).unwrap();
            assert!((fab - fba).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_rejects_dimension_mismatch() {
        let a = DensityMatrix::basis_state(&[0]);
        let b = DensityMatrix::basis_state(&[0, 0]);
        assert!(fidelity(&a, &b).is_err());
    }
}
