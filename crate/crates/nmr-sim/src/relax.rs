//! Phenomenological per-spin relaxation: amplitude damping toward the
//! ground state at rate 1/T1 plus extra pure dephasing so that coherences
//! decay at the full 1/T2 rate.

use crate::molecule::MoleculeSpec;
use qcore::CMatrix;
#[cfg(test)]
use qcore::C64;

/// Kraus operators for one spin over a time slice `dt`.
///
/// Amplitude damping with p = 1 - e^(-dt/T1) decays coherences by
/// e^(-dt/2T1); the phase-damping factor supplies the remaining
/// e^(-dt(1/T2 - 1/2T1)) so the total transverse decay is e^(-dt/T2).
/// T2 ≤ 2·T1 (validated on the molecule) keeps that factor ≤ 1.
/// The production path applies the composed channel entrywise (see
/// [`apply_relaxation`]); the Kraus set remains as the reference the tests
/// check that path against.
#[cfg(test)]
fn single_spin_kraus(dt: f64, t1: f64, t2: f64) -> Vec<CMatrix> {
    let p = 1.0 - (-dt / t1).exp();
    let lambda = (-dt * (1.0 / t2 - 0.5 / t1)).exp();
    let gamma = (1.0 - lambda * lambda).max(0.0);

    let c = |x: f64| C64::new(x, 0.0);
    let z = c(0.0);
    // Amplitude damping.
    let a0 = CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c((1.0 - p).sqrt())]);
    let a1 = CMatrix::from_row_slice(2, 2, &[z, c(p.sqrt()), z, z]);
    // Pure dephasing.
    let d0 = CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c((1.0 - gamma).sqrt())]);
    let d1 = CMatrix::from_row_slice(2, 2, &[z, z, z, c(gamma.sqrt())]);

    // Composed channel: {D_j A_i}.
    let mut kraus = Vec::with_capacity(4);
    for d in [&d0, &d1] {
        for a in [&a0, &a1] {
            kraus.push(d * a);
        }
    }
    kraus
}

/// Apply one relaxation slice of duration `dt` to every spin of the register.
///
/// The composed per-spin channel only rescales 2×2 blocks: coherences in
/// spin k shrink by e^(-dt/T2), the excited-excited block shrinks by
/// e^(-dt/T1), and the lost population lands in the ground-ground block.
/// Applying those rules entrywise is algebraically identical to conjugating
/// with the embedded Kraus set but O(d²) instead of O(d³) per spin, which
/// matters inside the pulse optimizer.
pub fn apply_relaxation(mat: &CMatrix, molecule: &MoleculeSpec, dt: f64) -> CMatrix {
    let n = molecule.n_spins();
    let dim = mat.nrows();
    let mut out = mat.clone();
    for k in 0..n {
        let p = 1.0 - (-dt / molecule.t1(k)).exp();
        let coh = (-dt / molecule.t2(k)).exp();
        let bit = 1usize << (n - 1 - k);
        for i in 0..dim {
            for j in 0..dim {
                match ((i & bit) != 0, (j & bit) != 0) {
                    (true, true) => {
                        let moved = out[(i, j)] * p;
                        out[(i, j)] -= moved;
                        out[(i & !bit, j & !bit)] += moved;
                    }
                    (true, false) | (false, true) => out[(i, j)] *= coh,
                    (false, false) => {}
                }
            }
        }
    }
    out
}

/// Heisenberg-picture adjoint of [`apply_relaxation`]: σ ↦ Σ K† σ K. The
/// per-spin factors act on disjoint spins, so their order is immaterial.
pub fn apply_relaxation_adjoint(mat: &CMatrix, molecule: &MoleculeSpec, dt: f64) -> CMatrix {
    let n = molecule.n_spins();
    let dim = mat.nrows();
    let mut out = mat.clone();
    for k in 0..n {
        let p = 1.0 - (-dt / molecule.t1(k)).exp();
        let coh = (-dt / molecule.t2(k)).exp();
        let bit = 1usize << (n - 1 - k);
        for i in 0..dim {
            for j in 0..dim {
                match ((i & bit) != 0, (j & bit) != 0) {
                    (true, true) => {
                        // Dual of the population transfer: the excited block
                        // gains what the ground block would have received.
                        let gg = out[(i & !bit, j & !bit)];
                        out[(i, j)] = out[(i, j)] * (1.0 - p) + gg * p;
                    }
                    (true, false) | (false, true) => out[(i, j)] *= coh,
                    (false, false) => {}
                }
            }
        }
    }
    out
}
