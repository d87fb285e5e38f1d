//! Drift and control Hamiltonians in the rotating frame.
//!
//! The drift term is Σ_k (ω_k - ω_R) σ_z_k / 2 plus the scalar-coupling
//! term; the k ≠ n double sum counts every ordered pair, so each unordered
//! pair contributes π J σ_z σ_z / 2. The coupling convention is pinned by a
//! unit test below.

use crate::molecule::MoleculeSpec;
use crate::{NmrError, Result, HBAR_PEV_S};
use qcore::{bit_of, embed, CMatrix, C64, UnitaryOp};

/// Sign of σ_z on basis bit b: +1 for ground (bit 0), -1 for excited.
#[inline]
fn z_sign(index: usize, spin: usize, n: usize) -> f64 {
    if bit_of(index, spin, n) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal of the drift Hamiltonian divided by ℏ, in rad/s.
pub fn drift_diagonal_angular(m: &MoleculeSpec) -> Vec<f64> {
    let n = m.n_spins();
    let dim = m.dim();
    (0..dim)
        .map(|i| {
            let mut acc = 0.0;
            for k in 0..n {
                acc += m.offset(k) * z_sign(i, k, n) / 2.0;
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    // π J / 4 per ordered pair, two ordered pairs per (k,l).
                    acc += std::f64::consts::PI * m.coupling(k, l) / 2.0
                        * z_sign(i, k, n)
                        * z_sign(i, l, n);
                }
            }
            acc
        })
        .collect()
}

/// Drift Hamiltonian divided by ℏ (rad/s), diagonal in the computational basis.
pub fn drift_angular(m: &MoleculeSpec) -> CMatrix {
    let diag = drift_diagonal_angular(m);
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        diag.len(),
        diag.into_iter().map(|x| C64::new(x, 0.0)),
    ))
}

/// Drift Hamiltonian in energy units (peV).
pub fn drift_hamiltonian(m: &MoleculeSpec) -> CMatrix {
    drift_angular(m).map(|x| x * HBAR_PEV_S)
}

/// Global control generators divided by ℏ: (Σ_k σ_x_k / 2, Σ_k σ_y_k / 2).
pub fn control_generators(n_spins: usize) -> (CMatrix, CMatrix) {
    let dim = 1usize << n_spins;
    let mut hx = CMatrix::zeros(dim, dim);
    let mut hy = CMatrix::zeros(dim, dim);
    for k in 0..n_spins {
        hx += embed(&qcore::sigma_x(), &[k], n_spins).expect("valid target");
        hy += embed(&qcore::sigma_y(), &[k], n_spins).expect("valid target");
    }
    (hx.map(|x| x * 0.5), hy.map(|x| x * 0.5))
}

/// Control Hamiltonian in energy units (peV) for amplitude Ω (rad/s) and
/// phase φ (rad): ℏ Ω Σ_k [cos φ σ_x_k + sin φ σ_y_k] / 2.
pub fn control_hamiltonian(m: &MoleculeSpec, omega_amp: f64, phi: f64) -> Result<CMatrix> {
    if omega_amp < 0.0 {
        return Err(NmrError::InvalidPulse(format!(
            "control amplitude must be ≥ 0, got {omega_amp}"
        )));
    }
    let (hx, hy) = control_generators(m.n_spins());
    let ang = hx.map(|x| x * (omega_amp * phi.cos())) + hy.map(|x| x * (omega_amp * phi.sin()));
    Ok(ang.map(|x| x * HBAR_PEV_S))
}

/// Free evolution exp(-iH₀t/ℏ); diagonal unitary.
pub fn free_evolution(m: &MoleculeSpec, t: f64) -> Result<UnitaryOp> {
    if t < 0.0 {
        return Err(NmrError::NegativeTime(t));
    }
    let diag = drift_diagonal_angular(m);
    let mat = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        diag.len(),
        diag.into_iter().map(|w| C64::new(0.0, -w * t).exp()),
    ));
    Ok(UnitaryOp::new(mat)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcore::max_abs_diff;

    #[test]
    fn on_resonance_single_spin_has_zero_drift() {
        let m = MoleculeSpec::single_spin(0.0);
        assert!(drift_hamiltonian(&m).iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn coupling_convention_two_spins() {
        // Two on-resonance spins, J = 100 Hz: diag(+,-,-,+)·πℏ·100/2.
        let m = MoleculeSpec::new(
            vec![0.0, 0.0],
            0.0,
            &[(0, 1, 100.0)],
            vec![10.0, 10.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        let h = drift_hamiltonian(&m);
        let unit = std::f64::consts::PI * HBAR_PEV_S * 100.0 / 2.0;
        for (i, sign) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            assert!((h[(i, i)].re - sign * unit).abs() < 1e-15);
        }
    }

    #[test]
    fn four_spin_diagonal_matches_bitstring_oracle() {
        let m = MoleculeSpec::synthetic4();
        let h = drift_angular(&m);
        for i in 0..16 {
            // Per-basis-state scalar oracle evaluated from the bitstring.
            let s = |k: usize| if (i >> (3 - k)) & 1 == 0 { 1.0 } else { -1.0 };
            let mut want = 0.0;
            for k in 0..4 {
                want += m.offset(k) * s(k) / 2.0;
            }
            for k in 0..4 {
                for l in 0..4 {
                    if k != l {
                        want += std::f64::consts::PI * m.coupling(k, l) / 4.0 * s(k) * s(l);
                    }
                }
            }
            assert!((h[(i, i)].re - want).abs() < 1e-9);
            for j in 0..16 {
                if i != j {
                    assert_eq!(h[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn control_hamiltonian_cases() {
        let m = MoleculeSpec::single_spin(0.0);
        let zero = control_hamiltonian(&m, 0.0, 1.2).unwrap();
        assert!(zero.iter().all(|x| x.norm() == 0.0));

        let hx = control_hamiltonian(&m, 2.0, 0.0).unwrap();
        let want = qcore::sigma_x().map(|x| x * (HBAR_PEV_S * 1.0));
        assert!(max_abs_diff(&hx, &want) < 1e-15);

        assert!(control_hamiltonian(&m, -1.0, 0.0).is_err());
    }

    #[test]
    fn control_hamiltonian_two_spins_y_phase() {
        let m = MoleculeSpec::new(vec![0.0, 0.0], 0.0, &[], vec![10.0, 10.0], vec![1.0, 1.0]).unwrap();
        let h = control_hamiltonian(&m, 3.0, std::f64::consts::FRAC_PI_2).unwrap();
        let want = (qcore::kron(&qcore::sigma_y(), &qcore::identity(2))
            + qcore::kron(&qcore::identity(2), &qcore::sigma_y()))
        .map(|x| x * (HBAR_PEV_S * 1.5));
        assert!(max_abs_diff(&h, &want) < 1e-12);
    }

    #[test]
    fn free_evolution_properties() {
        let m = MoleculeSpec::synthetic4();
        let u0 = free_evolution(&m, 0.0).unwrap();
        assert!(max_abs_diff(u0.matrix(), &qcore::identity(16)) < 1e-15);
        let u = free_evolution(&m, 0.37).unwrap();
        for i in 0..16 {
            assert!((u.matrix()[(i, i)].norm() - 1.0).abs() < 1e-12);
        }
        assert!(free_evolution(&m, -1.0).is_err());
    }

    #[test]
    fn j_coupling_echo_point() {
        // Two on-resonance spins: the σ_zσ_z term separates aligned and
        // anti-aligned basis states at πJ rad/s, so the relative phase is
        // π/2 at t = 1/(2J) (antiphase point) and π at t = 1/J.
        let j = 50.0;
        let m = MoleculeSpec::new(vec![0.0, 0.0], 0.0, &[(0, 1, j)], vec![10.0, 10.0], vec![1.0, 1.0]).unwrap();
        let phase_between = |t: f64| {
            let u = free_evolution(&m, t).unwrap();
            (u.matrix()[(0, 0)] / u.matrix()[(1, 1)]).arg().abs()
        };
        assert!((phase_between(1.0 / (2.0 * j)) - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((phase_between(1.0 / j) - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn drift_commutes_with_total_z() {
        // Diagonal by construction; magnetization sectors preserved.
        let m = MoleculeSpec::synthetic4();
        let h = drift_angular(&m);
        let sz_total = (0..4).fold(CMatrix::zeros(16, 16), |acc, k| {
            acc + embed(&qcore::sigma_z(), &[k], 4).unwrap()
        });
        let comm = &h * &sz_total - &sz_total * &h;
        assert!(comm.iter().all(|x| x.norm() < 1e-12));
    }
}
