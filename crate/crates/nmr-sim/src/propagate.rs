//! Piecewise-constant propagation of a density matrix under drift +
//! control, with optional per-segment relaxation.

use crate::hamiltonian::{control_generators, drift_angular};
use crate::molecule::MoleculeSpec;
use crate::pulse::PulseSequence;
use crate::relax::apply_relaxation;
use crate::{NmrError, Result};
use qcore::{unitary_exp, CMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relaxation {
    Off,
    On,
}

/// Hamiltonian of one segment divided by ℏ, rad/s.
pub fn segment_hamiltonian_angular(
    drift: &CMatrix,
    hx: &CMatrix,
    hy: &CMatrix,
    amplitude: f64,
    phase: f64,
) -> CMatrix {
    drift
        + hx.map(|x| x * (amplitude * phase.cos()))
        + hy.map(|x| x * (amplitude * phase.sin()))
}

/// Unitary implemented by a whole pulse (relaxation-free), U = Π exp(-iH_jΔt).
pub fn pulse_unitary(molecule: &MoleculeSpec, pulse: &PulseSequence) -> Result<CMatrix> {
    let drift = drift_angular(molecule);
    let (hx, hy) = control_generators(molecule.n_spins());
    let dt = pulse.segment_duration();
    let mut u = qcore::identity(molecule.dim());
    for seg in pulse.segments() {
        let h = segment_hamiltonian_angular(&drift, &hx, &hy, seg.amplitude, seg.phase);
        u = unitary_exp(&h, dt)? * u;
    }
    Ok(u)
}

/// Evolve `rho` through the pulse. With relaxation on, every segment's
/// unitary slice is followed by a T1/T2 relaxation slice of the same length.
pub fn propagate(
    rho: &DensityMatrix,
    molecule: &MoleculeSpec,
    pulse: &PulseSequence,
    relaxation: Relaxation,
) -> Result<DensityMatrix> {
    if rho.n_qubits() != molecule.n_spins() {
        return Err(NmrError::DimensionMismatch {
            state_qubits: rho.n_qubits(),
            spins: molecule.n_spins(),
        });
    }
    let drift = drift_angular(molecule);
    let (hx, hy) = control_generators(molecule.n_spins());
    let dt = pulse.segment_duration();
    let mut mat = rho.matrix().clone();
    for seg in pulse.segments() {
        let h = segment_hamiltonian_angular(&drift, &hx, &hy, seg.amplitude, seg.phase);
        let u = unitary_exp(&h, dt)?;
        mat = &u * mat * u.adjoint();
        if relaxation == Relaxation::On {
            mat = apply_relaxation(&mat, molecule, dt);
        }
    }
    Ok(DensityMatrix::new(mat)?)
}
