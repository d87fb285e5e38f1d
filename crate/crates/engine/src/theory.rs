//! Closed-form predictions for the ideal cycle, used as oracles against the
//! simulated ledger.
//!
//! With x = ℏω/kT and e = ℏω, the ideal per-step subsystem energies for the
//! standard initial state (W, P ground; M, A excited) are:
//!
//! | step            | W   | P           | M           | A           |
//! |-----------------|-----|-------------|-------------|-------------|
//! | init            | -e  | -e          | +e          | +e          |
//! | thermalization  | -e  | -e·tanh x   | +e          | +e          |
//! | measurement     | -e  | -e·tanh x   | -e·tanh x   | +e          |
//! | feedback        | +e  | -e          | -e·tanh x   | +e          |
//! | erasure         | +e  | -e          | +e          | -e·tanh x   |

use crate::params::EngineParams;
use crate::{EngineError, Result};
use crate::cycle::{CycleConfig, Variant};
use qcore::DensityMatrix;

/// tanh(ℏω/kT); 1 at kT = 0.
fn tanh_x(params: &EngineParams) -> f64 {
    if params.kt() == 0.0 {
        1.0
    } else {
        (params.hbar_omega() / params.kt()).tanh()
    }
}

/// Per-step (W, P, M, A) energies of the ideal cycle, peV. Defined for the
/// thermalizing variants a-c; variant d is constant by construction and has
/// no temperature dependence, so it is rejected.
pub fn theoretical_energy_trace(config: &CycleConfig, params: &EngineParams) -> Result<Vec<[f64; 4]>> {
    if config.variant == Variant::D {
        return Err(EngineError::VariantD);
    }
    let e = params.hbar_omega();
    let t = e * tanh_x(params);
    Ok(vec![
        [-e, -e, e, e],
        [-e, -t, e, e],
        [-e, -t, -t, e],
        [e, -e, -t, e],
        [e, -e, e, -t],
    ])
}

/// Erasure cost 2ℏω·p_ground = ℏω(1 + tanh(ℏω/kT)), peV. Equals the
/// memory's energy drop during measurement; both approach ℏω as kT → ∞ and
/// 2ℏω as kT → 0.
pub fn erasure_cost_closed_form(params: &EngineParams) -> f64 {
    params.gap() * params.ground_population()
}

/// Ideal reduced single-qubit states (W, P, M, A) after each step, for
/// variants a-c. All are diagonal: the gradient dephasing kills every
/// coherence the thermalizing rotation creates, and the remaining gates are
/// permutations in the computational basis.
pub fn theoretical_reduced_states(
    config: &CycleConfig,
    params: &EngineParams,
) -> Result<Vec<[DensityMatrix; 4]>> {
    let trace = theoretical_energy_trace(config, params)?;
    let e = params.hbar_omega();
    let from_energy = |energy: f64| {
        // E = e(1 - 2p_ground)  =>  p_ground = (1 - E/e)/2
        let p = ((1.0 - energy / e) / 2.0).clamp(0.0, 1.0);
        DensityMatrix::from_probabilities(&[p, 1.0 - p]).expect("valid populations")
    };
    Ok(trace
        .into_iter()
        .map(|row| [from_energy(row[0]), from_energy(row[1]), from_energy(row[2]), from_energy(row[3])])
        .collect())
}
