//! Per-step, per-subsystem energy/entropy bookkeeping and the derived
//! heat/work/erasure quantities.

use crate::cycle::Step;
use crate::params::{EngineParams, Subsystem};
use crate::{EngineError, Result};
use qcore::{von_neumann_entropy, CMatrix, DensityMatrix};
use serde::{Deserialize, Serialize};

/// Single-qubit Hamiltonian diag(-ℏω, +ℏω) in peV.
pub fn qubit_hamiltonian(params: &EngineParams) -> CMatrix {
    params.qubit_hamiltonian()
}

/// Mean energy Tr[ρ H] of a single-qubit state, peV.
pub fn qubit_energy(rho_q: &DensityMatrix, params: &EngineParams) -> f64 {
    rho_q
        .expectation(&qubit_hamiltonian(params))
        .expect("2x2 observable matches single-qubit state")
}

/// Energies (peV) and entropies (nats) of (W, P, M, A) after one step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: Step,
    pub energy: [f64; 4],
    pub entropy: [f64; 4],
}

/// The thermodynamic ledger of one cycle.
///
/// Sign conventions: `heat_extracted` is the particle's energy gain during
/// thermalization; `weight_work_gain` the weight's energy gain during
/// feedback; `measurement_memory_drop` the memory's energy *loss* during
/// measurement; `erasure_cost` the memory's energy gain during erasure.
/// `entropy_variation_weight_feedback` is kT·ΔS_W over feedback, in peV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleLedger {
    pub steps: Vec<StepRecord>,
    pub heat_extracted: f64,
    pub weight_work_gain: f64,
    pub measurement_memory_drop: f64,
    pub erasure_cost: f64,
    pub weight_entropy_change_feedback_nats: f64,
    pub entropy_variation_weight_feedback: f64,
}

impl CycleLedger {
    /// Build the ledger from the five recorded states (one per [`Step::ALL`]).
    pub fn from_states(states: &[DensityMatrix], params: &EngineParams) -> Result<Self> {
        if states.len() != Step::ALL.len() {
            return Err(EngineError::InvariantViolation(format!(
                "ledger needs {} states, got {}",
                Step::ALL.len(),
                states.len()
            )));
        }
        let mut steps = Vec::with_capacity(states.len());
        for (&step, state) in Step::ALL.iter().zip(states) {
            let mut energy = [0.0; 4];
            let mut entropy = [0.0; 4];
            for sub in Subsystem::ALL {
                let reduced = state.partial_trace(&[sub.index()])?;
                energy[sub.index()] = qubit_energy(&reduced, params);
                entropy[sub.index()] = von_neumann_entropy(&reduced);
            }
            steps.push(StepRecord { step, energy, entropy });
        }

        let e = |step: Step, sub: Subsystem| steps[step_index(step)].energy[sub.index()];
        let s = |step: Step, sub: Subsystem| steps[step_index(step)].entropy[sub.index()];

        let heat_extracted = e(Step::Thermalization, Subsystem::Particle) - e(Step::Init, Subsystem::Particle);
        let weight_work_gain = e(Step::Feedback, Subsystem::Weight) - e(Step::Measurement, Subsystem::Weight);
        let measurement_memory_drop =
            e(Step::Thermalization, Subsystem::Memory) - e(Step::Measurement, Subsystem::Memory);
        let erasure_cost = e(Step::Erasure, Subsystem::Memory) - e(Step::Feedback, Subsystem::Memory);
        let weight_entropy_change_feedback_nats =
            s(Step::Feedback, Subsystem::Weight) - s(Step::Measurement, Subsystem::Weight);
        let entropy_variation_weight_feedback = params.kt() * weight_entropy_change_feedback_nats;

        Ok(Self {
            steps,
            heat_extracted,
            weight_work_gain,
            measurement_memory_drop,
            erasure_cost,
            weight_entropy_change_feedback_nats,
            entropy_variation_weight_feedback,
        })
    }

    pub fn record(&self, step: Step) -> &StepRecord {
        &self.steps[step_index(step)]
    }

    pub fn energy(&self, step: Step, subsystem: Subsystem) -> f64 {
        self.record(step).energy[subsystem.index()]
    }

    pub fn entropy(&self, step: Step, subsystem: Subsystem) -> f64 {
        self.record(step).entropy[subsystem.index()]
    }
}

fn step_index(step: Step) -> usize {
    Step::ALL.iter().position(|&s| s == step).expect("known step")
}
