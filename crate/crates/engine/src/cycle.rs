//! The four-step cycle executor and its two backends (ideal gates or
//! compiled pulses propagated through the spin system).

use crate::gates::{build_gate, gz_dephase, GateOp, GateSpec, ControlValue};
use crate::ledger::CycleLedger;
use crate::params::{EngineParams, Subsystem, REGISTER_SIZE};
use crate::{EngineError, Result};
use nmr_sim::{propagate, MoleculeSpec, PulseSequence, Relaxation};
use qcore::{DensityMatrix, UnitaryOp};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The four experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    A,
    B,
    C,
    D,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Variant::A),
            "b" => Ok(Variant::B),
            "c" => Ok(Variant::C),
            "d" => Ok(Variant::D),
            other => Err(format!("unknown variant `{other}` (expected a, b, c or d)")),
        }
    }
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::A => "a",
            Variant::B => "b",
            Variant::C => "c",
            Variant::D => "d",
        }
    }
}

/// Ledger points: the initial state plus the four cycle steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Init,
    Thermalization,
    Measurement,
    Feedback,
    Erasure,
}

impl Step {
    pub const ALL: [Step; 5] = [
        Step::Init,
        Step::Thermalization,
        Step::Measurement,
        Step::Feedback,
        Step::Erasure,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Step::Init => "init",
            Step::Thermalization => "thermalization",
            Step::Measurement => "measurement",
            Step::Feedback => "feedback",
            Step::Erasure => "erasure",
        }
    }
}

/// Initial bits and thermalization flag for a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub variant: Variant,
    /// Initial basis bit per (W, P, M, A); 0 = ground.
    pub initial_bits: [u8; 4],
    pub thermalize: bool,
}

impl CycleConfig {
    /// Variants a-c: W, P ground; M, A excited; thermalization on.
    /// Variant d: everything excited, no thermalization.
    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::A | Variant::B | Variant::C => Self {
                variant,
                initial_bits: [0, 0, 1, 1],
                thermalize: true,
            },
            Variant::D => Self {
                variant,
                initial_bits: [1, 1, 1, 1],
                thermalize: false,
            },
        }
    }
}

/// The compiled-pulse identities of the cycle's five unitary gates.
/// Gz is a channel and is always applied analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleGateId {
    ThermalizeRx,
    MeasureCnot,
    FeedbackCswap,
    FeedbackCrotSwap,
    EraseSwap,
}

impl CycleGateId {
    pub const ALL: [CycleGateId; 5] = [
        CycleGateId::ThermalizeRx,
        CycleGateId::MeasureCnot,
        CycleGateId::FeedbackCswap,
        CycleGateId::FeedbackCrotSwap,
        CycleGateId::EraseSwap,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CycleGateId::ThermalizeRx => "thermalize_rx",
            CycleGateId::MeasureCnot => "measure_cnot",
            CycleGateId::FeedbackCswap => "feedback_cswap",
            CycleGateId::FeedbackCrotSwap => "feedback_crot_swap",
            CycleGateId::EraseSwap => "erase_swap",
        }
    }
}

/// One compiled pulse per cycle gate.
#[derive(Debug, Clone, Default)]
pub struct CyclePulses {
    pulses: BTreeMap<CycleGateId, PulseSequence>,
}

impl CyclePulses {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: CycleGateId, pulse: PulseSequence) {
        self.pulses.insert(id, pulse);
    }

    pub fn get(&self, id: CycleGateId) -> Option<&PulseSequence> {
        self.pulses.get(&id)
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.values().map(|p| p.total_duration()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CycleGateId, &PulseSequence)> {
        self.pulses.iter().map(|(&k, v)| (k, v))
    }
}

/// Execution backend for the cycle.
#[derive(Clone, Copy)]
pub enum Backend<'a> {
    Ideal,
    Pulse {
        molecule: &'a MoleculeSpec,
        pulses: &'a CyclePulses,
        relaxation: Relaxation,
    },
}

/// Gibbs state of the particle at the reservoir temperature (Eq. of state:
/// diagonal with p_ground = 1/(1 + e^(-2ℏω/kT))).
pub fn thermal_state(params: &EngineParams) -> DensityMatrix {
    let p = params.ground_population();
    DensityMatrix::from_probabilities(&[p, 1.0 - p]).expect("valid Gibbs populations")
}

/// Rotation angle α(T) with cos²(α/2) = p_ground, so Rx(α) on a ground-state
/// qubit followed by dephasing lands exactly on the Gibbs state. Monotone in
/// kT, range [0, π/2).
pub fn alpha_for_temperature(params: &EngineParams) -> f64 {
    2.0 * params.ground_population().sqrt().acos()
}

/// Gate specification for each cycle gate on the (W, P, M, A) register.
///
/// Control activation values: the measurement CNOT fires on P = ground, the
/// feedback CSwap on M = excited, the feedback rotation+Swap on M = ground.
pub fn gate_spec(id: CycleGateId, params: &EngineParams) -> GateSpec {
    let w = Subsystem::Weight.index();
    let p = Subsystem::Particle.index();
    let m = Subsystem::Memory.index();
    let a = Subsystem::Ancilla.index();
    match id {
        CycleGateId::ThermalizeRx => GateSpec::Rx {
            theta: alpha_for_temperature(params),
            target: p,
        },
        CycleGateId::MeasureCnot => GateSpec::Cnot {
            control: p,
            target: m,
            activate_on: ControlValue::Ground,
        },
        CycleGateId::FeedbackCswap => GateSpec::Cswap {
            control: m,
            t1: w,
            t2: p,
            activate_on: ControlValue::Excited,
        },
        CycleGateId::FeedbackCrotSwap => GateSpec::CrotSwap {
            control: m,
            t1: w,
            t2: p,
            activate_on: ControlValue::Ground,
        },
        CycleGateId::EraseSwap => GateSpec::Swap { t1: m, t2: a },
    }
}

/// The ideal 16×16 unitary of a cycle gate; also the target handed to the
/// pulse optimizer.
pub fn ideal_gate_unitary(id: CycleGateId, params: &EngineParams) -> UnitaryOp {
    match build_gate(&gate_spec(id, params), REGISTER_SIZE).expect("cycle gates are valid") {
        GateOp::Unitary(u) => u,
        GateOp::Dephase(_) => unreachable!("cycle gates are unitary"),
    }
}

/// A finished cycle: the state after each ledger point plus the ledger.
#[derive(Debug, Clone)]
pub struct CycleRun {
    /// One state per [`Step::ALL`] entry.
    pub states: Vec<DensityMatrix>,
    pub ledger: CycleLedger,
}

impl CycleRun {
    pub fn state_after(&self, step: Step) -> &DensityMatrix {
        let idx = Step::ALL.iter().position(|&s| s == step).expect("known step");
        &self.states[idx]
    }

    /// Reduced state of one subsystem after one step.
    pub fn reduced(&self, step: Step, subsystem: Subsystem) -> DensityMatrix {
        self.state_after(step)
            .partial_trace(&[subsystem.index()])
            .expect("single-qubit reduction is valid")
    }
}

fn apply_gate(
    rho: &DensityMatrix,
    id: CycleGateId,
    params: &EngineParams,
    backend: Backend<'_>,
) -> Result<DensityMatrix> {
    match backend {
        Backend::Ideal => Ok(rho.apply_unitary(&ideal_gate_unitary(id, params))?),
        Backend::Pulse { molecule, pulses, relaxation } => {
            let pulse = pulses.get(id).ok_or(EngineError::MissingPulse(id))?;
            Ok(propagate(rho, molecule, pulse, relaxation)?)
        }
    }
}

/// Execute one full cycle: thermalization (Rx(α) then Gz; skipped for
/// variant d), measurement CNOT, the two feedback gates, and the erasing
/// Swap. States are recorded after every step.
pub fn run_cycle(config: &CycleConfig, params: &EngineParams, backend: Backend<'_>) -> Result<CycleRun> {
    let mut rho = DensityMatrix::basis_state(&config.initial_bits);
    let mut states = vec![rho.clone()];

    // Thermalization.
    if config.thermalize {
        rho = apply_gate(&rho, CycleGateId::ThermalizeRx, params, backend)?;
        rho = gz_dephase(&rho, &[0, 1, 2, 3]);
    }
    states.push(rho.clone());

    // Measurement.
    rho = apply_gate(&rho, CycleGateId::MeasureCnot, params, backend)?;
    states.push(rho.clone());

    // Feedback.
    rho = apply_gate(&rho, CycleGateId::FeedbackCswap, params, backend)?;
    rho = apply_gate(&rho, CycleGateId::FeedbackCrotSwap, params, backend)?;
    states.push(rho.clone());

    // Erasure.
    rho = apply_gate(&rho, CycleGateId::EraseSwap, params, backend)?;
    states.push(rho.clone());

    for state in &states {
        let dev = state.invariant_deviation();
        if dev > 1e-8 {
            return Err(EngineError::InvariantViolation(format!(
                "cycle state violates density-matrix invariants by {dev:.3e}"
            )));
        }
    }

    let ledger = CycleLedger::from_states(&states, params)?;
    Ok(CycleRun { states, ledger })
}
