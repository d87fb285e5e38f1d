//! The four-qubit information-fuelled Szilard engine.
//!
//! The register is (W, P, M, A) = (weight, particle, memory, ancilla) on
//! qubits 0..4, qubit 0 most significant. One cycle is: thermalization of
//! the particle (rotation + gradient dephasing), a CNOT measurement copying
//! the particle state into the memory, a conditioned feedback pair that
//! deterministically excites the weight, and a memory/ancilla swap that
//! erases the measurement record. The ledger records per-step, per-subsystem
//! energies and entropies and the derived heat/work/erasure quantities.

pub mod cycle;
pub mod gates;
pub mod ledger;
pub mod params;
pub mod theory;

pub use cycle::{
    alpha_for_temperature, ideal_gate_unitary, run_cycle, thermal_state, Backend, CycleConfig,
    CycleGateId, CyclePulses, CycleRun, Step, Variant,
};
pub use gates::{build_gate, controlled, gz_dephase, gz_dephase_partial, partial_involution, rotation_axis, swap_matrix, ControlValue, GateOp, GateSpec};
pub use ledger::{qubit_energy, qubit_hamiltonian, CycleLedger, StepRecord};
pub use params::{EngineParams, Subsystem, HBAR_PEV_S, REGISTER_SIZE};
pub use theory::{erasure_cost_closed_form, theoretical_energy_trace, theoretical_reduced_states};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid engine parameters: {0}")]
    InvalidParams(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("pulse backend is missing a compiled pulse for {0:?}")]
    MissingPulse(cycle::CycleGateId),
    #[error("theoretical trace is undefined for variant d (constant by construction)")]
    VariantD,
    #[error("internal invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Nmr(#[from] nmr_sim::NmrError),
    #[error(transparent)]
    Core(#[from] qcore::QcoreError),
}

pub type Result<T> = std::result::Result<T, EngineError>;
