//! Error bars by rerunning the cycle under randomized imperfections:
//! gate over/under-rotation and axis tilt (ideal mode) or pulse
//! amplitude/phase jitter (pulse mode), gradient-strength jitter, and
//! additive readout noise on the measured magnetizations.

use crate::tomography::project_to_state;
use crate::{MetrologyError, Result};
use engine::{
    controlled, gz_dephase_partial, ideal_gate_unitary, partial_involution, rotation_axis,
    swap_matrix, ControlValue, CycleConfig, CycleGateId, CycleLedger, CyclePulses, EngineParams,
    Step, Subsystem,
};
use nmr_sim::{propagate, MoleculeSpec, PulseSegment, PulseSequence, Relaxation};
use qcore::{sigma_x, sigma_y, sigma_z, von_neumann_entropy, DensityMatrix, UnitaryOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Noise magnitudes for one Monte Carlo study. All jitters are Gaussian
/// standard deviations: fractional for amplitudes and the gradient
/// strength, radians for phases, dimensionless Bloch units for readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub amp_jitter: f64,
    pub phase_jitter: f64,
    pub dephase_jitter: f64,
    pub readout_std: f64,
}

impl NoiseParams {
    pub fn zero() -> Self {
        Self { amp_jitter: 0.0, phase_jitter: 0.0, dephase_jitter: 0.0, readout_std: 0.0 }
    }

    /// Calibration at which the energy bars come out at ~0.1 peV: 1% gate
    /// amplitude jitter, 10 mrad phase jitter, 1% gradient jitter, and
    /// readout noise of 0.09 on each Bloch component. A mixed-state energy
    /// readout then carries 0.09·ℏω ≈ 0.118 peV of noise; near pure states
    /// the Bloch-ball projection shrinks that to ~0.06 peV, so every bar
    /// sits at 0.1 ± 0.05 peV.
    pub fn calibrated() -> Self {
        Self { amp_jitter: 0.01, phase_jitter: 0.01, dephase_jitter: 0.01, readout_std: 0.09 }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("amp_jitter", self.amp_jitter),
            ("phase_jitter", self.phase_jitter),
            ("dephase_jitter", self.dephase_jitter),
            ("readout_std", self.readout_std),
        ] {
            if !(v >= 0.0) {
                return Err(MetrologyError::InvalidArgument(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// How each Monte Carlo sample executes the cycle.
#[derive(Clone, Copy)]
pub enum McMode<'a> {
    Ideal,
    Pulse {
        molecule: &'a MoleculeSpec,
        pulses: &'a CyclePulses,
        relaxation: Relaxation,
    },
}

pub struct McExperiment<'a> {
    pub config: CycleConfig,
    pub params: EngineParams,
    pub mode: McMode<'a>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBarReport {
    pub label: String,
    pub mean: f64,
    pub std: f64,
    pub n_samples: usize,
    pub noise: NoiseParams,
}

pub fn energy_label(step: Step, subsystem: Subsystem) -> String {
    format!("energy:{}:{}", step.label(), subsystem.label())
}

pub const WEIGHT_FEEDBACK_LABEL: &str = "kT_dS:feedback:W";

/// One draw of gate imperfections: (over-rotation fraction, axis/phase tilt)
/// per cycle gate, plus the gradient strength.
struct SampleJitter {
    gates: [(f64, f64); 5],
    dephase_strength: f64,
}

fn draw_jitter(noise: &NoiseParams, rng: &mut ChaCha8Rng) -> SampleJitter {
    let amp = Normal::new(0.0, noise.amp_jitter.max(1e-300)).unwrap();
    let ph = Normal::new(0.0, noise.phase_jitter.max(1e-300)).unwrap();
    let gz = Normal::new(0.0, noise.dephase_jitter.max(1e-300)).unwrap();
    let mut gates = [(0.0, 0.0); 5];
    for g in &mut gates {
        *g = (
            if noise.amp_jitter > 0.0 { amp.sample(rng) } else { 0.0 },
            if noise.phase_jitter > 0.0 { ph.sample(rng) } else { 0.0 },
        );
    }
    let eps = if noise.dephase_jitter > 0.0 { gz.sample(rng) } else { 0.0 };
    SampleJitter { gates, dephase_strength: (1.0 - eps.abs()).clamp(0.0, 1.0) }
}

/// Ideal-mode imperfect gate: rotations get a scaled angle and tilted axis,
/// the involution-type gates (CNOT, CSwap, Swap) an over/under-rotation of
/// their conditional flip, and the feedback rotation+swap a jittered Rx(π).
fn jittered_ideal_gate(
    id: CycleGateId,
    params: &EngineParams,
    eps: f64,
    tilt: f64,
) -> Result<UnitaryOp> {
    let u = match id {
        CycleGateId::ThermalizeRx => {
            let alpha = engine::alpha_for_temperature(params) * (1.0 + eps);
            let rot = UnitaryOp::new(rotation_axis(alpha, tilt))?;
            rot.embed_into(&[Subsystem::Particle.index()], engine::REGISTER_SIZE)?
        }
        CycleGateId::FeedbackCrotSwap => {
            let rot = rotation_axis(PI * (1.0 + eps), tilt);
            let op = swap_matrix() * qcore::kron(&qcore::identity(2), &rot);
            let mat = controlled(
                Subsystem::Memory.index(),
                ControlValue::Ground,
                &op,
                &[Subsystem::Weight.index(), Subsystem::Particle.index()],
                engine::REGISTER_SIZE,
            )?;
            UnitaryOp::new(mat)?
        }
        _ => {
            let g = ideal_gate_unitary(id, params);
            UnitaryOp::new(partial_involution(g.matrix(), PI * (1.0 + eps)))?
        }
    };
    Ok(u)
}

fn jittered_pulse(pulse: &PulseSequence, eps: f64, tilt: f64) -> Result<PulseSequence> {
    let segments = pulse
        .segments()
        .iter()
        .map(|s| PulseSegment { amplitude: s.amplitude * (1.0 + eps), phase: s.phase + tilt })
        .collect();
    Ok(PulseSequence::new(pulse.segment_duration(), segments)?)
}

/// One imperfect cycle; mirrors the executor's step order, with the jitter
/// injected per gate and into the gradient strength.
fn run_jittered_cycle(
    exp: &McExperiment<'_>,
    jit: &SampleJitter,
) -> Result<Vec<DensityMatrix>> {
    let gate_idx = |id: CycleGateId| CycleGateId::ALL.iter().position(|&g| g == id).unwrap();
    let apply = |rho: &DensityMatrix, id: CycleGateId| -> Result<DensityMatrix> {
        let (eps, tilt) = jit.gates[gate_idx(id)];
        match exp.mode {
            McMode::Ideal => {
                let u = jittered_ideal_gate(id, &exp.params, eps, tilt)?;
                Ok(rho.apply_unitary(&u)?)
            }
            McMode::Pulse { molecule, pulses, relaxation } => {
                let pulse = pulses
                    .get(id)
                    .ok_or(engine::EngineError::MissingPulse(id))?;
                let noisy = jittered_pulse(pulse, eps, tilt)?;
                Ok(propagate(rho, molecule, &noisy, relaxation)?)
            }
        }
    };

    let mut rho = DensityMatrix::basis_state(&exp.config.initial_bits);
    let mut states = vec![rho.clone()];
    if exp.config.thermalize {
        rho = apply(&rho, CycleGateId::ThermalizeRx)?;
        rho = gz_dephase_partial(&rho, &[0, 1, 2, 3], jit.dephase_strength);
    }
    states.push(rho.clone());
    rho = apply(&rho, CycleGateId::MeasureCnot)?;
    states.push(rho.clone());
    rho = apply(&rho, CycleGateId::FeedbackCswap)?;
    rho = apply(&rho, CycleGateId::FeedbackCrotSwap)?;
    states.push(rho.clone());
    rho = apply(&rho, CycleGateId::EraseSwap)?;
    states.push(rho.clone());
    Ok(states)
}

/// Readout of one qubit with additive Gaussian noise on each Bloch
/// component, projected back to a physical state.
fn noisy_readout(
    state: &DensityMatrix,
    q: usize,
    readout_std: f64,
    rng: &mut ChaCha8Rng,
) -> Result<DensityMatrix> {
    let mut r = [
        state.expectation_on(&sigma_x(), q)?,
        state.expectation_on(&sigma_y(), q)?,
        state.expectation_on(&sigma_z(), q)?,
    ];
    if readout_std > 0.0 {
        let n = Normal::new(0.0, readout_std).unwrap();
        for c in &mut r {
            *c += n.sample(rng);
        }
    }
    let mut m = qcore::identity(2).map(|x| x * 0.5);
    m += sigma_x().map(|x| x * (0.5 * r[0]));
    m += sigma_y().map(|x| x * (0.5 * r[1]));
    m += sigma_z().map(|x| x * (0.5 * r[2]));
    project_to_state(&m)
}

/// Rerun the cycle `n_samples` times under the noise model and report the
/// mean and standard deviation of every per-step, per-subsystem energy plus
/// the weight's kT·ΔS over feedback. Deterministic given the seed: sample i
/// uses a counter-derived generator, so execution order cannot matter.
pub fn monte_carlo_errorbars(
    exp: &McExperiment<'_>,
    noise: &NoiseParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<ErrorBarReport>> {
    noise.validate()?;
    if n_samples < 2 {
        return Err(MetrologyError::InvalidArgument(format!(
            "n_samples must be >= 2, got {n_samples}"
        )));
    }

    let n_quantities = Step::ALL.len() * Subsystem::ALL.len() + 1;
    let mut samples = vec![Vec::with_capacity(n_samples); n_quantities];

    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let jit = draw_jitter(noise, &mut rng);
        let states = run_jittered_cycle(exp, &jit)?;

        let mut values = Vec::with_capacity(n_quantities);
        let mut weight_entropy = [0.0; 2];
        for (si, state) in states.iter().enumerate() {
            for sub in Subsystem::ALL {
                let read = noisy_readout(state, sub.index(), noise.readout_std, &mut rng)?;
                values.push(engine::qubit_energy(&read, &exp.params));
                if sub == Subsystem::Weight && si == 2 {
                    weight_entropy[0] = von_neumann_entropy(&read);
                }
                if sub == Subsystem::Weight && si == 3 {
                    weight_entropy[1] = von_neumann_entropy(&read);
                }
            }
        }
        values.push(exp.params.kt() * (weight_entropy[1] - weight_entropy[0]));

        for (k, v) in values.iter().enumerate() {
            samples[k].push(*v);
        }
    }

    let mut labels: Vec<String> = Vec::with_capacity(n_quantities);
    for step in Step::ALL {
        for sub in Subsystem::ALL {
            labels.push(energy_label(step, sub));
        }
    }
    labels.push(WEIGHT_FEEDBACK_LABEL.to_string());

    let n = n_samples as f64;
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(k, label)| {
            // Shifted mean: exact (and a zero std) when every sample agrees.
            let base = samples[k][0];
            let mean = base + samples[k].iter().map(|v| v - base).sum::<f64>() / n;
            let var = samples[k].iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            ErrorBarReport { label, mean, std: var.sqrt(), n_samples, noise: *noise }
        })
        .collect())
}

/// Ledger of one noiseless rerun, for printing mean curves next to bars.
pub fn noiseless_ledger(exp: &McExperiment<'_>) -> Result<CycleLedger> {
    let jit = SampleJitter { gates: [(0.0, 0.0); 5], dephase_strength: 1.0 };
    let states = run_jittered_cycle(exp, &jit)?;
    Ok(CycleLedger::from_states(&states, &exp.params)?)
}
