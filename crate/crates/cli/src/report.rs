//! Run report assembly and the JSON/CSV writers.

use crate::config::{ExperimentConfig, Mode};
use crate::{CliError, Result};
use engine::{
    run_cycle, theoretical_energy_trace, Backend, CycleConfig, CycleLedger, CyclePulses,
    EngineParams, Step, Subsystem,
};
use metrology::{
    energy_label, energy_of, monte_carlo_errorbars, tomograph_qubit, McExperiment, McMode,
    WEIGHT_FEEDBACK_LABEL,
};
use nmr_sim::MoleculeSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub step: String,
    pub subsystem: String,
    pub energy_pev: f64,
    pub theory_pev: f64,
    pub errbar_pev: f64,
    /// Uhlmann fidelity of the tomographic reconstruction against the
    /// executor's exact reduced state; 1 for exact readout.
    pub tomography_fidelity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McSummary {
    pub n_samples: usize,
    pub amp_jitter: f64,
    pub phase_jitter: f64,
    pub dephase_jitter: f64,
    pub readout_std: f64,
    /// Error bar on kT·ΔS_W over feedback, peV.
    pub kt_ds_feedback_errbar_pev: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Weight energy gain over feedback next to the lifting quantum it
    /// should match.
    pub weight_work_gain_pev: f64,
    pub two_hbar_omega_pev: f64,
    /// Erasure cost from the ledger and its closed form 2ℏω·p_ground.
    pub erasure_cost_pev: f64,
    pub erasure_closed_form_pev: f64,
    pub ledger: CycleLedger,
    pub rows: Vec<ReportRow>,
    pub mc: Option<McSummary>,
    /// Wall-clock time of the run; the only non-deterministic field.
    pub wall_ms: u64,
}

/// Loaded pulse-mode assets, kept alive for the duration of a run.
pub struct PulseAssets {
    pub molecule: MoleculeSpec,
    pub pulses: CyclePulses,
}

pub fn load_pulse_assets(cfg: &ExperimentConfig) -> Result<Option<PulseAssets>> {
    if cfg.mode != Mode::Pulse {
        return Ok(None);
    }
    let mol_path = cfg.molecule.as_ref().expect("validated");
    let dir = cfg.pulses.as_ref().expect("validated");
    let molecule = MoleculeSpec::from_file(mol_path)?;
    let mut pulses = CyclePulses::new();
    for id in engine::CycleGateId::ALL {
        let path = dir.join(format!("{}.pulse", id.label()));
        let pulse = nmr_sim::PulseSequence::from_file(&path).map_err(|e| {
            CliError::Config(format!("pulses: cannot load {}: {e}", path.display()))
        })?;
        pulses.insert(id, pulse);
    }
    Ok(Some(PulseAssets { molecule, pulses }))
}

/// Execute the configured cycle and assemble the full report.
pub fn build_run_report(cfg: &ExperimentConfig, assets: Option<&PulseAssets>) -> Result<RunReport> {
    let t0 = std::time::Instant::now();
    let params = EngineParams::new(cfg.omega, cfg.kt)?;
    let cycle_cfg = CycleConfig::for_variant(cfg.variant);
    let backend = match assets {
        None => Backend::Ideal,
        Some(a) => Backend::Pulse {
            molecule: &a.molecule,
            pulses: &a.pulses,
            relaxation: cfg.relaxation(),
        },
    };
    let run = run_cycle(&cycle_cfg, &params, backend)?;

    let theory: Vec<[f64; 4]> = match theoretical_energy_trace(&cycle_cfg, &params) {
        Ok(t) => t,
        // Variant d never thermalizes: every subsystem stays excited at +ℏω.
        Err(engine::EngineError::VariantD) => {
            vec![[params.hbar_omega(); 4]; Step::ALL.len()]
        }
        Err(e) => return Err(e.into()),
    };

    let errbars = mc_errbars(cfg, assets, &params, &cycle_cfg)?;

    let mut rows = Vec::new();
    for (si, &step) in Step::ALL.iter().enumerate() {
        for sub in Subsystem::ALL {
            // One readout seed per (step, qubit) cell.
            let cell = (si * Subsystem::ALL.len() + sub.index()) as u64;
            let seed = cfg.seed ^ cell.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let tomo = tomograph_qubit(run.state_after(step), sub.index(), cfg.shots, seed)?;
            let energy = energy_of(&tomo.state, &params)?;
            let tomography_fidelity = qcore::fidelity(&tomo.state, &run.reduced(step, sub))?;
            let errbar = errbars
                .as_ref()
                .map(|m| m.0[&energy_label(step, sub)])
                .unwrap_or(0.0);
            rows.push(ReportRow {
                step: step.label().to_string(),
                subsystem: sub.label().to_string(),
                energy_pev: energy,
                theory_pev: theory[si][sub.index()],
                errbar_pev: errbar,
                tomography_fidelity,
            });
        }
    }

    let mc = errbars.map(|(_, summary)| summary);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        weight_work_gain_pev: run.ledger.weight_work_gain,
        two_hbar_omega_pev: params.gap(),
        erasure_cost_pev: run.ledger.erasure_cost,
        erasure_closed_form_pev: engine::erasure_cost_closed_form(&params),
        ledger: run.ledger,
        rows,
        mc,
        wall_ms: t0.elapsed().as_millis() as u64,
    })
}

type ErrbarMap = BTreeMap<String, f64>;

fn mc_errbars(
    cfg: &ExperimentConfig,
    assets: Option<&PulseAssets>,
    params: &EngineParams,
    cycle_cfg: &CycleConfig,
) -> Result<Option<(ErrbarMap, McSummary)>> {
    if !cfg.mc.enabled {
        return Ok(None);
    }
    let mode = match assets {
        None => McMode::Ideal,
        Some(a) => McMode::Pulse {
            molecule: &a.molecule,
            pulses: &a.pulses,
            relaxation: cfg.relaxation(),
        },
    };
    let exp = McExperiment { config: *cycle_cfg, params: *params, mode };
    let noise = cfg.mc.noise();
    let reports = monte_carlo_errorbars(&exp, &noise, cfg.mc.n_samples, cfg.seed)?;
    let map: ErrbarMap = reports.iter().map(|r| (r.label.clone(), r.std)).collect();
    let kt_ds = map.get(WEIGHT_FEEDBACK_LABEL).copied().unwrap_or(0.0);
    let summary = McSummary {
        n_samples: cfg.mc.n_samples,
        amp_jitter: noise.amp_jitter,
        phase_jitter: noise.phase_jitter,
        dephase_jitter: noise.dephase_jitter,
        readout_std: noise.readout_std,
        kt_ds_feedback_errbar_pev: kt_ds,
    };
    Ok(Some((map, summary)))
}

pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::from("step,subsystem,energy_peV,theory_peV,errbar_peV\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6}\n",
            r.step, r.subsystem, r.energy_pev, r.theory_pev, r.errbar_pev
        ));
    }
    out
}
