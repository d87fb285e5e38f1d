//! `szilard sweep`: ideal-mode temperature sweep to one combined CSV.

use crate::config::ExperimentConfig;
use crate::{CliError, Result};
use engine::{
    erasure_cost_closed_form, run_cycle, Backend, CycleConfig, EngineParams,
};
use std::path::PathBuf;

pub fn parse_kt_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|_| CliError::Config(format!("kT list: `{part}` is not a number")))?;
        if !(v >= 0.0) {
            return Err(CliError::Config(format!("kT list: kT must be >= 0 peV, got {v}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Config("kT list is empty".into()));
    }
    Ok(out)
}

/// One ideal cycle per temperature; pulse compilation does not depend on kT
/// except through the thermalization angle, so sweeps stay in ideal mode.
pub fn sweep_csv(cfg: &ExperimentConfig, kts: &[f64]) -> Result<String> {
    let mut out = String::from(
        "kT_peV,p_ground,heat_extracted_peV,weight_work_gain_peV,erasure_cost_peV,erasure_closed_form_peV,kT_dS_W_feedback_peV\n",
    );
    let cycle_cfg = CycleConfig::for_variant(cfg.variant);
    for &kt in kts {
        let params = EngineParams::new(cfg.omega, kt)?;
        let run = run_cycle(&cycle_cfg, &params, Backend::Ideal)?;
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            kt,
            params.ground_population(),
            run.ledger.heat_extracted,
            run.ledger.weight_work_gain,
            run.ledger.erasure_cost,
            erasure_cost_closed_form(&params),
            run.ledger.entropy_variation_weight_feedback,
        ));
    }
    Ok(out)
}

pub fn cmd_sweep(cfg: &ExperimentConfig, kt_list: &str) -> Result<()> {
    let kts = parse_kt_list(kt_list)?;
    let csv = sweep_csv(cfg, &kts)?;
    let mut path = PathBuf::from(&cfg.out);
    path.set_extension("csv");
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Internal(format!("mkdir {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(&path, &csv)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
    println!("swept {} temperature(s), variant {} -> {}", kts.len(), cfg.variant.label(), path.display());
    Ok(())
}
