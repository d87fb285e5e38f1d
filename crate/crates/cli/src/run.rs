//! `szilard run`: one cycle, report to JSON/CSV.

use crate::config::{ExperimentConfig, OutputFormat};
use crate::report::{build_run_report, load_pulse_assets, report_csv, report_json};
use crate::{CliError, Result};
use std::path::PathBuf;

fn with_extension(base: &PathBuf, ext: &str) -> PathBuf {
    let mut p = base.clone();
    p.set_extension(ext);
    p
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Internal(format!("mkdir {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))
}

pub fn cmd_run(cfg: &ExperimentConfig) -> Result<()> {
    let assets = load_pulse_assets(cfg)?;
    let report = build_run_report(cfg, assets.as_ref())?;

    if matches!(cfg.format, OutputFormat::Json | OutputFormat::Both) {
        write(&with_extension(&cfg.out, "json"), &report_json(&report))?;
    }
    if matches!(cfg.format, OutputFormat::Csv | OutputFormat::Both) {
        write(&with_extension(&cfg.out, "csv"), &report_csv(&report))?;
    }

    println!(
        "variant {} kT={} peV: weight gain over feedback = {:.6} peV (2ℏω = {:.6} peV)",
        cfg.variant.label(),
        cfg.kt,
        report.weight_work_gain_pev,
        report.two_hbar_omega_pev
    );
    println!(
        "heat extracted {:.6} peV, erasure cost {:.6} peV, kT·ΔS_W(feedback) {:.6} peV",
        report.ledger.heat_extracted,
        report.ledger.erasure_cost,
        report.ledger.entropy_variation_weight_feedback
    );
    Ok(())
}
