//! Experiment configuration: TOML file plus same-named flag overrides.

use crate::{CliError, Result};
use engine::Variant;
use metrology::{NoiseParams, Shots};
use nmr_sim::Relaxation;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ideal,
    Pulse,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Mode::Ideal),
            "pulse" => Ok(Mode::Pulse),
            other => Err(format!("unknown mode `{other}` (expected ideal or pulse)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format `{other}` (expected json, csv or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    pub enabled: bool,
    pub n_samples: usize,
    pub amp_jitter: f64,
    pub phase_jitter: f64,
    pub dephase_jitter: f64,
    pub readout_std: f64,
}

impl Default for McConfig {
    /// Disabled by default; noise magnitudes default to the calibration the
    /// selftest pins.
    fn default() -> Self {
        let c = NoiseParams::calibrated();
        Self {
            enabled: false,
            n_samples: 400,
            amp_jitter: c.amp_jitter,
            phase_jitter: c.phase_jitter,
            dephase_jitter: c.dephase_jitter,
            readout_std: c.readout_std,
        }
    }
}

impl McConfig {
    pub fn noise(&self) -> NoiseParams {
        NoiseParams {
            amp_jitter: self.amp_jitter,
            phase_jitter: self.phase_jitter,
            dephase_jitter: self.dephase_jitter,
            readout_std: self.readout_std,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub variant: Variant,
    /// Reservoir temperature k_B·T, peV. Ignored by variant d.
    pub kt: f64,
    /// Level-spacing parameter ω, rad/s.
    pub omega: f64,
    pub mode: Mode,
    pub molecule: Option<PathBuf>,
    /// Directory holding one `<gate>.pulse` file per cycle gate (see
    /// `szilard compile`). Required in pulse mode.
    pub pulses: Option<PathBuf>,
    pub relaxation_on: bool,
    pub shots: Shots,
    pub mc: McConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::A,
            kt: 1.33,
            omega: 2000.0,
            mode: Mode::Ideal,
            molecule: None,
            pulses: None,
            relaxation_on: false,
            shots: Shots::Exact,
            mc: McConfig::default(),
            seed: 7,
            out: PathBuf::from("szilard_out"),
            format: OutputFormat::Both,
        }
    }
}

/// File-level view; every field optional so flags can fill the rest.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    variant: Option<String>,
    #[serde(rename = "kT")]
    kt: Option<f64>,
    omega: Option<f64>,
    mode: Option<String>,
    molecule: Option<PathBuf>,
    pulses: Option<PathBuf>,
    relaxation: Option<String>,
    shots: Option<RawShots>,
    mc: Option<RawMc>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawShots {
    Count(u64),
    Word(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    enabled: Option<bool>,
    n_samples: Option<usize>,
    amp_jitter: Option<f64>,
    phase_jitter: Option<f64>,
    dephase_jitter: Option<f64>,
    readout_std: Option<f64>,
}

pub fn parse_shots(s: &str) -> std::result::Result<Shots, String> {
    if s.eq_ignore_ascii_case("exact") {
        Ok(Shots::Exact)
    } else {
        s.parse::<u64>()
            .map_err(|_| format!("shots must be `exact` or a positive integer, got `{s}`"))
            .and_then(|n| {
                if n == 0 {
                    Err("shots must be > 0".into())
                } else {
                    Ok(Shots::Count(n))
                }
            })
    }
}

/// Flag-level overrides applied on top of the file (or the defaults).
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub kt: Option<f64>,
    pub variant: Option<Variant>,
    pub mode: Option<Mode>,
    pub molecule: Option<PathBuf>,
    pub pulses: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub mc_samples: Option<usize>,
    pub shots: Option<Shots>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let raw: RawConfig = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RawConfig::default(),
        };

        let mut cfg = ExperimentConfig::default();
        if let Some(v) = raw.variant {
            cfg.variant = v.parse().map_err(|e| CliError::Config(format!("variant: {e}")))?;
        }
        if let Some(kt) = raw.kt {
            cfg.kt = kt;
        }
        if let Some(omega) = raw.omega {
            cfg.omega = omega;
        }
        if let Some(m) = raw.mode {
            cfg.mode = m.parse().map_err(|e| CliError::Config(format!("mode: {e}")))?;
        }
        cfg.molecule = raw.molecule.or(cfg.molecule);
        cfg.pulses = raw.pulses.or(cfg.pulses);
        if let Some(r) = raw.relaxation {
            cfg.relaxation_on = match r.to_ascii_lowercase().as_str() {
                "on" => true,
                "off" => false,
                other => {
                    return Err(CliError::Config(format!(
                        "relaxation: expected on or off, got `{other}`"
                    )))
                }
            };
        }
        if let Some(s) = raw.shots {
            cfg.shots = match s {
                RawShots::Count(n) => parse_shots(&n.to_string()).map_err(CliError::Config)?,
                RawShots::Word(w) => parse_shots(&w).map_err(CliError::Config)?,
            };
        }
        if let Some(mc) = raw.mc {
            let d = McConfig::default();
            cfg.mc = McConfig {
                enabled: mc.enabled.unwrap_or(d.enabled),
                n_samples: mc.n_samples.unwrap_or(d.n_samples),
                amp_jitter: mc.amp_jitter.unwrap_or(d.amp_jitter),
                phase_jitter: mc.phase_jitter.unwrap_or(d.phase_jitter),
                dephase_jitter: mc.dephase_jitter.unwrap_or(d.dephase_jitter),
                readout_std: mc.readout_std.unwrap_or(d.readout_std),
            };
        }
        if let Some(s) = raw.seed {
            cfg.seed = s;
        }
        if let Some(o) = raw.out {
            cfg.out = o;
        }
        if let Some(f) = raw.format {
            cfg.format = f.parse().map_err(|e| CliError::Config(format!("format: {e}")))?;
        }

        // Flags win over the file.
        let o = overrides;
        if let Some(kt) = o.kt {
            cfg.kt = kt;
        }
        if let Some(v) = o.variant {
            cfg.variant = v;
        }
        if let Some(m) = o.mode {
            cfg.mode = m;
        }
        if let Some(p) = &o.molecule {
            cfg.molecule = Some(p.clone());
        }
        if let Some(p) = &o.pulses {
            cfg.pulses = Some(p.clone());
        }
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(p) = &o.out {
            cfg.out = p.clone();
        }
        if let Some(f) = o.format {
            cfg.format = f;
        }
        if let Some(n) = o.mc_samples {
            cfg.mc.n_samples = n;
            cfg.mc.enabled = true;
        }
        if let Some(s) = o.shots {
            cfg.shots = s;
        }

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kt >= 0.0) {
            return Err(CliError::Config(format!("kT must be >= 0 peV, got {}", self.kt)));
        }
        if !(self.omega > 0.0) {
            return Err(CliError::Config(format!("omega must be > 0 rad/s, got {}", self.omega)));
        }
        if self.mode == Mode::Pulse && self.molecule.is_none() {
            return Err(CliError::Config("pulse mode requires a molecule file (molecule key or --molecule)".into()));
        }
        if self.mode == Mode::Pulse && self.pulses.is_none() {
            return Err(CliError::Config(
                "pulse mode requires a pulse directory (pulses key or --pulses); run `szilard compile` first".into(),
            ));
        }
        if self.mc.enabled && self.mc.n_samples < 2 {
            return Err(CliError::Config(format!(
                "mc.n_samples must be >= 2, got {}",
                self.mc.n_samples
            )));
        }
        for (name, v) in [
            ("mc.amp_jitter", self.mc.amp_jitter),
            ("mc.phase_jitter", self.mc.phase_jitter),
            ("mc.dephase_jitter", self.mc.dephase_jitter),
            ("mc.readout_std", self.mc.readout_std),
        ] {
            if !(v >= 0.0) {
                return Err(CliError::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn relaxation(&self) -> Relaxation {
        if self.relaxation_on {
            Relaxation::On
        } else {
            Relaxation::Off
        }
    }
}
