//! Molecule description: spin frequencies, J couplings, relaxation times,
//! and the config-file parser.

use crate::{NmrError, Result};
use serde::Deserialize;
use std::path::Path;

/// Whether the configured frequencies are already offsets from the rotating
/// frame or absolute (lab/spectrometer) frequencies. The config must declare
/// which form it supplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyForm {
    Offset,
    Lab,
}

/// Immutable spin-system description.
///
/// Offsets are stored relative to the rotating frame, in rad/s. Couplings are
/// a full symmetric matrix in Hz with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec {
    n_spins: usize,
    offsets: Vec<f64>,
    rotating_frame: f64,
    couplings: Vec<Vec<f64>>,
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl MoleculeSpec {
    /// Build from rotating-frame offsets (rad/s) and an upper-triangular
    /// coupling list `(k, n, J_Hz)` with k < n.
    pub fn new(
        offsets_rad: Vec<f64>,
        rotating_frame: f64,
        coupling_pairs: &[(usize, usize, f64)],
        t1: Vec<f64>,
        t2: Vec<f64>,
    ) -> Result<Self> {
        let n = offsets_rad.len();
        if n == 0 {
            return Err(NmrError::InvalidMolecule("n_spins must be ≥ 1".into()));
        }
        if t1.len() != n || t2.len() != n {
            return Err(NmrError::InvalidMolecule(format!(
                "t1/t2 must list {n} entries (got {}/{})",
                t1.len(),
                t2.len()
            )));
        }
        for k in 0..n {
            if t1[k] <= 0.0 || t2[k] <= 0.0 {
                return Err(NmrError::InvalidMolecule(format!(
                    "relaxation times must be positive (spin {k}: t1={}, t2={})",
                    t1[k], t2[k]
                )));
            }
            if t2[k] > 2.0 * t1[k] + 1e-12 {
                return Err(NmrError::InvalidMolecule(format!(
                    "t2 must satisfy t2 ≤ 2·t1 (spin {k}: t1={}, t2={})",
                    t1[k], t2[k]
                )));
            }
        }
        let mut couplings = vec![vec![0.0; n]; n];
        for &(k, m, j) in coupling_pairs {
            if k >= n || m >= n {
                return Err(NmrError::InvalidMolecule(format!(
                    "coupling ({k},{m}) out of range for {n} spins"
                )));
            }
            if k == m {
                return Err(NmrError::InvalidMolecule(format!(
                    "coupling ({k},{k}) on the diagonal is not allowed"
                )));
            }
            let (a, b) = (k.min(m), k.max(m));
            if couplings[a][b] != 0.0 && couplings[a][b] != j {
                return Err(NmrError::InvalidMolecule(format!(
                    "asymmetric coupling for pair ({a},{b}): {} vs {}",
                    couplings[a][b], j
                )));
            }
            couplings[a][b] = j;
            couplings[b][a] = j;
        }
        Ok(Self {
            n_spins: n,
            offsets: offsets_rad,
            rotating_frame,
            couplings,
            t1,
            t2,
        })
    }

    /// Resolve lab-frame frequencies against a rotating frame. When the
    /// frame is not given it defaults to the midpoint of the first and last
    /// spin frequencies.
    pub fn from_lab_frequencies(
        frequencies_rad: Vec<f64>,
        rotating_frame: Option<f64>,
        coupling_pairs: &[(usize, usize, f64)],
        t1: Vec<f64>,
        t2: Vec<f64>,
    ) -> Result<Self> {
        if frequencies_rad.is_empty() {
            return Err(NmrError::InvalidMolecule("n_spins must be ≥ 1".into()));
        }
        let frame = rotating_frame
            .unwrap_or((frequencies_rad[0] + frequencies_rad[frequencies_rad.len() - 1]) / 2.0);
        let offsets = frequencies_rad.iter().map(|w| w - frame).collect();
        Self::new(offsets, frame, coupling_pairs, t1, t2)
    }

    /// Self-contained synthetic four-spin system used by the tests and the
    /// shipped example configs: distinct offsets spanning ±2 kHz and
    /// couplings between 7 and 70 Hz, with T1 = 10 s and T2 = 1 s. The
    /// couplings used by the cycle gates sit at the top of that band so the
    /// compiled gates stay short against T2.
    pub fn synthetic4() -> Self {
        let tau = std::f64::consts::TAU;
        Self::new(
            vec![-2000.0 * tau, -700.0 * tau, 700.0 * tau, 2000.0 * tau],
            0.0,
            &[
                (0, 1, 65.0),
                (0, 2, 55.0),
                (0, 3, 7.0),
                (1, 2, 70.0),
                (1, 3, 12.0),
                (2, 3, 70.0),
            ],
            vec![10.0; 4],
            vec![1.0; 4],
        )
        .expect("synthetic molecule is valid")
    }

    /// Single spin on resonance, handy for tests.
    pub fn single_spin(offset_rad: f64) -> Self {
        Self::new(vec![offset_rad], 0.0, &[], vec![10.0], vec![1.0]).expect("valid")
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_spins
    }

    /// Offset of spin k from the rotating frame, rad/s.
    pub fn offset(&self, k: usize) -> f64 {
        self.offsets[k]
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn rotating_frame(&self) -> f64 {
        self.rotating_frame
    }

    /// J coupling of spins k and n in Hz (symmetric, zero diagonal).
    pub fn coupling(&self, k: usize, n: usize) -> f64 {
        self.couplings[k][n]
    }

    pub fn t1(&self, k: usize) -> f64 {
        self.t1[k]
    }

    pub fn t2(&self, k: usize) -> f64 {
        self.t2[k]
    }

    /// Smallest nonzero coupling among the given spins, Hz.
    pub fn min_coupling_among(&self, spins: &[usize]) -> Option<f64> {
        let mut min: Option<f64> = None;
        for (i, &a) in spins.iter().enumerate() {
            for &b in &spins[i + 1..] {
                let j = self.coupling(a, b).abs();
                if j > 0.0 {
                    min = Some(min.map_or(j, |m: f64| m.min(j)));
                }
            }
        }
        min
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| NmrError::ConfigParse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parse the TOML molecule config. Semantic errors carry the line number
    /// of the offending key.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let raw: RawMolecule = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(text, s.start)).unwrap_or(0);
            NmrError::ConfigParse {
                path: path.to_string(),
                line,
                message: e.message().to_string(),
            }
        })?;
        let fail = |key: &str, message: String| NmrError::ConfigParse {
            path: path.to_string(),
            line: line_of_key(text, key),
            message,
        };

        if raw.frequencies.len() != raw.n_spins {
            return Err(fail(
                "frequencies",
                format!("expected {} frequencies, got {}", raw.n_spins, raw.frequencies.len()),
            ));
        }
        let pairs: Vec<(usize, usize, f64)> = raw
            .couplings
            .iter()
            .map(|row| (row.0, row.1, row.2))
            .collect();
        let built = match raw.frequency_form {
            FrequencyForm::Offset => Self::new(
                raw.frequencies,
                raw.rotating_frame.unwrap_or(0.0),
                &pairs,
                raw.t1,
                raw.t2,
            ),
            FrequencyForm::Lab => Self::from_lab_frequencies(
                raw.frequencies,
                raw.rotating_frame,
                &pairs,
                raw.t1,
                raw.t2,
            ),
        };
        built.map_err(|e| match e {
            NmrError::InvalidMolecule(msg) => {
                let key = if msg.contains("coupling") {
                    "couplings"
                } else if msg.contains("t1") || msg.contains("t2") || msg.contains("relaxation") {
                    "t1"
                } else {
                    "n_spins"
                };
                fail(key, msg)
            }
            other => other,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    n_spins: usize,
    /// rad/s, in the declared form.
    frequencies: Vec<f64>,
    frequency_form: FrequencyForm,
    /// rad/s. Optional; lab form defaults to (ω_first + ω_last)/2.
    rotating_frame: Option<f64>,
    /// Upper-triangular list of (spin, spin, J in Hz).
    couplings: Vec<(usize, usize, f64)>,
    /// Seconds, one per spin.
    t1: Vec<f64>,
    t2: Vec<f64>,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> usize {
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with(key) {
            return i + 1;
        }
    }
    0
}
