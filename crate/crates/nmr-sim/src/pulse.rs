//! Piecewise-constant pulse sequences and their file format.
//!
//! A pulse file is plain text: a header line with the segment duration and
//! one `Ω φ` row per segment. Floats are written in shortest-roundtrip form,
//! so read(write(p)) == p bit for bit.

use crate::{NmrError, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    /// Amplitude Ω ≥ 0, rad/s.
    pub amplitude: f64,
    /// Phase φ, rad.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    segment_duration: f64,
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segment_duration: f64, segments: Vec<PulseSegment>) -> Result<Self> {
        if !(segment_duration > 0.0) {
            return Err(NmrError::InvalidPulse(format!(
                "segment duration must be positive, got {segment_duration}"
            )));
        }
        if segments.is_empty() {
            return Err(NmrError::InvalidPulse("pulse has no segments".into()));
        }
        if let Some(s) = segments.iter().find(|s| s.amplitude < 0.0 || !s.amplitude.is_finite()) {
            return Err(NmrError::InvalidPulse(format!(
                "segment amplitude must be ≥ 0 and finite, got {}",
                s.amplitude
            )));
        }
        Ok(Self {
            segment_duration,
            segments,
        })
    }

    /// All-zero-amplitude pulse of the given shape.
    pub fn zero(segment_duration: f64, n_segments: usize) -> Result<Self> {
        Self::new(
            segment_duration,
            vec![
                PulseSegment {
                    amplitude: 0.0,
                    phase: 0.0
                };
                n_segments.max(1)
            ],
        )
    }

    pub fn segment_duration(&self) -> f64 {
        self.segment_duration
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn total_duration(&self) -> f64 {
        self.segment_duration * self.segments.len() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "segment_duration {}", self.segment_duration);
        for s in &self.segments {
            let _ = writeln!(out, "{} {}", s.amplitude, s.phase);
        }
        out
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let fail = |line: usize, message: String| NmrError::ConfigParse {
            path: path.to_string(),
            line,
            message,
        };
        let mut segment_duration = None;
        let mut segments = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if segment_duration.is_none() {
                if fields.len() != 2 || fields[0] != "segment_duration" {
                    return Err(fail(line_no, "expected `segment_duration <seconds>`".into()));
                }
                let dt: f64 = fields[1]
                    .parse()
                    .map_err(|e| fail(line_no, format!("bad duration: {e}")))?;
                segment_duration = Some(dt);
                continue;
            }
            if fields.len() != 2 {
                return Err(fail(line_no, format!("expected `Ω φ`, got {} fields", fields.len())));
            }
            let amplitude: f64 = fields[0]
                .parse()
                .map_err(|e| fail(line_no, format!("bad amplitude: {e}")))?;
            let phase: f64 = fields[1]
                .parse()
                .map_err(|e| fail(line_no, format!("bad phase: {e}")))?;
            segments.push(PulseSegment { amplitude, phase });
        }
        let dt = segment_duration.ok_or_else(|| fail(0, "missing segment_duration header".into()))?;
        Self::new(dt, segments)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| NmrError::ConfigParse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })
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
}
