//! Engine parameters and the register layout.

use crate::{EngineError, Result};
use qcore::{CMatrix, C64};
use serde::{Deserialize, Serialize};

/// ℏ in peV·s. Temperatures are handled exclusively as k_B·T energies in
/// peV, so the Boltzmann constant never appears separately.
pub const HBAR_PEV_S: f64 = nmr_sim::HBAR_PEV_S;

/// The engine register is always four qubits: (W, P, M, A).
pub const REGISTER_SIZE: usize = 4;

/// Qubit roles in register order (W, P, M, A) = (0, 1, 2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    Weight,
    Particle,
    Memory,
    Ancilla,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [
        Subsystem::Weight,
        Subsystem::Particle,
        Subsystem::Memory,
        Subsystem::Ancilla,
    ];

    pub fn index(self) -> usize {
        match self {
            Subsystem::Weight => 0,
            Subsystem::Particle => 1,
            Subsystem::Memory => 2,
            Subsystem::Ancilla => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::Weight => "W",
            Subsystem::Particle => "P",
            Subsystem::Memory => "M",
            Subsystem::Ancilla => "A",
        }
    }
}

/// Level spacing ω and reservoir temperature k_B·T.
///
/// Energy convention: basis bit b has energy ℏω(2b - 1), so the ground
/// state (bit 0) sits at -ℏω and the excited state at +ℏω; the level gap
/// is 2ℏω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    omega: f64,
    kt: f64,
}

impl EngineParams {
    pub fn new(omega: f64, kt: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(EngineError::InvalidParams(format!("omega must be > 0, got {omega}")));
        }
        if !(kt >= 0.0) {
            return Err(EngineError::InvalidParams(format!("kT must be ≥ 0, got {kt}")));
        }
        Ok(Self { omega, kt })
    }

    /// ω = 2000 rad/s at the given reservoir temperature.
    pub fn standard(kt: f64) -> Result<Self> {
        Self::new(2000.0, kt)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Reservoir temperature as energy k_B·T, peV.
    pub fn kt(&self) -> f64 {
        self.kt
    }

    /// ℏω in peV.
    pub fn hbar_omega(&self) -> f64 {
        HBAR_PEV_S * self.omega
    }

    /// Level spacing 2ℏω in peV.
    pub fn gap(&self) -> f64 {
        2.0 * self.hbar_omega()
    }

    /// Ground-state population of the Gibbs state, 1/(1 + e^(-2ℏω/kT)).
    /// kT = 0 is the pure-ground limit.
    pub fn ground_population(&self) -> f64 {
        if self.kt == 0.0 {
            1.0
        } else {
            1.0 / (1.0 + (-self.gap() / self.kt).exp())
        }
    }

    /// Same params at a different temperature.
    pub fn with_kt(&self, kt: f64) -> Result<Self> {
        Self::new(self.omega, kt)
    }

    /// Single-qubit Hamiltonian diag(-ℏω, +ℏω) in peV.
    pub fn qubit_hamiltonian(&self) -> CMatrix {
        let e = self.hbar_omega();
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(-e, 0.0),
            C64::new(e, 0.0),
        ]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(EngineParams::new(0.0, 1.0).is_err());
        assert!(EngineParams::new(2000.0, -1.0).is_err());
    }

    #[test]
    fn gap_is_two_hbar_omega() {
        let p = EngineParams::standard(1.33).unwrap();
        assert!((p.gap() - 2.6328478276).abs() < 1e-9);
    }

    #[test]
    fn ground_population_limits() {
        let cold = EngineParams::standard(0.0).unwrap();
        assert_eq!(cold.ground_population(), 1.0);
        let hot = EngineParams::standard(1e12).unwrap();
        assert!((hot.ground_population() - 0.5).abs() < 1e-9);
    }
}
