//! Single-qubit state readout: Pauli expectations, optional binomial shot
//! sampling, and reconstruction back to a physical state.

use crate::{MetrologyError, Result};
use engine::EngineParams;
use qcore::{hermitian_eigen, sigma_x, sigma_y, sigma_z, CMatrix, DensityMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shots {
    Exact,
    Count(u64),
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub qubit: usize,
    /// Bloch components (r_x, r_y, r_z); σ_z|0⟩ = +|0⟩ so the ground state
    /// reads r_z = +1.
    pub bloch: [f64; 3],
    pub state: DensityMatrix,
    pub shots: Shots,
}

/// Nearest physical state: eigenvalues clipped to ≥ 0, trace renormalized.
/// Idempotent and trace-preserving on anything with a positive trace.
pub fn project_to_state(mat: &CMatrix) -> Result<DensityMatrix> {
    let (vals, vecs) = hermitian_eigen(mat)?;
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(MetrologyError::InvalidArgument(
            "matrix has no positive spectral weight to project".into(),
        ));
    }
    let d = vals.len();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        let col = vecs.column(k);
        let w = C64::new(clipped[k] / total, 0.0);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += w * col[i] * col[j].conj();
            }
        }
    }
    Ok(DensityMatrix::new(out)?)
}

fn state_from_bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    let mut m = qcore::identity(2).map(|x| x * 0.5);
    m += sigma_x().map(|x| x * (0.5 * r[0]));
    m += sigma_y().map(|x| x * (0.5 * r[1]));
    m += sigma_z().map(|x| x * (0.5 * r[2]));
    project_to_state(&m)
}

/// Measure the three Pauli components of qubit `q`, exactly or with
/// binomial shot noise, and reconstruct the reduced state.
pub fn tomograph_qubit(
    rho: &DensityMatrix,
    q: usize,
    shots: Shots,
    seed: u64,
) -> Result<TomographyResult> {
    if q >= rho.n_qubits() {
        return Err(MetrologyError::InvalidArgument(format!(
            "qubit {q} out of range for a {}-qubit state",
            rho.n_qubits()
        )));
    }
    let exact = [
        rho.expectation_on(&sigma_x(), q)?,
        rho.expectation_on(&sigma_y(), q)?,
        rho.expectation_on(&sigma_z(), q)?,
    ];
    let bloch = match shots {
        Shots::Exact => exact,
        Shots::Count(0) => {
            return Err(MetrologyError::InvalidArgument("shots must be > 0".into()));
        }
        Shots::Count(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sampled = [0.0; 3];
            for (i, r) in exact.iter().enumerate() {
                let p_up = ((1.0 + r) / 2.0).clamp(0.0, 1.0);
                let k = Binomial::new(n, p_up).expect("valid binomial").sample(&mut rng);
                sampled[i] = 2.0 * (k as f64) / (n as f64) - 1.0;
            }
            sampled
        }
    };
    let state = state_from_bloch(bloch)?;
    Ok(TomographyResult { qubit: q, bloch, state, shots })
}

/// Mean energy Tr[ρ H], H = diag(-ℏω, +ℏω), peV.
pub fn energy_of(rho_q: &DensityMatrix, params: &EngineParams) -> Result<f64> {
    if rho_q.n_qubits() != 1 {
        return Err(MetrologyError::InvalidArgument(format!(
            "energy_of expects a single-qubit state, got {} qubits",
            rho_q.n_qubits()
        )));
    }
    Ok(engine::qubit_energy(rho_q, params))
}
