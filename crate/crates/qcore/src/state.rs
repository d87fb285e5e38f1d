//! Density matrices and unitary operators on an n-qubit register.

use crate::matrix::{bit_of, embed, hermiticity_deviation, identity, kron, trace, CMatrix, C64};
use crate::spectral::{hermitian_eigen, unitary_exp};
use crate::{QcoreError, Result, ALGEBRAIC_TOL};

fn qubits_of_dim(dim: usize, context: &'static str) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QcoreError::DimensionMismatch {
            context,
            got: dim,
            expected: dim.next_power_of_two().max(1),
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Trace-one, positive-semidefinite, Hermitian operator: the simulator's state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to 1e-10 and positivity to -1e-10.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(QcoreError::DimensionMismatch {
                context: "density matrix must be square",
                got: mat.ncols(),
                expected: mat.nrows(),
            });
        }
        let n_qubits = qubits_of_dim(mat.nrows(), "density matrix dimension")?;
        let herm = hermiticity_deviation(&mat);
        if herm > ALGEBRAIC_TOL {
            return Err(QcoreError::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = trace(&mat);
        if (tr - C64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
            return Err(QcoreError::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (vals, _) = hermitian_eigen(&mat)?;
        if let Some(l) = vals.iter().find(|&&l| l < -ALGEBRAIC_TOL) {
            return Err(QcoreError::InvalidState(format!("negative eigenvalue {l:.3e}")));
        }
        Ok(Self { mat, n_qubits })
    }

    /// Skips the invariant checks. For internal hot loops whose steps
    /// preserve the invariants by construction; callers re-validate at
    /// the end via [`DensityMatrix::new`].
    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        let n_qubits = mat.nrows().trailing_zeros() as usize;
        Self { mat, n_qubits }
    }

    /// Computational basis state with the given bit per qubit (0 = ground).
    pub fn basis_state(bits: &[u8]) -> Self {
        let n = bits.len();
        let index = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (q, &b)| acc | ((b as usize & 1) << (n - 1 - q)));
        let dim = 1usize << n;
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(index, index)] = C64::new(1.0, 0.0);
        Self { mat, n_qubits: n }
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        qubits_of_dim(dim, "pure state dimension")?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QcoreError::InvalidState(format!(
                "state vector norm² is {norm}, expected 1"
            )));
        }
        let v = nalgebra::DVector::from_row_slice(amplitudes);
        Self::new(&v * v.adjoint())
    }

    /// Diagonal mixture with the given probabilities.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = probs.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            mat: identity(dim).map(|x| x / dim as f64),
            n_qubits,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// ρ ⊗ σ.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: kron(&self.mat, &other.mat),
            n_qubits: self.n_qubits + other.n_qubits,
        }
    }

    /// UρU†.
    pub fn apply_unitary(&self, u: &UnitaryOp) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(QcoreError::DimensionMismatch {
                context: "apply_unitary",
                got: u.dim(),
                expected: self.dim(),
            });
        }
        Ok(DensityMatrix {
            mat: u.matrix() * &self.mat * u.matrix().adjoint(),
            n_qubits: self.n_qubits,
        })
    }

    /// Reduced state on `keep` (in the listed order), tracing out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if keep.is_empty() {
            return Err(QcoreError::InvalidTargets("empty keep list".into()));
        }
        for (idx, &q) in keep.iter().enumerate() {
            if q >= n {
                return Err(QcoreError::InvalidTargets(format!(
                    "kept qubit {q} out of range for {n} qubits"
                )));
            }
            if keep[..idx].contains(&q) {
                return Err(QcoreError::InvalidTargets(format!("duplicate kept qubit {q}")));
            }
        }
        let k = keep.len();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let out_dim = 1usize << k;
        let mut out = CMatrix::zeros(out_dim, out_dim);
        // Full index from kept-subindex a and traced-subindex e.
        let full_index = |sub: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                idx |= ((sub >> (k - 1 - pos)) & 1) << (n - 1 - q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                idx |= ((env >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
            }
            idx
        };
        let env_dim = 1usize << traced.len();
        for a in 0..out_dim {
            for b in 0..out_dim {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..env_dim {
                    acc += self.mat[(full_index(a, e), full_index(b, e))];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { mat: out, n_qubits: k })
    }

    /// Re Tr[ρ A].
    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(QcoreError::DimensionMismatch {
                context: "expectation operator",
                got: op.nrows(),
                expected: self.dim(),
            });
        }
        Ok(trace(&(&self.mat * op)).re)
    }

    /// Expectation of a single-qubit operator on qubit `q`.
    pub fn expectation_on(&self, op: &CMatrix, q: usize) -> Result<f64> {
        self.expectation(&embed(op, &[q], self.n_qubits)?)
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        trace(&(&self.mat * &self.mat)).re
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Diagonal populations, real parts.
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|x| x.re).collect()
    }

    /// Max-norm deviation from the density-matrix invariants, for diagnostics.
    pub fn invariant_deviation(&self) -> f64 {
        let herm = hermiticity_deviation(&self.mat);
        let tr = (trace(&self.mat) - C64::new(1.0, 0.0)).norm();
        let min_eig = hermitian_eigen(&self.mat)
            .map(|(vals, _)| vals.into_iter().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NEG_INFINITY);
        herm.max(tr).max((-min_eig).max(0.0))
    }
}

/// A unitary on an n-qubit register, validated to U†U = I at 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    mat: CMatrix,
    n_qubits: usize,
}

impl UnitaryOp {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(QcoreError::DimensionMismatch {
                context: "unitary must be square",
                got: mat.ncols(),
                expected: mat.nrows(),
            });
        }
        let n_qubits = qubits_of_dim(mat.nrows(), "unitary dimension")?;
        let dev = crate::matrix::max_abs_diff(&(mat.adjoint() * &mat), &identity(mat.nrows()));
        if dev > ALGEBRAIC_TOL {
            return Err(QcoreError::NotUnitary { deviation: dev });
        }
        Ok(Self { mat, n_qubits })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            mat: identity(dim),
            n_qubits,
        }
    }

    /// exp(-iHt) for a Hermitian generator H.
    pub fn from_hamiltonian(h: &CMatrix, t: f64) -> Result<Self> {
        Self::new(unitary_exp(h, t)?)
    }

    /// Embed into a larger register, acting on `targets`.
    pub fn embed_into(&self, targets: &[usize], n: usize) -> Result<UnitaryOp> {
        UnitaryOp::new(embed(&self.mat, targets, n)?)
    }

    /// self ∘ other: apply `other` first.
    pub fn compose(&self, other: &UnitaryOp) -> Result<UnitaryOp> {
        if self.dim() != other.dim() {
            return Err(QcoreError::DimensionMismatch {
                context: "compose",
                got: other.dim(),
                expected: self.dim(),
            });
        }
        Ok(UnitaryOp {
            mat: &self.mat * &other.mat,
            n_qubits: self.n_qubits,
        })
    }

    pub fn adjoint(&self) -> UnitaryOp {
        UnitaryOp {
            mat: self.mat.adjoint(),
            n_qubits: self.n_qubits,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }
}

/// Bit of qubit `q` in the basis index of a state of `n` qubits.
/// Re-exported here so state-handling code can stay convention-safe.
pub fn basis_bit(index: usize, q: usize, n: usize) -> usize {
    bit_of(index, q, n)
}
