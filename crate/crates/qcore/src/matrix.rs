//! Dense complex matrices, Pauli operators, Kronecker products and
//! embedding of few-qubit operators into a larger register.

use crate::{QcoreError, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

fn from_rows(entries: [[C64; 2]; 2]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[entries[0][0], entries[0][1], entries[1][0], entries[1][1]])
}

pub fn sigma_x() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    from_rows([[o, l], [l, o]])
}

pub fn sigma_y() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    from_rows([[o, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), o]])
}

pub fn sigma_z() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    from_rows([[l, o], [o, -l]])
}

/// |0⟩⟨1|, the lowering operator toward the ground state.
pub fn sigma_minus() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    from_rows([[o, C64::new(1.0, 0.0)], [o, o]])
}

/// |1⟩⟨0|.
pub fn sigma_plus() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    from_rows([[o, o], [C64::new(1.0, 0.0), o]])
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_deviation(m) <= tol
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Basis bit of `qubit` in basis index `index` for an `n`-qubit register.
/// Qubit 0 is the most significant bit.
#[inline]
pub fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// Embed a `k`-qubit operator so it acts as `op` on `targets` and as the
/// identity on every other qubit of an `n`-qubit register.
pub fn embed(op: &CMatrix, targets: &[usize], n: usize) -> Result<CMatrix> {
    let k = targets.len();
    if k == 0 || k > n {
        return Err(QcoreError::InvalidTargets(format!(
            "need between 1 and {n} targets, got {k}"
        )));
    }
    for (idx, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(QcoreError::InvalidTargets(format!(
                "target {t} out of range for {n} qubits"
            )));
        }
        if targets[..idx].contains(&t) {
            return Err(QcoreError::InvalidTargets(format!("duplicate target {t}")));
        }
    }
    let small = 1usize << k;
    if op.nrows() != small || op.ncols() != small {
        return Err(QcoreError::DimensionMismatch {
            context: "embed operator",
            got: op.nrows(),
            expected: small,
        });
    }

    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let sub_index = |full: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &q)| acc | (bit_of(full, q, n) << (k - 1 - t)))
    };
    for i in 0..dim {
        for j in 0..dim {
            if rest.iter().any(|&q| bit_of(i, q, n) != bit_of(j, q, n)) {
                continue;
            }
            out[(i, j)] = op[(sub_index(i), sub_index(j))];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity_case() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
    }

    #[test]
    fn kron_sigma_z_with_identity() {
        let got = kron(&sigma_z(), &identity(2));
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert!(max_abs_diff(&got, &want) == 0.0);
    }

    #[test]
    fn kron_matches_nested_loop_oracle() {
        // 2x4 shaped inputs checked entrywise against the definition.
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = CMatrix::from_fn(2, 2, |_, _| c(next(), next()));
        let b = CMatrix::from_fn(4, 4, |_, _| c(next(), next()));
        let got = kron(&a, &b);
        assert_eq!(got.shape(), (8, 8));
        for i in 0..8 {
            for j in 0..8 {
                let want = a[(i / 4, j / 4)] * b[(i % 4, j % 4)];
                assert!((got[(i, j)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn embed_single_qubit_on_second() {
        let got = embed(&sigma_x(), &[1], 2).unwrap();
        assert!(max_abs_diff(&got, &kron(&identity(2), &sigma_x())) < 1e-15);
    }

    #[test]
    fn embed_identity_placement() {
        let swap = CMatrix::from_row_slice(
            4,
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        );
        let got = embed(&swap, &[0, 1], 2).unwrap();
        assert!(max_abs_diff(&got, &swap) < 1e-15);
    }

    #[test]
    fn embed_respects_bit_order() {
        // σ_x on qubit 0 (most significant) maps |00⟩ to |10⟩.
        let op = embed(&sigma_x(), &[0], 2).unwrap();
        let mut ket = nalgebra::DVector::from_element(4, c(0.0, 0.0));
        ket[0] = c(1.0, 0.0);
        let out = op * ket;
        for (idx, amp) in out.iter().enumerate() {
            let want = if idx == 0b10 { 1.0 } else { 0.0 };
            assert!((amp - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn embed_rejects_bad_targets() {
        assert!(embed(&sigma_x(), &[0, 0], 2).is_err());
        assert!(embed(&sigma_x(), &[2], 2).is_err());
        assert!(embed(&sigma_x(), &[], 2).is_err());
    }
}
