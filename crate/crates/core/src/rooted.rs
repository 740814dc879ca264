//! Rooted vectors and rooted matrices.
//!
//! A vector `v` is rooted when `v_i ≥ v_n ≥ 0` for every `i < n`. A square
//! matrix `C′` is rooted when some shift `d` makes the first `n-1` columns and
//! the row-sum vector of `C′ + dI` rooted, which is the same as asking that
//! `Q⁻¹(C′ + dI)Q` be nonnegative for `Q = I + Σ_{i<n} E_in`.
//!
//! Only the diagonal of the transform and its `(n, n)` entry depend on `d`,
//! so rootedness reduces to three `d`-free conditions plus a closed-form
//! minimal shift.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `Q = I_n + Σ_{i<n} E_in`: the identity with its last column set to ones.
pub fn q_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i == j || j == n - 1 { 1.0 } else { 0.0 })
}

/// `Q⁻¹ = I_n - Σ_{i<n} E_in`.
pub fn q_matrix_inverse(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if j == n - 1 {
            -1.0
        } else {
            0.0
        }
    })
}

/// `v_i ≥ v_n ≥ 0` for all `i < n`, compared exactly.
pub fn is_rooted_vector(v: &[f64]) -> bool {
    match v.split_last() {
        None => false,
        Some((&last, rest)) => last >= 0.0 && rest.iter().all(|&x| x >= last),
    }
}

/// `v_i > v_n > 0` for all `i < n`.
pub fn is_strictly_rooted_vector(v: &[f64]) -> bool {
    match v.split_last() {
        None => false,
        Some((&last, rest)) => last > 0.0 && rest.iter().all(|&x| x > last),
    }
}

/// `Q⁻¹·C′·Q` written out entrywise; valid for any order `n ≥ 1`.
pub(crate) fn q_similarity(cp: &Matrix) -> Result<Matrix> {
    let n = cp.order()?;
    let r = cp.row_sums();
    let last = n - 1;
    Ok(Matrix::from_fn(n, n, |i, j| match (i == last, j == last) {
        (false, false) => cp[(i, j)] - cp[(last, j)],
        (false, true) => r[i] - r[last],
        (true, false) => cp[(last, j)],
        (true, true) => r[last],
    }))
}

/// The similarity transform `Q⁻¹·C′·Q` for `n ≥ 2`.
pub fn q_transform(cp: &Matrix) -> Result<Matrix> {
    let n = cp.order()?;
    if n < 2 {
        return Err(Error::DimensionMismatch(
            "the Q-transform needs order at least 2".into(),
        ));
    }
    q_similarity(cp)
}

/// A shift-independent condition that fails for a non-rooted matrix.
/// Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootedViolation {
    /// `c′_nj < 0` for some `j < n`.
    NegativeBottomEntry { col: usize, value: f64 },
    /// `c′_ij < c′_nj` for some off-diagonal `i ≠ j`, `i, j < n`.
    ColumnNotRooted { row: usize, col: usize, value: f64, bottom: f64 },
    /// `r′_i < r′_n` for some `i < n`.
    RowSumNotRooted { row: usize, row_sum: f64, last_row_sum: f64 },
}

/// Witness that a matrix is rooted.
#[derive(Debug, Clone, Serialize)]
pub struct RootedCertificate {
    /// The minimal shift `d`.
    pub shift: f64,
    /// `Q⁻¹(C′ + dI)Q`, entrywise nonnegative.
    pub transformed: Matrix,
}

#[derive(Debug, Clone)]
pub enum Rootedness {
    Rooted(RootedCertificate),
    NotRooted(Vec<RootedViolation>),
}

impl Rootedness {
    pub fn is_rooted(&self) -> bool {
        matches!(self, Rootedness::Rooted(_))
    }

    pub fn certificate(&self) -> Option<&RootedCertificate> {
        match self {
            Rootedness::Rooted(c) => Some(c),
            Rootedness::NotRooted(_) => None,
        }
    }

    pub fn violations(&self) -> &[RootedViolation] {
        match self {
            Rootedness::Rooted(_) => &[],
            Rootedness::NotRooted(v) => v,
        }
    }

    pub fn into_certificate(self) -> Result<RootedCertificate> {
        match self {
            Rootedness::Rooted(c) => Ok(c),
            Rootedness::NotRooted(v) => Err(Error::NotRooted(v)),
        }
    }
}

/// Comparison slack for the rootedness conditions.
pub fn rooted_tol(cp: &Matrix) -> f64 {
    1e-12 * (1.0 + cp.max_abs())
}

/// Decides rootedness and, when it holds, returns the minimal shift
/// `d* = max(-r′_n, max_{j<n} (c′_nj - c′_jj))` with the verified transform.
pub fn is_rooted_matrix(cp: &Matrix) -> Result<Rootedness> {
    let n = cp.order()?;
    let tol = rooted_tol(cp);
    let last = n - 1;
    let r = cp.row_sums();
    let mut violations = Vec::new();

    for j in 0..last {
        if cp[(last, j)] < -tol {
            violations.push(RootedViolation::NegativeBottomEntry {
                col: j + 1,
                value: cp[(last, j)],
            });
        }
    }
    for i in 0..last {
        for j in 0..last {
            if i != j && cp[(i, j)] < cp[(last, j)] - tol {
                violations.push(RootedViolation::ColumnNotRooted {
                    row: i + 1,
                    col: j + 1,
                    value: cp[(i, j)],
                    bottom: cp[(last, j)],
                });
            }
        }
    }
    for i in 0..last {
        if r[i] < r[last] - tol {
            violations.push(RootedViolation::RowSumNotRooted {
                row: i + 1,
                row_sum: r[i],
                last_row_sum: r[last],
            });
        }
    }
    if !violations.is_empty() {
        return Ok(Rootedness::NotRooted(violations));
    }

    let shift = (0..last)
        .map(|j| cp[(last, j)] - cp[(j, j)])
        .fold(-r[last], f64::max);
    let mut transformed = q_similarity(&cp.shift_diagonal(shift))?;
    for i in 0..n {
        for j in 0..n {
            let x = transformed[(i, j)];
            // Entries this negative would contradict the conditions above.
            debug_assert!(x >= -tol * (1.0 + shift.abs()) * 4.0, "transform entry {x}");
            if x < 0.0 {
                transformed[(i, j)] = 0.0;
            }
        }
    }
    Ok(Rootedness::Rooted(RootedCertificate { shift, transformed }))
}

/// Whether `Q⁻¹(C′ + dI)Q` is nonnegative (within the rootedness slack) for
/// the given shift.
pub fn is_rooting_shift(cp: &Matrix, d: f64) -> Result<bool> {
    let tol = rooted_tol(cp) * (1.0 + d.abs());
    let t = q_similarity(&cp.shift_diagonal(d))?;
    Ok(t.data().iter().all(|&x| x >= -tol))
}
