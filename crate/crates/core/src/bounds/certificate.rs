use serde::Serialize;

use super::Direction;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    Equal,
    /// `λ < λ′`.
    Less,
    /// `λ > λ′`.
    Greater,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub direction: Direction,
    /// All four checks passed; otherwise no ordering is claimed.
    pub valid: bool,
    pub failed_checks: Vec<String>,
    /// Eigenvalue of `C` for the left eigenvector `vᵀP`.
    pub lambda: f64,
    /// Eigenvalue of `C′` for the eigenvector `Qu`.
    pub lambda_prime: f64,
    pub ordering: Option<Ordering>,
    /// 1-based pairs `(i, j)` with `v_i ≠ 0` and `u_j ≠ 0`.
    pub equality_set: Vec<(usize, usize)>,
    /// Pairs of the equality set where `PCQ` and `PC′Q` differ.
    pub mismatches: Vec<(usize, usize)>,
}

fn rayleigh(a: &Matrix, w: &[f64], left: bool) -> Result<(f64, f64)> {
    let aw = if left { a.vec_mul(w)? } else { a.mul_vec(w)? };
    let ww: f64 = w.iter().map(|x| x * x).sum();
    if ww == 0.0 {
        return Ok((0.0, f64::INFINITY));
    }
    let lambda = aw.iter().zip(w).map(|(x, y)| x * y).sum::<f64>() / ww;
    let scale = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let residual = aw
        .iter()
        .zip(w)
        .fold(0.0_f64, |m, (x, y)| m.max((x - lambda * y).abs()))
        / scale;
    Ok((lambda, residual))
}

/// Checks a comparison certificate: (i) `PCQ ≤ PC′Q` entrywise (`≥` for
/// the lower direction), (ii) `Qu` is an eigenvector of `C′`, (iii) `vᵀP`
/// is a left eigenvector of `C` and (iv) `vᵀPQu > 0`. When all hold,
/// `λ ≤ λ′` (resp. `≥`) and equality holds exactly when the two products
/// agree on the equality set.
pub fn comparison_certificate(
    c: &Matrix,
    cp: &Matrix,
    pmat: &Matrix,
    q: &Matrix,
    u: &[f64],
    v: &[f64],
    direction: Direction,
) -> Result<CertificateReport> {
    let n = c.order()?;
    for (name, x) in [("C′", cp), ("P", pmat), ("Q", q)] {
        if x.order()? != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} must have order {n} like C"
            )));
        }
    }
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "u and v must have length {n}"
        )));
    }

    let mut failed = Vec::new();
    if u.iter().chain(v).any(|&x| x < 0.0) {
        failed.push("u and v must be nonnegative".to_string());
    }

    let lhs = pmat.matmul(c)?.matmul(q)?;
    let rhs = pmat.matmul(cp)?.matmul(q)?;
    let scale = 1.0 + lhs.max_abs().max(rhs.max_abs());
    let tol = 1e-12 * scale;
    let dominated = lhs.data().iter().zip(rhs.data()).all(|(a, b)| match direction {
        Direction::Upper => *a <= b + tol,
        Direction::Lower => *a >= b - tol,
    });
    if !dominated {
        failed.push(match direction {
            Direction::Upper => "(i) PCQ ≤ PC′Q fails".to_string(),
            Direction::Lower => "(i) PCQ ≥ PC′Q fails".to_string(),
        });
    }

    let qu = q.mul_vec(u)?;
    let (lambda_prime, res2) = rayleigh(cp, &qu, false)?;
    if !(res2 <= RESIDUAL_TOL) {
        failed.push(format!("(ii) Qu is not an eigenvector of C′ (residual {res2:e})"));
    }
    let vp = pmat.vec_mul(v)?;
    let (lambda, res3) = rayleigh(c, &vp, true)?;
    if !(res3 <= RESIDUAL_TOL) {
        failed.push(format!("(iii) vᵀP is not a left eigenvector of C (residual {res3:e})"));
    }
    let pairing: f64 = vp.iter().zip(&qu).map(|(a, b)| a * b).sum();
    if !(pairing > 1e-12) {
        failed.push(format!("(iv) vᵀPQu = {pairing:e} is not positive"));
    }

    let nonzero = |x: &[f64]| -> Vec<usize> {
        let top = x.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
        (0..n).filter(|&i| x[i].abs() > 1e-12 * top).collect()
    };
    let rows = nonzero(v);
    let cols = nonzero(u);
    let mut equality_set = Vec::new();
    let mut mismatches = Vec::new();
    for &i in &rows {
        for &j in &cols {
            equality_set.push((i + 1, j + 1));
            if (lhs[(i, j)] - rhs[(i, j)]).abs() > tol {
                mismatches.push((i + 1, j + 1));
            }
        }
    }

    let valid = failed.is_empty();
    let ordering = valid.then(|| {
        if mismatches.is_empty() {
            Ordering::Equal
        } else {
            match direction {
                Direction::Upper => Ordering::Less,
                Direction::Lower => Ordering::Greater,
            }
        }
    });
    Ok(CertificateReport {
        direction,
        valid,
        failed_checks: failed,
        lambda,
        lambda_prime,
        ordering,
        equality_set,
        mismatches,
    })
}
