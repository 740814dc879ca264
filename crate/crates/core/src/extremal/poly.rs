use serde::Serialize;

use super::{construct_a0, ExtremalParams};
use crate::eigen::dense_eigenvalues;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::spectral::{spectral_radius_nonneg, PowerOptions};

/// Real polynomial, coefficients from the leading term down.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let first = coeffs.iter().position(|&x| x != 0.0).unwrap_or(coeffs.len().saturating_sub(1));
        Polynomial {
            coeffs: coeffs[first..].to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let d = self.degree();
        if d == 0 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs[..d]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (d - k) as f64)
                .collect(),
        )
    }

    /// Companion matrix of the monic rescaling; `None` for constants.
    pub fn companion(&self) -> Option<Matrix> {
        let d = self.degree();
        if d == 0 {
            return None;
        }
        let lead = self.coeffs[0];
        Some(Matrix::from_fn(d, d, |i, j| {
            if i == 0 {
                -self.coeffs[j + 1] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        }))
    }

    /// Largest real root from the companion eigenvalues, polished by Newton.
    pub fn largest_real_root(&self) -> Result<Option<f64>> {
        let Some(comp) = self.companion() else {
            return Ok(None);
        };
        let tol = 1e-7 * (1.0 + comp.norm1());
        let best = dense_eigenvalues(&comp)?
            .into_iter()
            .filter(|e| e.im.abs() <= tol)
            .map(|e| e.re)
            .fold(None, |b: Option<f64>, x| Some(b.map_or(x, |b| b.max(x))));
        Ok(best.map(|mut x| {
            let dp = self.derivative();
            for _ in 0..4 {
                let d = dp.eval(x);
                if d == 0.0 {
                    break;
                }
                let step = self.eval(x) / d;
                if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
                    break;
                }
                x -= step;
            }
            x
        }))
    }
}

/// Characteristic polynomial of the 3×3 quotient of the bound matrix:
/// `x³ - cx² - ax + a(c-s) - sb`, or with zero trace
/// `x³ - (c-2)x² + (1-c-a)x + a(c-s-1) - sb`.
pub fn f_poly(c: i64, s: i64, a: i64, b: i64, zero_trace: bool) -> Polynomial {
    let v = |x: i64| x as f64;
    if zero_trace {
        Polynomial::new(vec![1.0, -v(c - 2), v(1 - c - a), v(a * (c - s - 1) - s * b)])
    } else {
        Polynomial::new(vec![1.0, -v(c), -v(a), v(a * (c - s) - s * b)])
    }
}

/// `f` at `a = ⌊t/2⌋`, `s = ⌈t/2⌉`, `b = 0`; its largest root is `ρ(A_0)`.
pub fn g_poly(c: i64, t: i64, zero_trace: bool) -> Polynomial {
    f_poly(c, (t + 1) / 2, t / 2, 0, zero_trace)
}

/// Characteristic polynomial of the 4×4 quotient of the competitor with
/// `s = (t + 1) / 2`.
pub fn h_poly(c: i64, s: i64, zero_trace: bool) -> Polynomial {
    let v = |x: i64| x as f64;
    if zero_trace {
        Polynomial::new(vec![
            1.0,
            -v(c - 3),
            v(4 - 2 * c - s),
            v((c - 2) * (s - 1) - s * s),
            -v(s * (s - c + 2)),
        ])
    } else {
        Polynomial::new(vec![
            1.0,
            -v(c - 1),
            v(1 - c - s),
            v(s * (c - 1 - s)),
            v(s * (c - 1 - s)),
        ])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjecturePolynomials {
    pub f: Polynomial,
    pub g: Polynomial,
    pub h: Polynomial,
    pub f_root: Option<f64>,
    pub g_root: Option<f64>,
    pub h_root: Option<f64>,
    /// `ρ(A_0)` computed from the matrix, when `(c, t)` is admissible.
    pub rho_a0: Option<f64>,
    /// `|ρ(A_0) - largest root of g| ≤ 1e-9`.
    pub g_root_matches: Option<bool>,
}

pub fn conjecture_polynomials(
    c: i64,
    t: i64,
    s: i64,
    a: i64,
    b: i64,
    zero_trace: bool,
) -> Result<ConjecturePolynomials> {
    let f = f_poly(c, s, a, b, zero_trace);
    let g = g_poly(c, t, zero_trace);
    let h = h_poly(c, s, zero_trace);
    let g_root = g.largest_real_root()?;
    let rho_a0 = match (usize::try_from(c), usize::try_from(t)) {
        (Ok(cu), Ok(tu)) => match ExtremalParams::new(cu + 1, cu, tu, zero_trace) {
            Ok(p) => Some(
                spectral_radius_nonneg(&construct_a0(&p)?, &PowerOptions::default())?.value,
            ),
            Err(_) => None,
        },
        _ => None,
    };
    let g_root_matches = match (rho_a0, g_root) {
        (Some(r), Some(g)) => Some((r - g).abs() <= 1e-9),
        _ => None,
    };
    Ok(ConjecturePolynomials {
        f_root: f.largest_real_root()?,
        h_root: h.largest_real_root()?,
        f,
        g,
        h,
        g_root,
        rho_a0,
        g_root_matches,
    })
}

/// Quotient of the transposed bound matrix by `{1..s}, {s+1..c}, {c+1}`:
/// `[[c, 1], [a, 0]]` when `s = c`, otherwise
/// `[[s, c-s, 1], [s, c-s, 0], [a, b, 0]]`; zero trace subtracts one on the
/// diagonal of the leading blocks.
pub fn quotient_matrices_6_1(c: i64, s: i64, a: i64, b: i64, zero_trace: bool) -> Matrix {
    let z = if zero_trace { 1.0 } else { 0.0 };
    let v = |x: i64| x as f64;
    if s == c {
        Matrix::from_rows(&[[v(c) - z, 1.0], [v(a), 0.0]]).expect("fixed shape")
    } else {
        Matrix::from_rows(&[
            [v(s) - z, v(c - s), 1.0],
            [v(s), v(c - s) - z, 0.0],
            [v(a), v(b), 0.0],
        ])
        .expect("fixed shape")
    }
}
