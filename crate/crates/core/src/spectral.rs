//! Spectral radius of nonnegative matrices and the largest real eigenvalue
//! `ρ_r` of rooted and general matrices.
//!
//! The Perron root is found by power iteration on `C + I` from the all-ones
//! vector. Every step yields a Collatz–Wielandt bracket
//! `min_i (Bv)_i / v_i ≤ ρ(B) ≤ max_i (Bv)_i / v_i`, and iteration stops once
//! the bracket is narrow enough. Reducible inputs can leave the bracket
//! stuck; after 200 steps without shrinking by a factor 0.999 the dense
//! eigensolver takes over and the eigenvector comes from inverse iteration.

use serde::Serialize;

use crate::eigen::{dense_eigenvalues, solve_nudged, Eigenvalue};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::partition::{is_equitable, quotient_matrix, Partition};
use crate::rooted::{is_rooted_matrix, Rootedness};

const STALL_WINDOW: usize = 200;
const STALL_FACTOR: f64 = 0.999;

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    /// Bracket width target, relative to `max(1, ρ(C + I))`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Power,
    DenseFallback,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub value: f64,
    pub cw_lower: f64,
    pub cw_upper: f64,
    /// Nonnegative, 1-norm normalized.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    pub method: Method,
}

/// Largest real eigenvalue; `value` is `None` when there is no real
/// eigenvalue (conventionally `ρ_r = ∞`).
#[derive(Debug, Clone, Serialize)]
pub struct RhoR {
    pub value: Option<f64>,
    pub eigenvector: Option<Vec<f64>>,
    /// Rooting shift used, when computed through a rooted certificate.
    pub shift: Option<f64>,
}

fn normalize_l1(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Perron root and a nonnegative right eigenvector of a nonnegative matrix.
pub fn spectral_radius_nonneg(c: &Matrix, opts: &PowerOptions) -> Result<SpectralResult> {
    let n = c.order()?;
    c.require_nonnegative()?;
    if !(opts.tol >= 0.0) {
        return Err(Error::InvalidParams("tolerance must be nonnegative".into()));
    }

    let mut v = vec![1.0 / n as f64; n];
    // Bracket for ρ(C + I), always valid for the current positive iterate.
    let mut lower = 0.0_f64;
    let mut upper = f64::INFINITY;
    let mut checkpoint_width = f64::INFINITY;
    let mut checkpoint_iter = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut polish = 0usize;

    while iterations < opts.max_iter {
        iterations += 1;
        let mut w = c.mul_vec(&v)?;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += vi;
        }
        if v.iter().any(|&x| x <= 0.0) {
            break;
        }
        let (lo, hi) = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| wi / vi)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            });
        let width = hi - lo;
        let improved = width < upper - lower;
        if improved || !converged {
            lower = lo;
            upper = hi;
        }
        let s: f64 = w.iter().sum();
        v = w.into_iter().map(|x| x / s).collect();

        if converged {
            polish += 1;
            if !improved || polish >= 5 {
                break;
            }
            continue;
        }
        if width <= opts.tol * hi.max(1.0) {
            converged = true;
            continue;
        }
        if width < checkpoint_width * STALL_FACTOR {
            checkpoint_width = width;
            checkpoint_iter = iterations;
        } else if iterations - checkpoint_iter >= STALL_WINDOW {
            break;
        }
    }

    if converged {
        normalize_l1(&mut v);
        return Ok(SpectralResult {
            value: 0.5 * (lower + upper) - 1.0,
            cw_lower: lower - 1.0,
            cw_upper: upper - 1.0,
            eigenvector: v,
            iterations,
            method: Method::Power,
        });
    }

    let rho = dense_eigenvalues(c)?
        .iter()
        .map(Eigenvalue::modulus)
        .fold(0.0, f64::max);
    let (value, eigenvector) = refine_pair(c, perron_vector(c, rho), rho);
    Ok(SpectralResult {
        value,
        cw_lower: (lower - 1.0).min(value),
        cw_upper: (upper - 1.0).max(value),
        eigenvector,
        iterations,
        method: Method::DenseFallback,
    })
}

/// Inverse iteration just above `rho`; for a nonnegative matrix the
/// resolvent `(σI - C)⁻¹` with `σ > ρ` is itself nonnegative.
fn perron_vector(c: &Matrix, rho: f64) -> Vec<f64> {
    let n = c.rows();
    let sigma = rho + 1e-6 * (1.0 + rho);
    let a = Matrix::identity(n).scale(sigma).sub(c).expect("same shape");
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..50 {
        let mut y = solve_nudged(&a, &x);
        if y.iter().sum::<f64>() < 0.0 {
            y.iter_mut().for_each(|t| *t = -*t);
        }
        normalize_l1(&mut y);
        let change: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if change < 1e-15 {
            break;
        }
    }
    x
}

/// Picks the eigenpair with the smallest residual `‖Cx - λx‖₁` among the
/// dense estimate and quotients `1ᵀCx / 1ᵀx` of the eigenvector with tiny
/// entries dropped. Near a defective eigenvalue inverse iteration leaves a
/// small component along the generalized eigenvector; dropping it recovers
/// the exact eigenvector.
fn refine_pair(c: &Matrix, x: Vec<f64>, rho: f64) -> (f64, Vec<f64>) {
    let residual = |x: &[f64], lambda: f64| -> f64 {
        let cx = c.mul_vec(x).expect("square");
        cx.iter().zip(x).map(|(a, b)| (a - lambda * b).abs()).sum()
    };
    let mut best = (residual(&x, rho), rho, x.clone());
    let top = x.iter().cloned().fold(0.0, f64::max);
    for cut in [0.0, 1e-12, 1e-9, 1e-6] {
        let mut y: Vec<f64> = x
            .iter()
            .map(|&t| if t <= cut * top { 0.0 } else { t })
            .collect();
        normalize_l1(&mut y);
        let sy: f64 = y.iter().sum();
        if sy <= 0.0 {
            continue;
        }
        let lambda = c.mul_vec(&y).expect("square").iter().sum::<f64>() / sy;
        if (lambda - rho).abs() > 1e-6 * (1.0 + rho) {
            continue;
        }
        let r = residual(&y, lambda);
        if r < best.0 {
            best = (r, lambda, y);
        }
    }
    (best.1, best.2)
}

/// Perron root with a nonnegative left eigenvector.
pub fn left_eigenvector_nonneg(c: &Matrix, opts: &PowerOptions) -> Result<SpectralResult> {
    spectral_radius_nonneg(&c.transpose(), opts)
}

/// `ρ_r` of a rooted matrix through its nonnegative Q-transform. The returned
/// eigenvector is the rooted `v′ = Qu` for the Perron vector `u` of the
/// transform, normalized to unit 1-norm.
pub fn rho_r_rooted(cp: &Matrix, opts: &PowerOptions) -> Result<RhoR> {
    let cert = is_rooted_matrix(cp)?.into_certificate()?;
    let perron = spectral_radius_nonneg(&cert.transformed, opts)?;
    let u = &perron.eigenvector;
    let n = u.len();
    let mut v: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { u[i] } else { u[i] + u[n - 1] })
        .collect();
    normalize_l1(&mut v);
    Ok(RhoR {
        value: Some(perron.value - cert.shift),
        eigenvector: Some(v),
        shift: Some(cert.shift),
    })
}

/// Slack below which an imaginary part counts as zero.
pub fn real_eigenvalue_tol(c: &Matrix) -> f64 {
    1e-9 * (1.0 + c.norm1())
}

/// `ρ_r` of an arbitrary square matrix from its dense spectrum.
pub fn rho_r_general(c: &Matrix) -> Result<RhoR> {
    let tol = real_eigenvalue_tol(c);
    let value = dense_eigenvalues(c)?
        .into_iter()
        .filter(|e| e.im.abs() <= tol)
        .map(|e| e.re)
        .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |b| b.max(x))));
    Ok(RhoR {
        value,
        eigenvector: None,
        shift: None,
    })
}

/// `ρ_r`, through the rooted route when the matrix is rooted.
pub fn rho_r(c: &Matrix, opts: &PowerOptions) -> Result<RhoR> {
    match is_rooted_matrix(c)? {
        Rootedness::Rooted(_) => rho_r_rooted(c, opts),
        Rootedness::NotRooted(_) => rho_r_general(c),
    }
}

/// Number of eigenvalues within `tol` of the real number `lambda`.
pub fn eigenvalue_multiplicity(c: &Matrix, lambda: f64, tol: f64) -> Result<usize> {
    Ok(dense_eigenvalues(c)?
        .iter()
        .filter(|e| (e.re - lambda).hypot(e.im) <= tol)
        .count())
}

/// Shrinks a rooted matrix to the quotient of its transpose. `p` must be
/// equitable for `C′ᵀ` and end with the singleton block `{n}`; then
/// `ρ_r(C′) = ρ_r(Π(C′ᵀ))`, which is checked before returning.
pub fn reduce_by_transpose_quotient(
    cp: &Matrix,
    p: &Partition,
    opts: &PowerOptions,
) -> Result<(Matrix, RhoR)> {
    let n = cp.order()?;
    let full = rho_r_rooted(cp, opts)?;
    if p.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has order {n} but partition covers {} indices",
            p.n()
        )));
    }
    if p.block(p.len() - 1) != [n - 1] {
        return Err(Error::Hypothesis(format!(
            "last block must be the singleton {{{n}}}"
        )));
    }
    let cpt = cp.transpose();
    let chk = is_equitable(&cpt, p, None)?;
    if !chk.equitable {
        let v = &chk.violations[0];
        return Err(Error::Hypothesis(format!(
            "partition is not equitable for the transpose (row {}, block {})",
            v.row, v.block
        )));
    }
    let q = quotient_matrix(&cpt, p)?;
    let reduced = rho_r(&q, opts)?;
    let (a, b) = (full.value.unwrap(), reduced.value);
    match b {
        Some(b) if (a - b).abs() <= 1e-8 * (1.0 + a.abs()) => Ok((q, reduced)),
        _ => Err(Error::Hypothesis(format!(
            "reduced largest real eigenvalue {b:?} disagrees with {a}"
        ))),
    }
}
