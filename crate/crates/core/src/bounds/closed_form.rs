use serde::{Deserialize, Serialize};

use super::Equality;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Parameters of the rooted family `M_n`: diagonal `d`, off-diagonal `f1` in
/// the leading block, bottom-row entries `f2` and row sums `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnParams {
    pub n: usize,
    pub d: f64,
    pub f1: f64,
    pub f2: f64,
    pub r: Vec<f64>,
}

impl MnParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.r.len() != self.n {
            return bad(format!("r has length {} but n = {}", self.r.len(), self.n));
        }
        let all = [self.d, self.f1, self.f2].into_iter().chain(self.r.iter().copied());
        if all.clone().any(|x| !x.is_finite() || x < 0.0) {
            return bad("d, f1, f2 and r must be finite and nonnegative".into());
        }
        if self.f1 < self.f2 {
            return bad(format!("f1 = {} is smaller than f2 = {}", self.f1, self.f2));
        }
        let rn = self.r[self.n - 1];
        if let Some(j) = self.r.iter().position(|&x| x < rn) {
            return bad(format!("r_{} = {} is below r_n = {rn}", j + 1, self.r[j]));
        }
        Ok(())
    }
}

/// `M_n`: `f1·J + (d - f1)·I` in the leading `(n-1)×(n-1)` block, last
/// column completing rows `i < n` to `r_i`, bottom row `f2` with corner
/// `r_n - (n-1)·f2`.
pub fn mn_matrix(params: &MnParams) -> Result<Matrix> {
    params.validate()?;
    let n = params.n;
    let k = (n - 2) as f64;
    let m = Matrix::from_fn(n, n, |i, j| match (i + 1 == n, j + 1 == n) {
        (false, false) if i == j => params.d,
        (false, false) => params.f1,
        (false, true) => params.r[i] - params.d - k * params.f1,
        (true, false) => params.f2,
        (true, true) => params.r[n - 1] - (n - 1) as f64 * params.f2,
    });
    debug_assert!(crate::rooted::is_rooted_matrix(&m).map(|r| r.is_rooted()).unwrap_or(false));
    Ok(m)
}

fn mn_formula(n: usize, d: f64, f1: f64, f2: f64, r: &[f64]) -> f64 {
    let rn = r[n - 1];
    let k = n as f64 - 2.0;
    let spread: f64 = r[..n - 1].iter().map(|x| x - rn).sum();
    let b = rn - d + f2 - k * (f1 - f2);
    0.5 * (rn + d - f2 + k * (f1 - f2)) + 0.5 * (b * b + 4.0 * f2 * spread).sqrt()
}

/// Closed form of `ρ_r(M_n)`.
pub fn mn_rho_closed_form(params: &MnParams) -> Result<f64> {
    params.validate()?;
    Ok(mn_formula(params.n, params.d, params.f1, params.f2, &params.r))
}

/// Stable permutation sorting row sums in decreasing order.
fn descending_order(r: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&a, &b| r[b].total_cmp(&r[a]));
    order
}

fn check_ell(n: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell > n {
        return Err(Error::InvalidParams(format!("ell must lie in 1..={n}, got {ell}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DuanZhou {
    pub bound: f64,
    pub ell: usize,
    pub d: f64,
    pub f: f64,
    /// 1-based original row indices in decreasing row-sum order.
    pub permutation: Vec<usize>,
    pub sorted_row_sums: Vec<f64>,
    pub equality: Equality,
    /// Least 1-based `t` with `r_t = r_ℓ`, when equality was examined.
    pub t: Option<usize>,
    pub detail: String,
}

/// The row-sum bound with diagonal maximum `d` and off-diagonal maximum `f`.
pub fn duan_zhou_bound(c: &Matrix, ell: usize) -> Result<DuanZhou> {
    let n = c.order()?;
    c.require_nonnegative()?;
    check_ell(n, ell)?;
    let order = descending_order(&c.row_sums());
    let cs = c.permute(&order);
    let r = cs.row_sums();
    let d = (0..n).map(|i| cs[(i, i)]).fold(0.0, f64::max);
    let f = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| cs[(i, j)])
        .fold(0.0, f64::max);
    let rl = r[ell - 1];
    let bound = row_sum_bound(&r, ell, d, f);

    let tol = 1e-12 * (1.0 + r[0]);
    let same = |a: f64, b: f64| (a - b).abs() <= tol;
    let (equality, t, detail) = if !c.is_irreducible() {
        (Equality::Undetermined, None, "C is reducible".to_string())
    } else if same(r[0], r[n - 1]) {
        (Equality::Equality, None, "all row sums are equal".to_string())
    } else {
        let t = (0..ell).find(|&i| same(r[i], rl)).unwrap() + 1;
        if !same(r[t - 1], r[n - 1]) {
            (Equality::Strict, Some(t), format!("r_{t} differs from r_n"))
        } else {
            let bad = (0..n).flat_map(|i| (0..t - 1).map(move |j| (i, j))).find(|&(i, j)| {
                let want = if i == j { d } else { f };
                cs[(i, j)] != want
            });
            match bad {
                None => (Equality::Equality, Some(t), format!("columns before {t} match the d/f pattern")),
                Some((i, j)) => (
                    Equality::Strict,
                    Some(t),
                    format!("sorted entry ({}, {}) breaks the d/f pattern", i + 1, j + 1),
                ),
            }
        }
    };
    Ok(DuanZhou {
        bound,
        ell,
        d,
        f,
        permutation: order.iter().map(|i| i + 1).collect(),
        sorted_row_sums: r,
        equality,
        t,
        detail,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinedDuanZhou {
    /// The smaller of `restricted` and `two_parameter`.
    pub bound: f64,
    pub ell: usize,
    /// Largest of the first `ℓ-1` diagonal entries of the sorted matrix.
    pub d: f64,
    /// Largest off-diagonal entry in the first `ℓ-1` columns.
    pub f1: f64,
    /// Largest entry of rows `ℓ..n` in the first `ℓ-1` columns.
    pub f2: f64,
    /// Row-sum bound evaluated with the restricted `d` and `f = f1`.
    pub restricted: f64,
    /// `ρ_r(M_ℓ)` with separate `f1` and `f2`.
    pub two_parameter: f64,
    pub permutation: Vec<usize>,
    pub duan_zhou: f64,
}

fn row_sum_bound(r: &[f64], ell: usize, d: f64, f: f64) -> f64 {
    let rl = r[ell - 1];
    let spread: f64 = r[..ell - 1].iter().map(|x| x - rl).sum();
    0.5 * (rl + d - f + ((rl - d + f).powi(2) + 4.0 * f * spread).sqrt())
}

/// The row-sum bound with its maxima restricted to the first `ℓ-1` columns
/// of the row-sum-sorted matrix. Two valid forms are evaluated and the
/// smaller is returned: the single-`f` form, which never exceeds
/// [`duan_zhou_bound`], and the `M_ℓ` closed form with separate `f1`, `f2`,
/// which can be smaller still but is not monotone in `f1`.
pub fn refined_duan_zhou(c: &Matrix, ell: usize) -> Result<RefinedDuanZhou> {
    let dz = duan_zhou_bound(c, ell)?;
    let n = c.order()?;
    let order: Vec<usize> = dz.permutation.iter().map(|i| i - 1).collect();
    let cs = c.permute(&order);
    let r = &dz.sorted_row_sums;
    let k = ell - 1;
    let max_over = |it: &mut dyn Iterator<Item = (usize, usize)>| it.map(|(i, j)| cs[(i, j)]).fold(0.0, f64::max);
    let f1 = max_over(&mut (0..n).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))));
    let f2 = max_over(&mut (k..n).flat_map(|i| (0..k).map(move |j| (i, j))));
    let d = max_over(&mut (0..k).map(|i| (i, i)));
    let restricted = row_sum_bound(r, ell, d, f1);
    let two_parameter = if ell == 1 { r[0] } else { mn_formula(ell, d, f1, f2, r) };
    debug_assert!(restricted <= dz.bound + 1e-10 * (1.0 + dz.bound), "{restricted} > {}", dz.bound);
    Ok(RefinedDuanZhou {
        bound: restricted.min(two_parameter),
        ell,
        d,
        f1,
        f2,
        restricted,
        two_parameter,
        permutation: dz.permutation,
        duan_zhou: dz.bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EntrySum {
    pub bound: f64,
    pub m: f64,
    pub d: f64,
    pub f: f64,
    pub equality: bool,
    /// Size of the block carrying all nonzero entries, when equality holds
    /// with `f > 0`.
    pub k: Option<usize>,
    /// 1-based indices of that block.
    pub support: Vec<usize>,
}

/// `ρ(C) ≤ (d - f + √((d - f)² + 4mf)) / 2` with `m` the entry sum. Equality
/// holds exactly when, up to a simultaneous permutation,
/// `C = (f·J_k + (d - f)·I_k) ⊕ O`.
pub fn entrysum_bound(c: &Matrix) -> Result<EntrySum> {
    let n = c.order()?;
    c.require_nonnegative()?;
    let m = c.sum();
    let d = (0..n).map(|i| c[(i, i)]).fold(0.0, f64::max);
    let f = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| c[(i, j)])
        .fold(0.0, f64::max);
    if f == 0.0 {
        // Diagonal: ρ(C) = d.
        return Ok(EntrySum {
            bound: d,
            m,
            d,
            f,
            equality: true,
            k: None,
            support: Vec::new(),
        });
    }
    let bound = 0.5 * (d - f + ((d - f).powi(2) + 4.0 * m * f).sqrt());
    let support: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| c[(i, j)] != 0.0 || c[(j, i)] != 0.0))
        .collect();
    let equality = support.iter().all(|&i| {
        support.iter().all(|&j| c[(i, j)] == if i == j { d } else { f })
    });
    Ok(EntrySum {
        bound,
        m,
        d,
        f,
        equality,
        k: equality.then_some(support.len()),
        support: if equality {
            support.iter().map(|i| i + 1).collect()
        } else {
            Vec::new()
        },
    })
}

/// `(-1 + √(1 + 8e)) / 2`.
pub fn stanley_bound(e: u64) -> f64 {
    (-1.0 + (1.0 + 8.0 * e as f64).sqrt()) / 2.0
}
