use std::cmp::Ordering;

use itertools::Itertools;
use serde::Serialize;

use super::{
    block_statistics, bound_matrix, construct_a0, construct_a0_prime, enumerate_staircase,
    ExtremalParams,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rooted::is_rooted_matrix;
use crate::spectral::{rho_r_rooted, spectral_radius_nonneg, PowerOptions};

/// Spectral radii closer than this are ties.
const TIE_TOL: f64 = 1e-10;
/// Largest order searched over all permutations when canonicalizing.
const MAX_PERMUTED_ORDER: usize = 8;
const FULL_MAX_ORDER: usize = 3;

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub budget: usize,
    /// Search every (0,1)-matrix instead of the staircase class (`n ≤ 3`).
    pub full: bool,
    /// Check `ρ(A) ≤ ρ_r(M)` for the bound matrix of every candidate.
    pub check_bounds: bool,
    pub power: PowerOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 1_000_000,
            full: false,
            check_bounds: true,
            power: PowerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub params: ExtremalParams,
    pub full_search: bool,
    pub candidates_examined: usize,
    /// Canonical form of the best matrix.
    pub maximizer: Matrix,
    pub max_rho: f64,
    /// Classes (up to permutation and transpose) tied for the maximum.
    pub co_maximizers: usize,
    pub unique: bool,
    pub matches_a0: bool,
    pub matches_a0_prime: bool,
    pub runner_up: Option<Matrix>,
    pub runner_up_rho: Option<f64>,
    pub runner_up_classes: usize,
    pub runner_up_matches_a0: bool,
    pub bound_checks: usize,
    pub bound_skipped: usize,
    pub bound_violations: usize,
}

fn key(a: &Matrix) -> Vec<f64> {
    let mut k = a.row_sums();
    k.extend_from_slice(a.data());
    k
}

fn cmp_keys(x: &[f64], y: &[f64]) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Normal form under simultaneous row/column permutation and transposition:
/// the representative with the lexicographically largest row-sum vector,
/// ties broken by entries. Orders above 8 are only normalized by transpose.
pub fn canonical_form(a: &Matrix) -> Result<Matrix> {
    let n = a.order()?;
    let at = a.transpose();
    let mut best: Option<(Vec<f64>, Matrix)> = None;
    let mut consider = |m: Matrix| {
        let k = key(&m);
        if best.as_ref().is_none_or(|(bk, _)| cmp_keys(&k, bk).is_gt()) {
            best = Some((k, m));
        }
    };
    if n > MAX_PERMUTED_ORDER {
        consider(a.clone());
        consider(at);
    } else {
        for src in [a, &at] {
            let r = src.row_sums();
            for perm in (0..n).permutations(n) {
                if perm.windows(2).all(|w| r[w[0]] >= r[w[1]]) {
                    consider(src.permute(&perm));
                }
            }
        }
    }
    Ok(best.expect("at least one representative").1)
}

/// Equal up to a simultaneous permutation and transposition.
pub fn equivalent(a: &Matrix, b: &Matrix) -> Result<bool> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

fn all_zero_one(n: usize, e: usize, zero_trace: bool) -> impl Iterator<Item = Matrix> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(zero_trace && i == j))
        .collect();
    let k = slots.len();
    (0..k).combinations(e).map(move |chosen| {
        let mut a = Matrix::zeros(n, n);
        for idx in chosen {
            a[slots[idx]] = 1.0;
        }
        a
    })
}

/// Candidates tied at the top two spectral-radius levels.
#[derive(Default)]
struct Leaders {
    best: Option<(f64, Vec<Matrix>)>,
    second: Option<(f64, Vec<Matrix>)>,
}

impl Leaders {
    fn push(&mut self, rho: f64, a: Matrix) {
        match &mut self.best {
            None => self.best = Some((rho, vec![a])),
            Some((b, group)) => {
                if rho > *b + TIE_TOL {
                    self.second = self.best.replace((rho, vec![a]));
                } else if (rho - *b).abs() <= TIE_TOL {
                    group.push(a);
                } else {
                    match &mut self.second {
                        Some((s, g)) if (rho - *s).abs() <= TIE_TOL => g.push(a),
                        Some((s, _)) if rho < *s => {}
                        _ => self.second = Some((rho, vec![a])),
                    }
                }
            }
        }
    }
}

/// Distinct canonical forms, sorted by decreasing key.
fn classes(group: &[Matrix]) -> Result<Vec<Matrix>> {
    let mut forms: Vec<Matrix> = group.iter().map(canonical_form).collect::<Result<_>>()?;
    forms.sort_by(|x, y| cmp_keys(&key(y), &key(x)));
    forms.dedup();
    Ok(forms)
}

/// Exhaustive maximization of `ρ` over the staircase class with `e` ones
/// (or over every (0,1)-matrix with `full`), compared with the conjectured
/// maximizers.
pub fn verify_conjecture(n: usize, e: usize, zero_trace: bool, opts: &SearchOptions) -> Result<SearchReport> {
    let params = ExtremalParams::decompose(n, e, zero_trace);
    if opts.full && n > FULL_MAX_ORDER {
        return Err(Error::InvalidParams(format!(
            "the full search is limited to n ≤ {FULL_MAX_ORDER}"
        )));
    }
    let candidates: Box<dyn Iterator<Item = Matrix>> = if opts.full {
        let max = if zero_trace { n * n - n } else { n * n };
        if e > max {
            return Err(Error::InvalidParams(format!(
                "e = {e} exceeds the {max} available positions"
            )));
        }
        Box::new(all_zero_one(n, e, zero_trace))
    } else {
        Box::new(enumerate_staircase(n, e, zero_trace)?)
    };

    let check_bounds = opts.check_bounds && !opts.full && params.c >= 1 && params.c < n && params.t <= params.t_max();
    let mut leaders = Leaders::default();
    let mut examined = 0usize;
    let (mut checks, mut skipped, mut violations) = (0usize, 0usize, 0usize);
    for a in candidates {
        examined += 1;
        if examined > opts.budget {
            return Err(Error::BudgetExceeded { budget: opts.budget });
        }
        let rho = spectral_radius_nonneg(&a, &opts.power)?.value;
        if check_bounds {
            let st = block_statistics(&a, params.c, zero_trace)?;
            match bound_matrix(&st, zero_trace) {
                Ok(m) if is_rooted_matrix(&m)?.is_rooted() => {
                    checks += 1;
                    let bound = rho_r_rooted(&m, &opts.power)?.value.expect("rooted");
                    if rho > bound + 1e-8 {
                        violations += 1;
                    }
                }
                _ => skipped += 1,
            }
        }
        leaders.push(rho, a);
    }
    let (max_rho, top) = leaders.best.ok_or_else(|| {
        Error::InvalidParams(format!("no {n}×{n} candidates with {e} ones"))
    })?;
    let top = classes(&top)?;
    let (runner_up_rho, second) = match leaders.second {
        Some((r, g)) => (Some(r), classes(&g)?),
        None => (None, Vec::new()),
    };

    let a0 = if params.validate().is_ok() {
        Some(canonical_form(&construct_a0(&params)?)?)
    } else {
        None
    };
    let a0_prime = if !zero_trace && params.c >= 3 && params.t + 3 == 2 * params.c {
        Some(canonical_form(&construct_a0_prime(params.c, n)?)?)
    } else {
        None
    };
    let is = |forms: &[Matrix], target: &Option<Matrix>| -> bool {
        forms.len() == 1 && target.as_ref() == Some(&forms[0])
    };

    Ok(SearchReport {
        params,
        full_search: opts.full,
        candidates_examined: examined,
        maximizer: top[0].clone(),
        max_rho,
        co_maximizers: top.len(),
        unique: top.len() == 1,
        matches_a0: is(&top, &a0),
        matches_a0_prime: is(&top, &a0_prime),
        runner_up: second.first().cloned(),
        runner_up_rho,
        runner_up_classes: second.len(),
        runner_up_matches_a0: is(&second, &a0),
        bound_checks: checks,
        bound_skipped: skipped,
        bound_violations: violations,
    })
}
