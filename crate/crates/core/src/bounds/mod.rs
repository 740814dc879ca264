//! Upper and lower bounds on `ρ(C)` from a partition `Π` and a rooted
//! matrix `M` that dominates (or is dominated by) the block row sums of `C`.

mod certificate;
mod closed_form;

pub use certificate::{comparison_certificate, CertificateReport, Ordering};
pub use closed_form::{
    duan_zhou_bound, entrysum_bound, mn_matrix, mn_rho_closed_form, refined_duan_zhou,
    stanley_bound, DuanZhou, EntrySum, MnParams, RefinedDuanZhou,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::partition::{block_row_sums, is_equitable, Partition};
use crate::rooted::{is_rooted_matrix, is_strictly_rooted_vector, RootedViolation, Rootedness};
use crate::spectral::{rho_r_rooted, spectral_radius_nonneg, PowerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equality {
    Equality,
    Strict,
    Undetermined,
}

/// A failed block condition. Indices are 1-based; `block_b` is `None` for
/// the total row-sum condition. `row` is the row that violates it most.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisViolation {
    pub block_a: usize,
    pub block_b: Option<usize>,
    pub row: usize,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub ok: bool,
    pub violations: Vec<HypothesisViolation>,
}

/// The partition-free form of the equality test, available when the bottom
/// row of `M` is positive and its row sums are strictly rooted.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryForm {
    pub equitable: bool,
    pub quotient_matches: bool,
    pub equality: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityDiagnosis {
    pub reason: String,
    pub irreducible: bool,
    /// Row sums meet `Σ_c m_ac` (vacuous when `u_ℓ = 0`).
    pub condition_a: Option<bool>,
    /// Block sums meet `m_ab` wherever `u_b > u_ℓ`.
    pub condition_b: Option<bool>,
    /// Blocks `b` (1-based) with `u_b > u_ℓ`.
    pub tight_blocks: Vec<usize>,
    pub corollary: Option<CorollaryForm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub direction: Direction,
    pub bound: f64,
    pub m_used: Matrix,
    pub m_shift: f64,
    pub hypothesis_ok: bool,
    pub violations: Vec<HypothesisViolation>,
    pub equality: Equality,
    pub diagnosis: EqualityDiagnosis,
    /// Rooted eigenvector of `M` for `ρ_r(M)`, unit 1-norm.
    pub eigenvector_u: Vec<f64>,
    pub rho_c: f64,
    pub rho_c_cw_lower: f64,
    pub rho_c_cw_upper: f64,
    /// The bound is on the right side of the Collatz–Wielandt bracket of `ρ(C)`.
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalM {
    pub m: Matrix,
    pub rooted: bool,
    pub shift: Option<f64>,
    pub violations: Vec<RootedViolation>,
}

fn check_shapes(c: &Matrix, p: &Partition, m: &Matrix) -> Result<()> {
    let n = c.order()?;
    if p.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has order {n} but partition covers {} indices",
            p.n()
        )));
    }
    let ell = m.order()?;
    if ell != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "M has order {ell} but partition has {} blocks",
            p.len()
        )));
    }
    c.require_nonnegative()
}

fn bound_tol(c: &Matrix, m: &Matrix) -> f64 {
    let rmax = c.row_sums().into_iter().fold(0.0, f64::max);
    1e-10 * (1.0 + rmax + m.max_abs() * m.rows() as f64)
}

fn check_hypotheses(c: &Matrix, p: &Partition, m: &Matrix, dir: Direction) -> Result<HypothesisCheck> {
    check_shapes(c, p, m)?;
    let tol = bound_tol(c, m);
    let ell = p.len();
    let sums = block_row_sums(c, p)?;
    let r = c.row_sums();
    let msum = m.row_sums();
    let mut violations = Vec::new();

    // Worse is larger for the upper bound and smaller for the lower bound.
    let worst = |rows: &[usize], value: &dyn Fn(usize) -> f64| -> (usize, f64) {
        let mut best = (rows[0], value(rows[0]));
        for &i in &rows[1..] {
            let v = value(i);
            let worse = match dir {
                Direction::Upper => v > best.1,
                Direction::Lower => v < best.1,
            };
            if worse {
                best = (i, v);
            }
        }
        best
    };
    let fails = |value: f64, limit: f64| match dir {
        Direction::Upper => value > limit + tol,
        Direction::Lower => value < limit - tol,
    };

    for a in 0..ell {
        let rows = p.block(a);
        for b in 0..ell - 1 {
            let (row, value) = worst(rows, &|i| sums[(i, b)]);
            if fails(value, m[(a, b)]) {
                violations.push(HypothesisViolation {
                    block_a: a + 1,
                    block_b: Some(b + 1),
                    row: row + 1,
                    value,
                    limit: m[(a, b)],
                });
            }
        }
        let (row, value) = worst(rows, &|i| r[i]);
        if fails(value, msum[a]) {
            violations.push(HypothesisViolation {
                block_a: a + 1,
                block_b: None,
                row: row + 1,
                value,
                limit: msum[a],
            });
        }
    }
    Ok(HypothesisCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// `max_{i∈π_a} Σ_{j∈π_b} c_ij ≤ m_ab` for `b < ℓ` and
/// `max_{i∈π_a} r_i ≤ Σ_c m_ac`.
pub fn check_upper_hypotheses(c: &Matrix, p: &Partition, m: &Matrix) -> Result<HypothesisCheck> {
    check_hypotheses(c, p, m, Direction::Upper)
}

/// The same conditions with every row of a block dominating `M`:
/// `min_{i∈π_a} Σ_{j∈π_b} c_ij ≥ m_ab` and `min_{i∈π_a} r_i ≥ Σ_c m_ac`.
pub fn check_lower_hypotheses(c: &Matrix, p: &Partition, m: &Matrix) -> Result<HypothesisCheck> {
    check_hypotheses(c, p, m, Direction::Lower)
}

fn canonical(c: &Matrix, p: &Partition, dir: Direction) -> Result<CanonicalM> {
    let n = c.order()?;
    if p.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has order {n} but partition covers {} indices",
            p.n()
        )));
    }
    let ell = p.len();
    let sums = block_row_sums(c, p)?;
    let r = c.row_sums();
    let pick = |vals: &mut dyn Iterator<Item = f64>| -> f64 {
        match dir {
            Direction::Upper => vals.fold(f64::NEG_INFINITY, f64::max),
            Direction::Lower => vals.fold(f64::INFINITY, f64::min),
        }
    };
    let mut m = Matrix::zeros(ell, ell);
    for a in 0..ell {
        let rows = p.block(a);
        let mut acc = 0.0;
        for b in 0..ell - 1 {
            m[(a, b)] = pick(&mut rows.iter().map(|&i| sums[(i, b)]));
            acc += m[(a, b)];
        }
        m[(a, ell - 1)] = pick(&mut rows.iter().map(|&i| r[i])) - acc;
    }
    Ok(match is_rooted_matrix(&m)? {
        Rootedness::Rooted(cert) => CanonicalM {
            m,
            rooted: true,
            shift: Some(cert.shift),
            violations: Vec::new(),
        },
        Rootedness::NotRooted(violations) => CanonicalM {
            m,
            rooted: false,
            shift: None,
            violations,
        },
    })
}

/// The smallest `M` meeting the upper-bound hypotheses with equality: block
/// row-sum maxima in the first `ℓ-1` columns and the last column chosen so
/// row `a` sums to `max_{i∈π_a} r_i`.
pub fn canonical_m(c: &Matrix, p: &Partition) -> Result<CanonicalM> {
    canonical(c, p, Direction::Upper)
}

/// The largest `M` meeting the lower-bound hypotheses, built from minima.
pub fn canonical_m_lower(c: &Matrix, p: &Partition) -> Result<CanonicalM> {
    canonical(c, p, Direction::Lower)
}

/// `ρ(C) ≤ ρ_r(M)` with the equality diagnosis.
pub fn upper_bound(c: &Matrix, p: &Partition, m: &Matrix, opts: &PowerOptions) -> Result<BoundReport> {
    bound(c, p, m, opts, Direction::Upper)
}

/// `ρ(C) ≥ ρ_r(M)` under the min-form hypotheses.
pub fn lower_bound(c: &Matrix, p: &Partition, m: &Matrix, opts: &PowerOptions) -> Result<BoundReport> {
    bound(c, p, m, opts, Direction::Lower)
}

fn bound(c: &Matrix, p: &Partition, m: &Matrix, opts: &PowerOptions, dir: Direction) -> Result<BoundReport> {
    let hyp = check_hypotheses(c, p, m, dir)?;
    let rr = rho_r_rooted(m, opts)?;
    let bound = rr.value.expect("rooted matrices have a real eigenvalue");
    let u = rr.eigenvector.expect("rooted route returns an eigenvector");
    let rho = spectral_radius_nonneg(c, opts)?;

    let slack = 1e-9 * (1.0 + bound.abs());
    let consistent = !hyp.ok
        || match dir {
            Direction::Upper => bound >= rho.cw_lower - slack,
            Direction::Lower => bound <= rho.cw_upper + slack,
        };

    let mu = m.mul_vec(&u)?;
    let residual = mu
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - bound * b).abs())
        .sum::<f64>();
    let residual_ok = residual <= 1e-8 * (1.0 + bound.abs() + m.max_abs());

    let diagnosis = diagnose(c, p, m, &u, hyp.ok, residual_ok)?;
    let equality = match (diagnosis.condition_a, diagnosis.condition_b) {
        (Some(a), Some(b)) => {
            if a && b {
                Equality::Equality
            } else {
                Equality::Strict
            }
        }
        _ => Equality::Undetermined,
    };

    Ok(BoundReport {
        direction: dir,
        bound,
        m_used: m.clone(),
        m_shift: rr.shift.unwrap_or(0.0),
        hypothesis_ok: hyp.ok,
        violations: hyp.violations,
        equality,
        diagnosis,
        eigenvector_u: u,
        rho_c: rho.value,
        rho_c_cw_lower: rho.cw_lower,
        rho_c_cw_upper: rho.cw_upper,
        consistent,
    })
}

fn diagnose(
    c: &Matrix,
    p: &Partition,
    m: &Matrix,
    u: &[f64],
    hypothesis_ok: bool,
    residual_ok: bool,
) -> Result<EqualityDiagnosis> {
    let irreducible = c.is_irreducible();
    let mut diag = EqualityDiagnosis {
        reason: String::new(),
        irreducible,
        condition_a: None,
        condition_b: None,
        tight_blocks: Vec::new(),
        corollary: None,
    };
    if !hypothesis_ok {
        diag.reason = "hypotheses do not hold".into();
        return Ok(diag);
    }
    if !irreducible {
        diag.reason = "C is reducible".into();
        return Ok(diag);
    }
    if !residual_ok {
        diag.reason = "eigenvector of M is not accurate enough".into();
        return Ok(diag);
    }

    let ell = p.len();
    let tol = bound_tol(c, m);
    let sums = block_row_sums(c, p)?;
    let r = c.row_sums();
    let msum = m.row_sums();
    let u_last = u[ell - 1];

    let cond_a = u_last <= 1e-10
        || (0..c.rows()).all(|i| (r[i] - msum[p.block_of(i)]).abs() <= tol);
    diag.tight_blocks = (0..ell - 1)
        .filter(|&b| u[b] > u_last + 1e-10)
        .map(|b| b + 1)
        .collect();
    let cond_b = diag.tight_blocks.iter().all(|&b| {
        (0..c.rows()).all(|i| (sums[(i, b - 1)] - m[(p.block_of(i), b - 1)]).abs() <= tol)
    });
    diag.condition_a = Some(cond_a);
    diag.condition_b = Some(cond_b);

    let bottom_positive = (0..ell - 1).all(|b| m[(ell - 1, b)] > 0.0);
    if bottom_positive && is_strictly_rooted_vector(&msum) {
        let chk = is_equitable(c, p, Some(tol))?;
        let quotient_matches = chk
            .quotient
            .data()
            .iter()
            .zip(m.data())
            .all(|(a, b)| (a - b).abs() <= tol);
        diag.corollary = Some(CorollaryForm {
            equitable: chk.equitable,
            quotient_matches,
            equality: chk.equitable && quotient_matches,
        });
    }
    diag.reason = if cond_a && cond_b {
        "all tight block sums and row sums are met".into()
    } else if !cond_a {
        "some row sum falls short of the row sum of M".into()
    } else {
        "some tight block sum differs from M".into()
    };
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    pub(crate) fn worked_example() -> (Matrix, Partition) {
        let c = m(&[
            &[2.0, 1.0, 3.0, 3.0, 3.0, 12.0, 0.0],
            &[4.0, 2.0, 1.0, 4.0, 2.0, 6.0, 4.0],
            &[2.0, 3.0, 1.0, 4.0, 1.0, 8.0, 3.0],
            &[3.0, 5.0, 3.0, 1.0, 1.0, 3.0, 4.0],
            &[5.0, 6.0, 1.0, 1.0, 0.0, 3.0, 3.0],
            &[0.0, 2.0, 1.0, 2.0, 2.0, 6.0, 0.0],
            &[2.0, 2.0, 0.0, 2.0, 1.0, 1.0, 4.0],
        ]);
        let p = Partition::new(7, vec![vec![0, 1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        (c, p)
    }

    fn opts() -> PowerOptions {
        PowerOptions::default()
    }

    #[test]
    fn worked_example_bound() {
        let (c, p) = worked_example();
        let cm = canonical_m(&c, &p).unwrap();
        let expected = m(&[&[7.0, 6.0, 11.0], &[12.0, 2.0, 6.0], &[4.0, 4.0, 5.0]]);
        assert_eq!(cm.m, expected);
        assert!(cm.rooted);
        assert!(check_upper_hypotheses(&c, &p, &expected).unwrap().ok);
        let rep = upper_bound(&c, &p, &expected, &opts()).unwrap();
        assert!((rep.bound - 18.6936).abs() < 1e-4);
        assert_eq!(rep.equality, Equality::Strict);
        assert!(rep.rho_c < rep.bound);
        assert!(rep.consistent);
        let cor = rep.diagnosis.corollary.unwrap();
        assert!(!cor.equitable && !cor.equality);
    }

    #[test]
    fn lowered_entry_is_reported() {
        let (c, p) = worked_example();
        let low = m(&[&[6.0, 6.0, 11.0], &[12.0, 2.0, 6.0], &[4.0, 4.0, 5.0]]);
        let chk = check_upper_hypotheses(&c, &p, &low).unwrap();
        assert!(!chk.ok);
        assert_eq!(chk.violations.len(), 2);
        assert_eq!((chk.violations[0].block_a, chk.violations[0].block_b), (1, Some(1)));
        assert_eq!(chk.violations[0].row, 2);
        assert_eq!(chk.violations[1].block_b, None);
        let rep = upper_bound(&c, &p, &low, &opts()).unwrap();
        assert!(!rep.hypothesis_ok);
        assert_eq!(rep.equality, Equality::Undetermined);
    }

    #[test]
    fn all_ones_equality_both_ways() {
        let c = Matrix::ones(4, 4);
        let p = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let mm = m(&[&[2.0, 2.0], &[2.0, 2.0]]);
        assert_eq!(canonical_m(&c, &p).unwrap().m, mm);
        for rep in [
            upper_bound(&c, &p, &mm, &opts()).unwrap(),
            lower_bound(&c, &p, &mm, &opts()).unwrap(),
        ] {
            assert!(rep.hypothesis_ok);
            assert!((rep.bound - 4.0).abs() < 1e-12);
            assert_eq!(rep.equality, Equality::Equality);
            // Row sums of M are equal, so the partition-free form is silent.
            assert!(rep.diagnosis.corollary.is_none());
        }
    }

    #[test]
    fn single_block_is_row_sum_bound() {
        let c = m(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0], &[3.0, 0.0, 1.0]]);
        let p = Partition::new(3, vec![vec![0, 1, 2]]).unwrap();
        let up = upper_bound(&c, &p, &m(&[&[4.0]]), &opts()).unwrap();
        assert_eq!(up.bound, 4.0);
        assert_eq!(up.equality, Equality::Strict);
        let lo = lower_bound(&c, &p, &m(&[&[2.0]]), &opts()).unwrap();
        assert_eq!(lo.bound, 2.0);
        assert!(lo.rho_c >= 2.0);
        assert_eq!(canonical_m_lower(&c, &p).unwrap().m, m(&[&[2.0]]));
    }

    #[test]
    fn lower_bound_strict_with_defective_m() {
        let c = m(&[&[3.0, 1.0, 1.0], &[1.0, 0.0, 2.0], &[1.0, 1.0, 1.0]]);
        let cl = m(&[&[3.0, 1.0, 1.0], &[0.0, 0.0, 3.0], &[0.0, 1.0, 2.0]]);
        let rep = lower_bound(&c, &Partition::identity(3), &cl, &opts()).unwrap();
        assert!(rep.hypothesis_ok);
        assert!((rep.bound - 3.0).abs() < 1e-9);
        assert_eq!(rep.equality, Equality::Strict);
        assert_eq!(rep.diagnosis.tight_blocks, vec![1]);

        let cr = m(&[&[3.0, 2.0, 0.0], &[1.0, 2.0, 0.0], &[1.0, 2.0, 0.0]]);
        let rep = upper_bound(&c, &Partition::identity(3), &cr, &opts()).unwrap();
        assert!((rep.bound - 4.0).abs() < 1e-9);
        assert_eq!(rep.equality, Equality::Equality);
    }

    #[test]
    fn identity_partition_keeps_rows() {
        let c = m(&[&[1.0, 2.0, 3.0], &[0.0, 5.0, 1.0], &[2.0, 2.0, 2.0]]);
        let cm = canonical_m(&c, &Partition::identity(3)).unwrap();
        assert_eq!(cm.m, c);
    }

    #[test]
    fn non_rooted_m_is_an_error() {
        let c = Matrix::ones(2, 2);
        let bad = m(&[&[0.0, 1.0], &[2.0, 0.0]]);
        assert!(matches!(
            upper_bound(&c, &Partition::identity(2), &bad, &opts()),
            Err(Error::NotRooted(_))
        ));
        assert!(matches!(
            upper_bound(&c, &Partition::identity(3), &bad, &opts()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn reducible_is_undetermined() {
        let c = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let p = Partition::identity(2);
        let cm = canonical_m(&c, &p).unwrap();
        let rep = upper_bound(&c, &p, &cm.m, &opts()).unwrap();
        assert_eq!(rep.equality, Equality::Undetermined);
        assert!(rep.bound >= rep.rho_c - 1e-9);
    }
}
