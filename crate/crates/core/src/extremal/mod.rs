//! Extremal (0,1)-matrices with a prescribed number of ones: the conjectured
//! maximizers, staircase enumeration and exhaustive verification.

mod poly;
mod search;
mod staircase;

pub use poly::{
    conjecture_polynomials, f_poly, g_poly, h_poly, quotient_matrices_6_1, ConjecturePolynomials,
    Polynomial,
};
pub use search::{canonical_form, equivalent, verify_conjecture, SearchOptions, SearchReport};
pub use staircase::{
    block_statistics, bound_matrix, enumerate_staircase, is_staircase, BlockStatistics,
    StaircaseIter,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `e = c² + t` (or `e = c(c-1) + t` with zero trace) in an `n×n` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalParams {
    pub n: usize,
    pub e: usize,
    pub c: usize,
    pub t: usize,
    pub zero_trace: bool,
}

/// `c²`, or `c(c-1)` with zero trace.
pub(crate) fn core_ones(c: usize, zero_trace: bool) -> usize {
    if zero_trace {
        c * c.saturating_sub(1)
    } else {
        c * c
    }
}

impl ExtremalParams {
    pub fn new(n: usize, c: usize, t: usize, zero_trace: bool) -> Result<Self> {
        let p = ExtremalParams {
            n,
            e: core_ones(c, zero_trace) + t,
            c,
            t,
            zero_trace,
        };
        p.validate()?;
        Ok(p)
    }

    /// Splits `e` with `c` as large as possible, so `0 ≤ t ≤ 2c`
    /// (`2c - 1` with zero trace). No range check on `t`.
    pub fn decompose(n: usize, e: usize, zero_trace: bool) -> Self {
        let mut c = e.isqrt();
        if zero_trace {
            c += 1;
            while core_ones(c, true) > e {
                c -= 1;
            }
        }
        ExtremalParams {
            n,
            e,
            c,
            t: e - core_ones(c, zero_trace),
            zero_trace,
        }
    }

    /// Largest admissible `t`.
    pub fn t_max(&self) -> usize {
        if self.zero_trace {
            (2 * self.c).saturating_sub(1)
        } else {
            2 * self.c
        }
    }

    /// The range `2 ≤ t ≤ t_max` and `n ≥ c + 1`.
    pub fn validate(&self) -> Result<()> {
        if self.e != core_ones(self.c, self.zero_trace) + self.t {
            return Err(Error::InvalidParams(format!(
                "e = {} does not split as c = {}, t = {}",
                self.e, self.c, self.t
            )));
        }
        if self.t < 2 || self.t > self.t_max() {
            return Err(Error::InvalidParams(format!(
                "t = {} must lie in 2..={} for c = {}",
                self.t,
                self.t_max(),
                self.c
            )));
        }
        if self.n < self.c + 1 {
            return Err(Error::InvalidParams(format!(
                "n = {} must be at least c + 1 = {}",
                self.n,
                self.c + 1
            )));
        }
        Ok(())
    }
}

fn core(n: usize, c: usize, zero_trace: bool) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i < c && j < c && !(zero_trace && i == j) {
            1.0
        } else {
            0.0
        }
    })
}

/// `J_c` (or `J_c - I_c`) bordered by `⌊t/2⌋` ones down column `c+1` and
/// `⌈t/2⌉` ones along row `c+1`, padded with zeros to order `n`.
pub fn construct_a0(params: &ExtremalParams) -> Result<Matrix> {
    params.validate()?;
    let ExtremalParams { n, c, t, zero_trace, .. } = *params;
    let mut a = core(n, c, zero_trace);
    for i in 0..t / 2 {
        a[(i, c)] = 1.0;
    }
    for j in 0..t.div_ceil(2) {
        a[(c, j)] = 1.0;
    }
    Ok(a)
}

/// `J_{c-1}` bordered by two full columns and two full rows with a zero
/// `2×2` corner, padded to order `n`; it has `c² + 2c - 3` ones.
pub fn construct_a0_prime(c: usize, n: usize) -> Result<Matrix> {
    if c < 3 {
        return Err(Error::InvalidParams(format!("c = {c} must be at least 3")));
    }
    if n < c + 1 {
        return Err(Error::InvalidParams(format!(
            "n = {n} must be at least c + 1 = {}",
            c + 1
        )));
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        let inner = |k: usize| k < c - 1;
        let border = |k: usize| k == c - 1 || k == c;
        if (inner(i) && (inner(j) || border(j))) || (border(i) && inner(j)) {
            1.0
        } else {
            0.0
        }
    }))
}

/// Maximizers for `t ∈ {0, 1}`: `J_c ⊕ O` for `t = 0`, one extra one
/// outside the core for `t = 1`. With zero trace and `e = 3` the directed
/// 3-cycle is returned as a second maximizer.
pub fn small_t_extremal(params: &ExtremalParams) -> Result<Vec<Matrix>> {
    let ExtremalParams { n, c, t, zero_trace, e } = *params;
    if e != core_ones(c, zero_trace) + t {
        return Err(Error::InvalidParams(format!(
            "e = {e} does not split as c = {c}, t = {t}"
        )));
    }
    match t {
        0 => {
            if n < c {
                return Err(Error::InvalidParams(format!("n = {n} must be at least c = {c}")));
            }
            Ok(vec![core(n, c, zero_trace)])
        }
        1 => {
            if n < c + 1 {
                return Err(Error::InvalidParams(format!(
                    "n = {n} must be at least c + 1 = {}",
                    c + 1
                )));
            }
            let mut a = core(n, c, zero_trace);
            a[(0, c)] = 1.0;
            let mut out = vec![a];
            if zero_trace && e == 3 {
                out.push(Matrix::from_fn(n, n, |i, j| {
                    if i < 3 && j == (i + 1) % 3 {
                        1.0
                    } else {
                        0.0
                    }
                }));
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParams(format!("t = {t} is not 0 or 1"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn ones(a: &Matrix) -> usize {
        a.sum() as usize
    }

    #[test]
    fn decompose_params() {
        let p = ExtremalParams::decompose(5, 12, false);
        assert_eq!((p.c, p.t), (3, 3));
        let p = ExtremalParams::decompose(5, 9, true);
        assert_eq!((p.c, p.t), (3, 3));
        let p = ExtremalParams::decompose(5, 3, true);
        assert_eq!((p.c, p.t), (2, 1));
        let p = ExtremalParams::decompose(4, 8, false);
        assert_eq!((p.c, p.t), (2, 4));
        assert!(ExtremalParams::new(3, 2, 2, false).is_ok());
        assert!(ExtremalParams::new(2, 2, 2, false).is_err());
        assert!(ExtremalParams::new(5, 2, 5, false).is_err());
        assert!(ExtremalParams::new(5, 2, 4, true).is_err());
    }

    #[test]
    fn a0_small() {
        let a = construct_a0(&ExtremalParams::new(4, 2, 2, false).unwrap()).unwrap();
        let want = m(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]])
            .direct_sum(&Matrix::zeros(1, 1));
        assert_eq!(a, want);
        assert_eq!(ones(&a), 6);
    }

    #[test]
    fn a0_zero_trace() {
        let a = construct_a0(&ExtremalParams::new(5, 3, 3, true).unwrap()).unwrap();
        assert_eq!(ones(&a), 9);
        assert!((0..5).all(|i| a[(i, i)] == 0.0));
        assert_eq!(a.column(3).iter().sum::<f64>(), 1.0);
        assert_eq!(a.row(3).iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn a0_ones_count() {
        for c in 1..8 {
            for zt in [false, true] {
                let p0 = ExtremalParams { n: 0, e: 0, c, t: 0, zero_trace: zt };
                for t in 2..=p0.t_max() {
                    let p = ExtremalParams::new(c + 3, c, t, zt).unwrap();
                    assert_eq!(ones(&construct_a0(&p).unwrap()), p.e);
                }
            }
        }
    }

    #[test]
    fn a0_prime_layout() {
        let a = construct_a0_prime(3, 5).unwrap();
        let want = m(&[
            &[1.0, 1.0, 1.0, 1.0, 0.0],
            &[1.0, 1.0, 1.0, 1.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0; 5],
        ]);
        assert_eq!(a, want);
        for c in 3..8 {
            assert_eq!(ones(&construct_a0_prime(c, c + 1).unwrap()), c * c + 2 * c - 3);
        }
        assert!(construct_a0_prime(2, 4).is_err());
        assert!(construct_a0_prime(3, 3).is_err());
    }

    #[test]
    fn small_t_forms() {
        let p = ExtremalParams::decompose(4, 9, false);
        let forms = small_t_extremal(&p).unwrap();
        assert_eq!(forms, vec![Matrix::ones(3, 3).direct_sum(&Matrix::zeros(1, 1))]);

        let p = ExtremalParams::decompose(3, 3, true);
        let forms = small_t_extremal(&p).unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[1], m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]));
        assert!(forms.iter().all(|a| ones(a) == 3));

        let p = ExtremalParams::decompose(5, 10, false);
        assert_eq!(ones(&small_t_extremal(&p).unwrap()[0]), 10);
        assert!(small_t_extremal(&ExtremalParams::decompose(5, 11, false)).is_err());
    }
}
