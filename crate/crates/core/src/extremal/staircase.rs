//! Staircase (0,1)-matrices: `a_ij = 1` forces `a_hk = 1` for all `h ≤ i`,
//! `k ≤ j` (and `h ≠ k` in the zero-trace class).
//!
//! Row `i` is encoded by a length `L_i`: its ones are the columns `0..L_i`,
//! minus column `i` in the zero-trace class, where `L_i = i + 1` is skipped
//! because it describes the same row as `L_i = i`.

use serde::Serialize;

use super::core_ones;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn row_sum(i: usize, len: usize, zero_trace: bool) -> usize {
    if zero_trace && len > i {
        len - 1
    } else {
        len
    }
}

/// Whether row `i` of length `len` is compatible with every earlier row.
fn compatible(prefix: &[usize], i: usize, len: usize, zero_trace: bool) -> bool {
    if !zero_trace {
        return prefix.last().is_none_or(|&prev| len <= prev);
    }
    if len == i + 1 {
        return false;
    }
    prefix.iter().enumerate().all(|(h, &lh)| {
        if len == 0 {
            true
        } else if len - 1 == h {
            lh + 1 >= len
        } else {
            lh >= len
        }
    })
}

/// Streams every member of the staircase class with `e` ones, in
/// decreasing lexicographic order of the row-sum vector.
pub struct StaircaseIter {
    n: usize,
    e: usize,
    zero_trace: bool,
    lengths: Vec<usize>,
    used: Vec<usize>,
    /// Untried lengths per level, largest last.
    pending: Vec<Vec<usize>>,
    started: bool,
}

impl StaircaseIter {
    fn candidates(&self) -> Vec<usize> {
        let i = self.lengths.len();
        let used = self.used.last().copied().unwrap_or(0);
        let rows_after = self.n - i - 1;
        (0..=self.n)
            .filter(|&len| compatible(&self.lengths, i, len, self.zero_trace))
            .filter(|&len| {
                let s = row_sum(i, len, self.zero_trace);
                let cap = if self.zero_trace { (len + 1).min(self.n) } else { len };
                used + s <= self.e && self.e - used - s <= rows_after * cap
            })
            .collect()
    }

    fn lengths_to_matrix(&self) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, n, |i, j| {
            if j < self.lengths[i] && !(self.zero_trace && i == j) {
                1.0
            } else {
                0.0
            }
        })
    }
}

impl Iterator for StaircaseIter {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if !self.started {
            self.started = true;
            let c = self.candidates();
            self.pending.push(c);
        }
        loop {
            let top = self.pending.last_mut()?;
            let Some(len) = top.pop() else {
                self.pending.pop();
                if self.lengths.pop().is_some() {
                    self.used.pop();
                }
                continue;
            };
            let i = self.lengths.len();
            let used = self.used.last().copied().unwrap_or(0) + row_sum(i, len, self.zero_trace);
            if i + 1 == self.n {
                if used == self.e {
                    self.lengths.push(len);
                    let out = self.lengths_to_matrix();
                    self.lengths.pop();
                    return Some(out);
                }
                continue;
            }
            self.lengths.push(len);
            self.used.push(used);
            let c = self.candidates();
            self.pending.push(c);
        }
    }
}

/// All staircase matrices of order `n` with `e` ones.
pub fn enumerate_staircase(n: usize, e: usize, zero_trace: bool) -> Result<StaircaseIter> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let max = if zero_trace { n * n - n } else { n * n };
    if e > max {
        return Err(Error::InvalidParams(format!(
            "e = {e} exceeds the {max} available positions"
        )));
    }
    Ok(StaircaseIter {
        n,
        e,
        zero_trace,
        lengths: Vec::with_capacity(n),
        used: Vec::with_capacity(n),
        pending: Vec::with_capacity(n),
        started: false,
    })
}

/// Direct test of the staircase condition on a square (0,1)-matrix.
pub fn is_staircase(a: &Matrix, zero_trace: bool) -> bool {
    let Ok(n) = a.order() else { return false };
    if a.data().iter().any(|&x| x != 0.0 && x != 1.0) {
        return false;
    }
    if zero_trace && (0..n).any(|i| a[(i, i)] != 0.0) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] == 0.0 {
                continue;
            }
            for h in 0..=i {
                for k in 0..=j {
                    if !(zero_trace && h == k) && a[(h, k)] != 1.0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The quantities `s, a, b, r` attached to a staircase matrix and a core
/// size `c`, after orienting it so that `A[c|c)` holds no more ones than
/// `A(c|c]`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockStatistics {
    pub c: usize,
    pub transposed: bool,
    /// Row sums of the oriented matrix.
    pub row_sums: Vec<i64>,
    pub t: i64,
    /// `r_{c+1}`.
    pub s: i64,
    pub a: i64,
    pub b: i64,
    /// Zeros in the leading `c×c` block (off the diagonal with zero trace).
    pub r: i64,
    /// `s = 0`; the bound matrix then has a zero bottom row.
    pub degenerate: bool,
    /// `a + b + s + Σ_{i>c+1} r_i = t`.
    pub sum_identity: bool,
    /// `2a + b ≤ t`.
    pub two_a_plus_b: bool,
    /// `s ≤ t - a - b`.
    pub s_bound: bool,
}

pub fn block_statistics(a: &Matrix, c: usize, zero_trace: bool) -> Result<BlockStatistics> {
    let n = a.order()?;
    if !is_staircase(a, zero_trace) {
        return Err(Error::InvalidParams("matrix is not a staircase matrix".into()));
    }
    if c + 1 > n {
        return Err(Error::InvalidParams(format!("c + 1 = {} exceeds n = {n}", c + 1)));
    }
    let count = |m: &Matrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> i64 {
        rows.flat_map(|i| cols.clone().map(move |j| (i, j)))
            .filter(|&(i, j)| m[(i, j)] != 0.0)
            .count() as i64
    };
    let upper = count(a, 0..c, c..n);
    let lower = count(a, c..n, 0..c);
    let transposed = upper > lower;
    let m = if transposed { a.transpose() } else { a.clone() };

    let rs: Vec<i64> = m.row_sums().iter().map(|&x| x as i64).collect();
    let e: i64 = rs.iter().sum();
    let t = e - core_ones(c, zero_trace) as i64;
    let base = if zero_trace { c as i64 - 1 } else { c as i64 };
    let s = rs[c];
    let su = s.clamp(0, c as i64) as usize;
    let a_stat: i64 = rs[..su].iter().map(|r| r - base).sum();
    let b_stat: i64 = rs[su..c].iter().map(|r| r - base).sum();
    let r_stat = core_ones(c, zero_trace) as i64 - count(&m, 0..c, 0..c);
    let tail: i64 = rs[c + 1..].iter().sum();
    Ok(BlockStatistics {
        c,
        transposed,
        row_sums: rs,
        t,
        s,
        a: a_stat,
        b: b_stat,
        r: r_stat,
        degenerate: s == 0,
        sum_identity: a_stat + b_stat + s + tail == t,
        two_a_plus_b: 2 * a_stat + b_stat <= t,
        s_bound: s <= t - a_stat - b_stat,
    })
}

/// The `(c+1)×(c+1)` rooted matrix dominating an oriented staircase matrix:
/// `J_c` (or `J_c - I_c`) with last column `r_i - c` (`r_i - c + 1`) and
/// bottom row `s` ones followed by zeros.
pub fn bound_matrix(stats: &BlockStatistics, zero_trace: bool) -> Result<Matrix> {
    let c = stats.c;
    if stats.s < 0 || stats.s as usize > c {
        return Err(Error::InvalidParams(format!(
            "s = {} must lie in 0..={c}",
            stats.s
        )));
    }
    let s = stats.s as usize;
    let base = if zero_trace { c as f64 - 1.0 } else { c as f64 };
    Ok(Matrix::from_fn(c + 1, c + 1, |i, j| match (i == c, j == c) {
        (false, false) => {
            if zero_trace && i == j {
                0.0
            } else {
                1.0
            }
        }
        (false, true) => stats.row_sums[i] as f64 - base,
        (true, false) => {
            if j < s {
                1.0
            } else {
                0.0
            }
        }
        (true, true) => 0.0,
    }))
}
