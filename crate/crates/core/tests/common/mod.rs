//! Shared helpers for the integration tests: an eigenvalue oracle built on
//! nalgebra and seeded random instance generators.

#![allow(dead_code)]

use nalgebra::{DMatrix, Schur};
use quotient_bounds::{Matrix, Partition};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dense(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.data())
}

/// Eigenvalues as `(re, im)` pairs. The QR sweep can stall on exactly
/// repeated eigenvalues, so failed attempts are retried with a looser
/// deflation threshold after a seeded random orthogonal similarity.
pub fn oracle_eigenvalues(a: &Matrix) -> Vec<(f64, f64)> {
    let m = dense(a);
    let n = a.rows();
    let mut g = rng(0x5eed);
    for (attempt, eps) in [f64::EPSILON, 1e-13, 1e-13, 1e-11, 1e-11].into_iter().enumerate() {
        let b = if attempt == 0 {
            m.clone()
        } else {
            let r = DMatrix::<f64>::from_fn(n, n, |_, _| g.gen_range(-1.0..1.0));
            let q = r.qr().q();
            q.transpose() * &m * q
        };
        if let Some(schur) = Schur::try_new(b, eps, 10_000) {
            return schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
        }
    }
    panic!("oracle eigenvalue solver failed on {a:?}");
}

pub fn oracle_spectral_radius(a: &Matrix) -> f64 {
    oracle_eigenvalues(a)
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .fold(0.0, f64::max)
}

/// Largest eigenvalue whose imaginary part is below `1e-7·(1 + ‖A‖)`.
pub fn oracle_rho_r(a: &Matrix) -> Option<f64> {
    let tol = 1e-7 * (1.0 + a.max_abs());
    oracle_eigenvalues(a)
        .into_iter()
        .filter(|&(_, im)| im.abs() <= tol)
        .map(|(re, _)| re)
        .reduce(f64::max)
}

pub fn random_nonneg(rng: &mut ChaCha8Rng, n: usize, max: f64, density: f64) -> Matrix {
    Matrix::from_fn(n, n, |_, _| {
        if rng.gen_bool(density) {
            rng.gen_range(0.0..max)
        } else {
            0.0
        }
    })
}

/// A random ordered partition of `0..n` into `ell` nonempty blocks.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, ell: usize) -> Partition {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(ell - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(ell);
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(n)) {
        let mut b = idx[start..end].to_vec();
        b.sort_unstable();
        blocks.push(b);
        start = end;
    }
    Partition::new(n, blocks).unwrap()
}

/// A nonnegative matrix for which `p` is equitable: every row of block `a`
/// puts total weight `b[a][k]` on block `k`, split at random.
pub fn random_equitable(rng: &mut ChaCha8Rng, p: &Partition, b: &Matrix) -> Matrix {
    let n = p.n();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        let a = p.block_of(i);
        for k in 0..p.len() {
            let cols = p.block(k);
            let w: Vec<f64> = cols.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            for (&j, wj) in cols.iter().zip(&w) {
                c[(i, j)] = if total > 0.0 { b[(a, k)] * wj / total } else { b[(a, k)] / cols.len() as f64 };
            }
        }
    }
    c
}

/// A random rooted `C′` together with a nonnegative `C` whose first `n-1`
/// columns and row sums are dominated by those of `C′`.
pub fn random_dominated_pair(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let bottom: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..3.0)).collect();
    let mut cp = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            cp[(i, j)] = if i == j {
                rng.gen_range(-2.0..5.0)
            } else {
                bottom[j] + rng.gen_range(0.0..3.0)
            };
        }
    }
    for j in 0..n - 1 {
        cp[(n - 1, j)] = bottom[j];
    }
    let bottom_sum: f64 = bottom.iter().sum();
    let rn = (bottom_sum + rng.gen_range(-2.0..4.0)).max(0.0);
    cp[(n - 1, n - 1)] = rn - bottom_sum;
    for i in 0..n - 1 {
        let pos: f64 = (0..n - 1).map(|j| cp[(i, j)].max(0.0)).sum();
        let interior: f64 = (0..n - 1).map(|j| cp[(i, j)]).sum();
        let ri = rn.max(pos) + rng.gen_range(0.0..3.0);
        cp[(i, n - 1)] = ri - interior;
    }
    let rp = cp.row_sums();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n - 1 {
            c[(i, j)] = rng.gen_range(0.0..=1.0) * cp[(i, j)].max(0.0);
        }
        let used: f64 = (0..n - 1).map(|j| c[(i, j)]).sum();
        if used > rp[i] {
            for j in 0..n - 1 {
                c[(i, j)] *= rp[i] / used;
            }
        }
        let used: f64 = (0..n - 1).map(|j| c[(i, j)]).sum();
        c[(i, n - 1)] = rng.gen_range(0.0..=1.0) * (rp[i] - used).max(0.0);
    }
    (cp, c)
}
