//! Ordered set partitions of row indices and the quotient operations built
//! on them.
//!
//! Blocks keep the order they were given in. The last block plays a special
//! role in the rooted bounds, so nothing here ever re-sorts blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// An ordered partition `(π_1, …, π_ℓ)` of `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

/// JSON shape of a partition file, with 1-based indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionFile {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from 0-based blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("n must be positive".into()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("at least one block required".into()));
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {} in block {} is out of range 1..={n}",
                        i + 1,
                        b + 1
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "index {} appears in blocks {} and {}",
                        i + 1,
                        block_of[i] + 1,
                        b + 1
                    )));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "index {} is not covered by any block",
                i + 1
            )));
        }
        Ok(Partition { n, blocks, block_of })
    }

    /// Builds a partition from 1-based blocks, as written in files.
    pub fn from_one_based(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut zero = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            let mut out = Vec::with_capacity(block.len());
            for &i in block {
                if i == 0 {
                    return Err(Error::InvalidPartition(format!(
                        "block {} contains index 0; indices are 1-based",
                        b + 1
                    )));
                }
                out.push(i - 1);
            }
            zero.push(out);
        }
        Partition::new(n, zero)
    }

    /// The partition into singletons `{{1}, …, {n}}`.
    pub fn identity(n: usize) -> Self {
        Partition::new(n, (0..n).map(|i| vec![i]).collect()).expect("valid identity partition")
    }

    /// `{{1}, …, {ℓ-1}, {ℓ, …, n}}`.
    pub fn leading_singletons(n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::InvalidPartition(format!(
                "need 1 <= ell <= {n}, got {ell}"
            )));
        }
        let mut blocks: Vec<Vec<usize>> = (0..ell - 1).map(|i| vec![i]).collect();
        blocks.push((ell - 1..n).collect());
        Partition::new(n, blocks)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PartitionFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("partition JSON: {e}")))?;
        Partition::from_one_based(file.n, &file.blocks)
    }

    pub fn to_file(&self) -> PartitionFile {
        PartitionFile {
            n: self.n,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks `ℓ`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    fn require_matches(&self, c: &Matrix) -> Result<()> {
        let n = c.order()?;
        if n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix has order {n} but partition covers {} indices",
                self.n
            )));
        }
        Ok(())
    }
}

/// The `n×ℓ` characteristic matrix `S` with `s_jb = 1` iff `j ∈ π_b`.
pub fn characteristic_matrix(p: &Partition) -> Matrix {
    Matrix::from_fn(p.n(), p.len(), |j, b| if p.block_of(j) == b { 1.0 } else { 0.0 })
}

/// The `n×ℓ` matrix `CS` of row sums of each row of `c` over each block.
pub fn block_row_sums(c: &Matrix, p: &Partition) -> Result<Matrix> {
    p.require_matches(c)?;
    let mut out = Matrix::zeros(p.n(), p.len());
    for i in 0..p.n() {
        for (j, x) in c.row(i).iter().enumerate() {
            out[(i, p.block_of(j))] += x;
        }
    }
    Ok(out)
}

/// The quotient matrix `Π(C)`: entry `(a, b)` is the average row sum of the
/// submatrix `C[π_a | π_b]`.
pub fn quotient_matrix(c: &Matrix, p: &Partition) -> Result<Matrix> {
    let cs = block_row_sums(c, p)?;
    let ell = p.len();
    let mut q = Matrix::zeros(ell, ell);
    for (a, block) in p.blocks().iter().enumerate() {
        let size = block.len() as f64;
        for b in 0..ell {
            q[(a, b)] = block.iter().map(|&i| cs[(i, b)]).sum::<f64>() / size;
        }
    }
    Ok(q)
}

/// A row whose sum over a block differs from the block average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitableViolation {
    /// 1-based row index.
    pub row: usize,
    /// 1-based block index.
    pub block: usize,
    pub block_row_sum: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquitableCheck {
    pub equitable: bool,
    pub quotient: Matrix,
    pub violations: Vec<EquitableViolation>,
}

/// Default equitability tolerance, `1e-9·(1 + max|c_ij|)`.
pub fn default_equitable_tol(c: &Matrix) -> f64 {
    1e-9 * (1.0 + c.max_abs())
}

/// Tests `SΠ(C) = CS` entrywise within `tol` (the default when `None`).
pub fn is_equitable(c: &Matrix, p: &Partition, tol: Option<f64>) -> Result<EquitableCheck> {
    let tol = tol.unwrap_or_else(|| default_equitable_tol(c));
    if tol < 0.0 {
        return Err(Error::InvalidParams("tolerance must be nonnegative".into()));
    }
    let cs = block_row_sums(c, p)?;
    let quotient = quotient_matrix(c, p)?;
    let mut violations = Vec::new();
    for i in 0..p.n() {
        let a = p.block_of(i);
        for b in 0..p.len() {
            if (cs[(i, b)] - quotient[(a, b)]).abs() > tol {
                violations.push(EquitableViolation {
                    row: i + 1,
                    block: b + 1,
                    block_row_sum: cs[(i, b)],
                    expected: quotient[(a, b)],
                });
            }
        }
    }
    Ok(EquitableCheck {
        equitable: violations.is_empty(),
        quotient,
        violations,
    })
}

/// Block averages `Π(u)` of a vector.
pub fn quotient_vector(u: &[f64], p: &Partition) -> Result<Vec<f64>> {
    if u.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "vector has length {} but partition covers {} indices",
            u.len(),
            p.n()
        )));
    }
    Ok(p.blocks()
        .iter()
        .map(|block| block.iter().map(|&i| u[i]).sum::<f64>() / block.len() as f64)
        .collect())
}

/// `u = S·Π(u)` within `tol`.
pub fn is_equitable_vector(u: &[f64], p: &Partition, tol: f64) -> Result<bool> {
    let q = quotient_vector(u, p)?;
    Ok(u.iter()
        .enumerate()
        .all(|(i, x)| (x - q[p.block_of(i)]).abs() <= tol))
}
