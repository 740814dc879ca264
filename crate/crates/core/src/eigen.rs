//! Dense eigenvalues of general real matrices: balancing, reduction to upper
//! Hessenberg form by stabilized elementary similarity transforms, then
//! Francis double-shift QR on the Hessenberg matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest order accepted by [`dense_eigenvalues`].
pub const MAX_DENSE_ORDER: usize = 512;

const MAX_QR_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Square working storage indexed 1-based, which keeps the QR sweep close to
/// its textbook form.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.a[(i - 1) * n + (j - 1)] = v;
    }

    #[inline]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.a[(i - 1) * n + (j - 1)] -= v;
    }
}

/// All eigenvalues of a square matrix, ordered by decreasing real part and
/// then decreasing imaginary part.
pub fn dense_eigenvalues(c: &Matrix) -> Result<Vec<Eigenvalue>> {
    let n = c.order()?;
    if n > MAX_DENSE_ORDER {
        return Err(Error::DimensionMismatch(format!(
            "dense eigenvalues support order <= {MAX_DENSE_ORDER}, got {n}"
        )));
    }
    let mut w = Work {
        n,
        a: c.data().to_vec(),
    };
    balance(&mut w);
    to_hessenberg(&mut w);
    let mut vals = hessenberg_qr(&mut w)?;
    vals.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });
    Ok(vals)
}

fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = w.n;
    loop {
        let mut done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += w.at(j, i).abs();
                    r += w.at(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        w.set(i, j, w.at(i, j) * g);
                    }
                    for j in 1..=n {
                        w.set(j, i, w.at(j, i) * f);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

fn to_hessenberg(w: &mut Work) {
    let n = w.n;
    for m in 2..n {
        let mut x: f64 = 0.0;
        let mut i = m;
        for j in m..=n {
            if w.at(j, m - 1).abs() > x.abs() {
                x = w.at(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = w.at(i, j);
                w.set(i, j, w.at(m, j));
                w.set(m, j, t);
            }
            for j in 1..=n {
                let t = w.at(j, i);
                w.set(j, i, w.at(j, m));
                w.set(j, m, t);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = w.at(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    w.set(i, m - 1, y);
                    for j in m..=n {
                        let v = y * w.at(m, j);
                        w.sub(i, j, v);
                    }
                    for j in 1..=n {
                        let v = y * w.at(j, i);
                        w.set(j, m, w.at(j, m) + v);
                    }
                }
            }
        }
    }
    // Clear the elimination multipliers stored below the subdiagonal.
    for i in 3..=n {
        for j in 1..=(i - 2) {
            w.set(i, j, 0.0);
        }
    }
}

fn hessenberg_qr(w: &mut Work) -> Result<Vec<Eigenvalue>> {
    let n = w.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += w.at(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total_its = 0usize;
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = w.at(l - 1, l - 1).abs() + w.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if w.at(l, l - 1).abs() + s == s {
                    w.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let mut x = w.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = w.at(nn - 1, nn - 1);
                let mut ww = w.at(nn, nn - 1) * w.at(nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + ww;
                    let z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        let z = p + z.copysign(p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - ww / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn = nn.saturating_sub(2);
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::NoConvergence {
                            iterations: total_its,
                        });
                    }
                    if its % 10 == 0 && its > 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nn {
                            w.sub(i, i, x);
                        }
                        let s = w.at(nn, nn - 1).abs() + w.at(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        ww = -0.4375 * s * s;
                    }
                    its += 1;
                    total_its += 1;
                    let (mut p, mut q, mut r);
                    let mut m = nn - 2;
                    loop {
                        let z = w.at(m, m);
                        let rr = x - z;
                        let s = y - z;
                        p = (rr * s - ww) / w.at(m + 1, m) + w.at(m, m + 1);
                        q = w.at(m + 1, m + 1) - z - rr - s;
                        r = w.at(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = w.at(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (w.at(m - 1, m - 1).abs() + z.abs() + w.at(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        w.set(i, i - 2, 0.0);
                        if i != m + 2 {
                            w.set(i, i - 3, 0.0);
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = w.at(k, k - 1);
                            q = w.at(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = w.at(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    w.set(k, k - 1, -w.at(k, k - 1));
                                }
                            } else {
                                w.set(k, k - 1, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = w.at(k, j) + q * w.at(k + 1, j);
                                if k != nn - 1 {
                                    pp += r * w.at(k + 2, j);
                                    w.sub(k + 2, j, pp * z);
                                }
                                w.sub(k + 1, j, pp * y);
                                w.sub(k, j, pp * x);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * w.at(i, k) + y * w.at(i, k + 1);
                                if k != nn - 1 {
                                    pp += z * w.at(i, k + 2);
                                    w.sub(i, k + 2, pp * r);
                                }
                                w.sub(i, k + 1, pp * q);
                                w.sub(i, k, pp);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn == 0 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n)
        .map(|i| Eigenvalue {
            re: wr[i],
            im: wi[i],
        })
        .collect())
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Exactly
/// singular pivots are nudged to a tiny nonzero value so that inverse
/// iteration at an exact eigenvalue still produces a direction.
pub(crate) fn solve_nudged(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let mut m = a.data().to_vec();
    let mut x = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap())
            .unwrap();
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
            }
            x.swap(piv, col);
        }
        if m[col * n + col].abs() < f64::EPSILON * scale {
            m[col * n + col] = f64::EPSILON * scale;
        }
        let d = m[col * n + col];
        for i in (col + 1)..n {
            let f = m[i * n + col] / d;
            if f != 0.0 {
                for j in col..n {
                    m[i * n + j] -= f * m[col * n + j];
                }
                x[i] -= f * x[col];
            }
        }
    }
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[i * n + j] * x[j]).sum();
        x[i] = (x[i] - s) / m[i * n + i];
    }
    x
}
