//! Small dense linear algebra for the Newton solver.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

/// Thin SVD A = U·diag(s)·Vᵀ by one-sided Jacobi rotations.
pub struct Svd {
    /// rows × k, columns scaled to unit length (zero for null columns).
    pub u: Mat,
    pub s: Vec<f64>,
    /// cols × k.
    pub v: Mat,
}

pub fn svd(a: &Mat) -> Svd {
    // Work on the orientation with at least as many rows as columns.
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let (x, y) = (w.get(i, p), w.get(i, q));
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w.get(i, p), w.get(i, q));
                    w.set(i, p, c * x - s * y);
                    w.set(i, q, s * x + c * y);
                }
                for i in 0..n {
                    let (x, y) = (v.get(i, p), v.get(i, q));
                    v.set(i, p, c * x - s * y);
                    v.set(i, q, s * x + c * y);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s = vec![0.0; n];
    for j in 0..n {
        let norm = libm::sqrt((0..m).map(|i| w.get(i, j) * w.get(i, j)).sum::<f64>());
        s[j] = norm;
        for i in 0..m {
            w.set(i, j, if norm > 0.0 { w.get(i, j) / norm } else { 0.0 });
        }
    }
    Svd { u: w, s, v }
}

impl Svd {
    pub fn max_singular(&self) -> f64 {
        self.s.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_singular(&self) -> f64 {
        self.s.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Number of singular values above `rel`·σ_max.
    pub fn rank(&self, rel: f64) -> usize {
        let cut = rel * self.max_singular();
        self.s.iter().filter(|&&x| x > cut).count()
    }

    /// Minimum-norm least-squares solution of A x = b, truncating singular
    /// values below `rel`·σ_max.
    pub fn solve(&self, b: &[f64], rel: f64) -> Vec<f64> {
        let cut = rel * self.max_singular();
        let mut x = vec![0.0; self.v.rows];
        for k in 0..self.s.len() {
            if self.s[k] <= cut {
                continue;
            }
            let c = (0..self.u.rows).map(|i| self.u.get(i, k) * b[i]).sum::<f64>() / self.s[k];
            for j in 0..self.v.rows {
                x[j] += c * self.v.get(j, k);
            }
        }
        x
    }
}

/// Solves the square system A·x = b by LU with partial pivoting. Returns
/// `None` when a pivot falls below `rel` times the largest entry.
pub fn lu_solve(a: &Mat, b: &[f64], rel: f64) -> Option<Vec<f64>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return None;
    }
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))?;
        if m[p * n + k].abs() <= rel * scale {
            return None;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let piv = m[k * n + k];
        for i in k + 1..n {
            let f = m[i * n + k] / piv;
            if f != 0.0 {
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k * n + k];
    }
    Some(x)
}
