//! Factorizations: Cholesky for the normal equations, Householder QR for
//! orthonormal factors, and one-sided Jacobi SVD for rank, conditioning and
//! pseudo-inverses.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(
            "solve_spd",
            format!("{}x{} is not square", a.rows(), a.cols()),
        ));
    }
    let scale = a.max_abs();
    let mut worst = 0.0f64;
    for i in 0..a.rows() {
        for j in (i + 1)..a.cols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let rel = if scale > 0.0 { worst / scale } else { 0.0 };
    if rel > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry: rel });
    }
    Ok(())
}

/// Solves `A·F = B` for symmetric positive definite `A` through its
/// Cholesky factorization.
pub fn solve_spd(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::dims(
            "solve_spd",
            format!("A is {}x{}, B has {} rows", a.rows(), a.cols(), b.rows()),
        ));
    }
    let l = cholesky(a)?;
    let n = a.rows();
    let mut f = b.clone();
    for c in 0..b.cols() {
        // L z = b
        for i in 0..n {
            let mut s = f[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * f[(k, c)];
            }
            f[(i, c)] = s / l[(i, i)];
        }
        // Lᵀ x = z
        for i in (0..n).rev() {
            let mut s = f[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * f[(k, c)];
            }
            f[(i, c)] = s / l[(i, i)];
        }
    }
    Ok(f)
}

/// Thin QR factorization of a tall matrix, `A = Q·R` with `QᵀQ = I` and a
/// strictly positive diagonal on `R`, which makes the factors unique.
pub fn qr_thin(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::dims(
            "qr_thin",
            format!("{m}x{n} is wider than tall"),
        ));
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        let mut v = vec![0.0; m - k];
        if norm > 0.0 {
            let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
            for i in k..m {
                v[i - k] = r[(i, k)];
            }
            v[0] -= alpha;
            let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                v.iter_mut().for_each(|x| *x /= vnorm);
                apply_reflector(&mut r, &v, k, k);
            }
        }
        reflectors.push(v);
    }

    let scale = a.frobenius_norm();
    let threshold = (m as f64) * f64::EPSILON * scale;
    let rank = (0..n).filter(|&j| r[(j, j)].abs() > threshold).count();
    if rank < n || scale == 0.0 {
        return Err(Error::RankDeficient { rank, required: n });
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    let mut q = Matrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for (k, v) in reflectors.iter().enumerate().rev() {
        apply_reflector(&mut q, v, k, 0);
    }

    let mut r_thin = Matrix::from_fn(n, n, |i, j| if j >= i { r[(i, j)] } else { 0.0 });
    for j in 0..n {
        if r_thin[(j, j)] < 0.0 {
            for c in 0..n {
                r_thin[(j, c)] = -r_thin[(j, c)];
            }
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok((q, r_thin))
}

/// Applies `I − 2vvᵀ` (with `v` living on rows `offset..`) to columns
/// `first_col..` of `target`.
fn apply_reflector(target: &mut Matrix, v: &[f64], offset: usize, first_col: usize) {
    for c in first_col..target.cols() {
        let dot: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi * target[(offset + i, c)])
            .sum();
        if dot == 0.0 {
            continue;
        }
        for (i, vi) in v.iter().enumerate() {
            target[(offset + i, c)] -= 2.0 * vi * dot;
        }
    }
}

/// Thin singular value decomposition `A = U·diag(s)·Vᵀ`.
///
/// `s` is sorted in decreasing order and has `min(rows, cols)` entries.
/// Columns of `u` paired with a zero singular value are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    /// Singular values above the numerical-rank cutoff.
    pub fn rank(&self, tol_factor: f64) -> usize {
        let cutoff = self.cutoff(tol_factor);
        self.s.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn cutoff(&self, tol_factor: f64) -> f64 {
        let dim = self.u.rows().max(self.v.rows()) as f64;
        let smax = self.s.first().copied().unwrap_or(0.0);
        tol_factor * dim * f64::EPSILON * smax
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Matrix) -> Svd {
    if a.rows() < a.cols() {
        let t = jacobi_tall(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    jacobi_tall(a)
}

fn jacobi_tall(a: &Matrix) -> Svd {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().map(|x| x * x).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for i in 0..m {
                u[(i, k)] = cols[j][i] / sigma;
            }
        }
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
    }
    Svd { u, s, v }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    svd(a).s
}

/// Number of singular values above `tol_factor · max(rows, cols) · ε · σ_max`.
pub fn numerical_rank(a: &Matrix, tol_factor: f64) -> usize {
    svd(a).rank(tol_factor)
}

/// Spectral condition number `σ_max / σ_min`, or `+∞` when the matrix is
/// numerically rank deficient.
pub fn condition_estimate(a: &Matrix) -> f64 {
    let d = svd(a);
    if d.rank(1.0) < d.s.len() {
        return f64::INFINITY;
    }
    d.s[0] / d.s[d.s.len() - 1]
}
