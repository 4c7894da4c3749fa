//! Small dense symmetric kernels: diagonally pivoted Cholesky and the
//! cyclic Jacobi eigenvalue iteration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `A[perm, perm] = L L^T` restricted to the `rank` leading pivots.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    /// `n x rank`, lower trapezoidal in pivoted order.
    pub l: DMatrix<f64>,
    /// Pivot order; the first `rank` entries are the retained indices.
    pub perm: Vec<usize>,
    pub rank: usize,
    /// Accepted pivots (squared diagonal of `L`), in pivot order.
    pub pivots: Vec<f64>,
    /// The first pivot that failed the threshold, if elimination stopped early.
    pub rejected: Option<f64>,
}

impl PivotedCholesky {
    /// Factor with symmetric pivoting on the largest remaining diagonal.
    /// Elimination stops once the best remaining pivot falls to
    /// `rel_drop * max(diag(A))` or below.
    pub fn new(a: &DMatrix<f64>, rel_drop: f64) -> Self {
        let n = a.nrows();
        let mut w = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = (0..n).map(|i| a[(i, i)]).fold(0.0_f64, f64::max);
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut pivots = Vec::new();
        let mut rank = 0;
        let mut rejected = None;
        for k in 0..n {
            let (best, val) = (k..n).map(|i| (i, w[(perm[i], perm[i])])).fold((k, f64::NEG_INFINITY), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
            if !(val > rel_drop * scale) || !val.is_finite() {
                rejected = Some(val);
                break;
            }
            perm.swap(k, best);
            l.swap_rows(k, best);
            let p = perm[k];
            let d = val.sqrt();
            l[(k, k)] = d;
            for i in k + 1..n {
                let q = perm[i];
                l[(i, k)] = w[(q, p)] / d;
            }
            for i in k + 1..n {
                for j in k + 1..=i {
                    let (qi, qj) = (perm[i], perm[j]);
                    let v = w[(qi, qj)] - l[(i, k)] * l[(j, k)];
                    w[(qi, qj)] = v;
                    w[(qj, qi)] = v;
                }
            }
            pivots.push(val);
            rank += 1;
        }
        let l = l.columns(0, rank).into_owned();
        Self { l, perm, rank, pivots, rejected }
    }

    /// Leading `rank x rank` triangle.
    pub fn leading(&self) -> DMatrix<f64> {
        self.l.rows(0, self.rank).into_owned()
    }
}

/// Inverse and log-determinant of a symmetric positive-definite matrix.
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = a.nrows();
    let f = PivotedCholesky::new(a, 0.0);
    if f.rank < n {
        return Err(Error::NotPositiveDefinite { pivot: f.rejected.unwrap_or(f64::NAN) });
    }
    let l = f.leading();
    let logdet = f.pivots.iter().map(|p| p.ln()).sum();
    let linv = lower_inverse(&l);
    let pinv = linv.transpose() * &linv;
    let mut inv = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(f.perm[i], f.perm[j])] = pinv[(i, j)];
        }
    }
    Ok((symmetrize(inv), logdet))
}

/// Inverse of a nonsingular lower-triangular matrix by forward substitution.
pub fn lower_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[(i, k)] * inv[(k, c)];
            }
            inv[(i, c)] = s / l[(i, i)];
        }
    }
    inv
}

pub fn symmetrize(mut a: DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// Runs sweeps until the off-diagonal Frobenius norm is at most
    /// `tol * ||A||_F`.
    pub fn jacobi(a: &DMatrix<f64>, tol: f64) -> Self {
        const MAX_SWEEPS: usize = 100;
        let n = a.nrows();
        let mut m = symmetrize(a.clone());
        let mut v = DMatrix::<f64>::identity(n, n);
        let total = m.norm();
        let mut sweeps = 0;
        while sweeps < MAX_SWEEPS {
            let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| m[(i, j)].powi(2)).sum::<f64>().sqrt();
            if off <= tol * total || total == 0.0 {
                break;
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
        let values = order.iter().map(|&i| m[(i, i)]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &v.column(src));
        }
        Self { values, vectors, sweeps }
    }
}

pub fn quad_form(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(a * x))
}
