//! The lattice-point embedding of an integral Delzant polytope: diagonal
//! moment-map components `Psi_mm`, diagonal balancing, the toric eigenvalue
//! bound table and the saturation checker.
//!
//! All `|Z_m|^2` are handled as logarithms relative to the distinguished
//! point `m0`, so `log |Z_m|^2 = 2 (m - m0) . du/dx`.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::spd_inverse;
use crate::polytope::{LabelledPolytope, DEFAULT_K_MAX};
use crate::potential::{PotentialKind, SymplecticPotential};
use crate::quadrature::QuadratureRule;
use crate::rational::{self, Rational};

pub const DEFAULT_BALANCE_TOL: f64 = 1e-10;
pub const DEFAULT_BALANCE_MAX_ITER: usize = 200;
pub const SATURATION_TOL_CLOSED: f64 = 1e-6;
pub const SATURATION_TOL_FD: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct EmbeddingData {
    pub polytope: LabelledPolytope,
    /// Lattice points `P ∩ Z^n`, sorted.
    pub points: Vec<Vec<i64>>,
    pub m0_index: usize,
    /// `m - m0` for every lattice point.
    pub relative: Vec<Vec<f64>>,
    /// `L_i(m)` for every lattice point and facet.
    pub exponents: Vec<Vec<f64>>,
    /// Primitive edge directions at `m0`.
    pub edge_directions: Vec<Vec<i64>>,
}

impl EmbeddingData {
    pub fn new(p: &LabelledPolytope) -> Result<Self> {
        if !p.is_integral()? {
            return Err(Error::NotIntegral);
        }
        if !p.is_delzant()? {
            return Err(Error::NotDelzant);
        }
        let lat = p.lattice_points(1)?;
        if lat.n_k == 0 {
            return Err(Error::DegenerateN);
        }
        let points = lat.numerators.clone();
        let m0_index = 0;
        let m0 = points[m0_index].clone();
        let relative = points.iter().map(|m| m.iter().zip(&m0).map(|(a, b)| (a - b) as f64).collect()).collect();
        let exponents = lat
            .points
            .iter()
            .map(|m| (0..p.num_facets()).map(|i| rational::to_f64(&p.eval(i, m))).collect())
            .collect();
        let edge_directions = edge_directions_at(p, &lat.points[m0_index])?;
        Ok(Self { polytope: p.clone(), points, m0_index, relative, exponents, edge_directions })
    }

    /// `N + 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points.len() - 1
    }

    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == m)
    }

    /// `log |Z_m(x)|^2` for every lattice point, up to a common additive
    /// constant. The Guillemin kind uses `sum_i L_i(m) log L_i(x)`, which is
    /// defined up to the boundary; other kinds need `x` interior.
    pub fn log_z_squared(&self, u: &SymplecticPotential, x: &[f64]) -> Result<Vec<f64>> {
        if matches!(u.kind(), PotentialKind::Guillemin) {
            let l = u.float_polytope().facet_values(x);
            if let Some((facet, &value)) = l.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
                return Err(Error::BoundaryPoint { facet, value, guard: 0.0 });
            }
            let logl: Vec<f64> = l.iter().map(|v| v.ln()).collect();
            Ok(self
                .exponents
                .iter()
                .map(|e| e.iter().zip(&logl).map(|(a, lg)| if *a == 0.0 { 0.0 } else { a * lg }).sum())
                .collect())
        } else {
            let g = u.gradient(x)?;
            Ok(self.relative.iter().map(|d| 2.0 * d.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()).collect())
        }
    }

    fn check_weights(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.len() || alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::BadWeights { expected: self.len(), got: alpha.len() });
        }
        Ok(())
    }
}

fn edge_directions_at(p: &LabelledPolytope, vertex: &[Rational]) -> Result<Vec<Vec<i64>>> {
    let n = p.dim();
    let active: Vec<usize> = (0..p.num_facets()).filter(|&i| p.eval(i, vertex).is_zero()).collect();
    let normals: Vec<Vec<i64>> = p.normals().map(|v| v.to_vec()).collect();
    let mut dirs = Vec::with_capacity(n);
    for j in 0..n {
        // d with <nu_a, d> = delta_{a j} over the active normals
        let a: Vec<Vec<Rational>> = active.iter().map(|&i| normals[i].iter().map(|&v| rational::int(v)).collect()).collect();
        let b: Vec<Rational> = (0..n).map(|r| rational::int((r == j) as i64)).collect();
        let d = rational::solve(a, b).ok_or(Error::NotDelzant)?;
        let d: Option<Vec<i64>> = d.iter().map(|v| v.is_integer().then(|| v.to_integer().try_into().ok()).flatten()).collect();
        dirs.push(d.ok_or(Error::NotDelzant)?);
    }
    Ok(dirs)
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let mx = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// `|Z_m(x)|^2` normalised by `|Z_m0(x)|^2 = 1`; `x` interior.
pub fn z_squared(e: &EmbeddingData, u: &SymplecticPotential, m: usize, x: &[f64]) -> Result<f64> {
    u.facet_values(x)?;
    let lz = e.log_z_squared(u, x)?;
    Ok((lz[m] - lz[e.m0_index]).exp())
}

/// `Psi_mm(x)` for every lattice point `m`.
pub fn psi_diagonal(e: &EmbeddingData, u: &SymplecticPotential, alpha: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    e.check_weights(alpha)?;
    let lz = e.log_z_squared(u, x)?;
    Ok(softmax(&logits(alpha, &lz)))
}

pub fn psi_mm(e: &EmbeddingData, u: &SymplecticPotential, alpha: &[f64], m: usize, x: &[f64]) -> Result<f64> {
    Ok(psi_diagonal(e, u, alpha, x)?[m])
}

fn logits(alpha: &[f64], lz: &[f64]) -> Vec<f64> {
    alpha.iter().zip(lz).map(|(a, z)| 2.0 * a.ln() + z).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceWeights {
    /// Normalised to `sum alpha = 1`.
    pub alpha: Vec<f64>,
    /// `alpha / alpha_{m0}`.
    pub alpha_m0_normalised: Vec<f64>,
    /// `(1/vol) int Psi_ii` at the returned weights.
    pub psi_means: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// `(1/vol) int_P Psi_ii` for each lattice point.
pub fn psi_means(e: &EmbeddingData, u: &SymplecticPotential, alpha: &[f64], q: &QuadratureRule) -> Result<Vec<f64>> {
    e.check_weights(alpha)?;
    let lz = node_logs(e, u, q)?;
    Ok(means_from_logs(&lz, alpha, q))
}

fn node_logs(e: &EmbeddingData, u: &SymplecticPotential, q: &QuadratureRule) -> Result<Vec<Vec<f64>>> {
    q.nodes.par_iter().map(|x| e.log_z_squared(u, x)).collect()
}

fn means_from_logs(lz: &[Vec<f64>], alpha: &[f64], q: &QuadratureRule) -> Vec<f64> {
    let mut acc = vec![0.0; alpha.len()];
    for (l, w) in lz.iter().zip(&q.weights) {
        for (a, p) in acc.iter_mut().zip(softmax(&logits(alpha, l))) {
            *a += w * p;
        }
    }
    let vol = q.total_weight();
    acc.iter().map(|a| a / vol).collect()
}

/// Damped multiplicative fixed point
/// `log alpha_i^2 += (1/2) log((1/(N+1)) / psi_i)`, renormalised to
/// `sum alpha = 1`, until `max_i |psi_i - 1/(N+1)| < tol`.
pub fn balance(
    e: &EmbeddingData,
    u: &SymplecticPotential,
    q: &QuadratureRule,
    tol: f64,
    max_iter: usize,
    start: Option<&[f64]>,
) -> Result<BalanceWeights> {
    let len = e.len();
    let mut alpha = match start {
        Some(a) => {
            e.check_weights(a)?;
            a.to_vec()
        }
        None => vec![1.0; len],
    };
    let s: f64 = alpha.iter().sum();
    alpha.iter_mut().for_each(|a| *a /= s);
    let target = 1.0 / len as f64;
    let lz = node_logs(e, u, q)?;
    let mut iterations = 0;
    loop {
        let psi = means_from_logs(&lz, &alpha, q);
        let residual = psi.iter().map(|p| (p - target).abs()).fold(0.0, f64::max);
        if residual < tol {
            let a0 = alpha[e.m0_index];
            return Ok(BalanceWeights {
                alpha_m0_normalised: alpha.iter().map(|a| a / a0).collect(),
                alpha,
                psi_means: psi,
                residual,
                iterations,
            });
        }
        if iterations == max_iter {
            return Err(Error::NoConvergence(max_iter));
        }
        for (a, p) in alpha.iter_mut().zip(&psi) {
            // alpha^2 <- alpha^2 (target/psi)^(1/2)
            *a *= (target / p).powf(0.25);
        }
        let s: f64 = alpha.iter().sum();
        alpha.iter_mut().for_each(|a| *a /= s);
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    FubiniStudy,
    None,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationReport {
    pub r1: f64,
    pub r2: f64,
    pub saturated: bool,
    pub classification: Classification,
    /// `n / N`.
    pub target: f64,
    pub tol: f64,
    pub samples: usize,
}

/// `grad Psi_00 = -Psi_00 sum_j Psi_jj 2 G (m_j - m0)`.
fn grad_psi00(e: &EmbeddingData, u: &SymplecticPotential, alpha: &[f64], x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let psi = psi_diagonal(e, u, alpha, x)?;
    let g = u.hessian(x)?;
    let n = x.len();
    let mut v = DVector::zeros(n);
    for (p, d) in psi.iter().zip(&e.relative) {
        v += *p * DVector::from_column_slice(d);
    }
    let grad = (&g * v) * (-2.0 * psi[e.m0_index]);
    Ok((grad.iter().cloned().collect(), psi))
}

/// Max residual of the least-squares affine fit of `values` over `xs`.
fn affine_fit_residual(xs: &[Vec<f64>], values: &[f64]) -> Result<f64> {
    let n = xs[0].len();
    let design = DMatrix::from_fn(xs.len(), n + 1, |r, c| if c == 0 { 1.0 } else { xs[r][c - 1] });
    let (inv, _) = spd_inverse(&(design.transpose() * &design))?;
    let coef = inv * design.transpose() * DVector::from_column_slice(values);
    let fit = &design * coef;
    Ok(fit.iter().zip(values).map(|(f, v)| (f - v).abs()).fold(0.0, f64::max))
}

/// Checks the identities forced by saturating the eigenvalue bound:
/// `-dPsi_00(m) = n/N` for every `m != m0` (residual `r1`) and `Psi_mm`
/// affine in `x` for the points adjacent to `m0` along edges (`r2`, by
/// regression rather than an integral constraint). Samples are the nodes of `q`.
pub fn saturation_check(e: &EmbeddingData, u: &SymplecticPotential, alpha: &[f64], q: &QuadratureRule, tol: Option<f64>) -> Result<SaturationReport> {
    e.check_weights(alpha)?;
    let tol = tol.unwrap_or(if u.has_closed_form_derivatives() { SATURATION_TOL_CLOSED } else { SATURATION_TOL_FD });
    let n = e.polytope.dim();
    let target = n as f64 / e.n() as f64;
    let evals: Vec<(Vec<f64>, Vec<f64>)> = q.nodes.par_iter().map(|x| grad_psi00(e, u, alpha, x)).collect::<Result<_>>()?;
    let mut r1 = 0.0_f64;
    for (grad, _) in &evals {
        for (mi, d) in e.relative.iter().enumerate() {
            if mi == e.m0_index {
                continue;
            }
            let dpsi: f64 = grad.iter().zip(d).map(|(a, b)| a * b).sum();
            r1 = r1.max((dpsi + target).abs());
        }
    }
    let m0 = &e.points[e.m0_index];
    let mut r2 = 0.0_f64;
    for dir in &e.edge_directions {
        let m: Vec<i64> = m0.iter().zip(dir).map(|(a, b)| a + b).collect();
        let mi = e.index_of(&m).expect("edge neighbour of an integral vertex is a lattice point");
        let vals: Vec<f64> = evals.iter().map(|(_, psi)| psi[mi]).collect();
        r2 = r2.max(affine_fit_residual(&q.nodes, &vals)?);
    }
    let saturated = r1 < tol && r2 < tol;
    let classification = match (saturated, e.polytope.is_unimodular_simplex()?) {
        (true, true) => Classification::FubiniStudy,
        (true, false) => Classification::Contradiction,
        _ => Classification::None,
    };
    Ok(SaturationReport { r1, r2, saturated, classification, target, tol, samples: q.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: u64,
    pub n_k: usize,
    /// Exact value as `"p/q"` or an integer string.
    pub bound: String,
    pub bound_f64: f64,
    pub is_integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub k0: u64,
    pub is_integral: bool,
    pub rows: Vec<BoundRow>,
    pub integral_bound: Option<BoundRow>,
    /// Smallest bound in the table.
    pub recommended: BoundRow,
}

/// Bounds `2nk(N_k + 1)/N_k` for `k = k0..=k0 + 4`, plus the `k = 1` bound
/// when `P` is integral.
pub fn bound_report(p: &LabelledPolytope, k_max: Option<u64>) -> Result<BoundReport> {
    if !p.is_delzant()? {
        return Err(Error::NotDelzant);
    }
    let k0 = p.k0(k_max.unwrap_or(DEFAULT_K_MAX))?;
    let row = |k: u64| -> Result<(BoundRow, Rational)> {
        let b = p.bly_bound(Some(k))?;
        Ok((
            BoundRow { k, n_k: b.n_k, bound: rational::format(&b.bound), bound_f64: rational::to_f64(&b.bound), is_integer: b.is_integer_bound },
            b.bound,
        ))
    };
    let rows: Vec<(BoundRow, Rational)> = (k0..=k0 + 4).map(row).collect::<Result<_>>()?;
    let is_integral = p.is_integral()?;
    let integral_bound = if is_integral { Some(row(1)?.0) } else { None };
    let recommended = rows.iter().min_by(|a, b| a.1.cmp(&b.1)).map(|r| r.0.clone()).expect("five rows");
    Ok(BoundReport { k0, is_integral, rows: rows.into_iter().map(|r| r.0).collect(), integral_bound, recommended })
}
