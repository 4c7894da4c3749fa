//! Pointwise geometry of the toric metric built from `H = G^{-1}`.
//!
//! Sign conventions: the invariant Laplacian is the positive operator
//! `-sum d_i (H_ij d_j f)`, scalar curvature is `-sum H_ij,ij` and the Ricci
//! coefficients are `rho_kl = -1/2 sum_i H_li,ik`. With these,
//! `scal = 2 tr(rho)` and `d_k (Delta x_j) = 2 rho_kj`; on `[0, 1]` with the
//! Guillemin potential `scal = 4` and `Delta x = 4 (x - 1/2)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::spd_inverse;
use crate::poly::TestFunction;
use crate::potential::SymplecticPotential;

/// `scalar_curvature` refuses points closer than this to a facet.
pub const CURVATURE_GUARD: f64 = 1e-4;
/// Finite-difference step relative to `min_i L_i(x)`.
pub const FD_REL_STEP: f64 = 1e-4;
pub const KE_TOL_CLOSED: f64 = 1e-6;
pub const KE_TOL_FD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMode {
    /// Closed form when the potential supports it, finite differences otherwise.
    Auto,
    ClosedForm,
    FiniteDifference,
}

impl DerivativeMode {
    fn resolve(self, u: &SymplecticPotential) -> Result<Self> {
        match self {
            Self::Auto if u.has_closed_form_derivatives() => Ok(Self::ClosedForm),
            Self::Auto => Ok(Self::FiniteDifference),
            Self::ClosedForm if !u.has_closed_form_derivatives() => {
                Err(Error::InvalidParameter("closed-form derivatives unavailable for this potential".into()))
            }
            m => Ok(m),
        }
    }
}

/// `H` and its derivatives at a point. `dh[k] = dH/dx_k`,
/// `d2h[k][m] = d^2 H / dx_k dx_m` (empty unless requested).
#[derive(Debug, Clone)]
pub struct HDerivatives {
    pub h: DMatrix<f64>,
    pub dh: Vec<DMatrix<f64>>,
    pub d2h: Vec<Vec<DMatrix<f64>>>,
    pub mode: DerivativeMode,
}

#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub x: Vec<f64>,
    pub scal: f64,
    pub ricci: DMatrix<f64>,
    pub dh: Vec<DMatrix<f64>>,
    pub d2h: Vec<Vec<DMatrix<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KEReport {
    pub lambda_hat: f64,
    pub xbar: Vec<f64>,
    pub residual_max: f64,
    /// Root mean square over all samples and coordinates.
    pub residual_l2: f64,
    pub is_ke: bool,
    pub samples: usize,
    pub tol: f64,
    pub mode: DerivativeMode,
}

fn inverse(u: &SymplecticPotential, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(spd_inverse(&u.hessian(x)?)?.0)
}

fn fd_step(u: &SymplecticPotential, x: &[f64]) -> Result<f64> {
    let lmin = u.facet_values(x)?.into_iter().fold(f64::INFINITY, f64::min);
    let h = FD_REL_STEP * lmin;
    let scale = x.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    if h <= 1e-12 * scale {
        return Err(Error::StepUnderflow { step: h });
    }
    Ok(h)
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

/// `H` with first (and optionally second) derivatives.
pub fn h_derivatives(u: &SymplecticPotential, x: &[f64], second: bool, mode: DerivativeMode) -> Result<HDerivatives> {
    let mode = mode.resolve(u)?;
    let n = u.dim();
    let h = inverse(u, x)?;
    match mode {
        DerivativeMode::ClosedForm => {
            let dg = u.hessian_derivatives(x)?.expect("closed form available");
            let dh: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&h * d * &h)).collect();
            let d2h = if second {
                let d2g = u.hessian_second_derivatives(x)?.expect("closed form available");
                (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|m| -(&dh[m] * &dg[k] * &h) - &h * &d2g[k][m] * &h - &h * &dg[k] * &dh[m])
                            .collect()
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Ok(HDerivatives { h, dh, d2h, mode })
        }
        _ => {
            let step = fd_step(u, x)?;
            let plus: Vec<DMatrix<f64>> = (0..n).map(|k| inverse(u, &shifted(x, &[(k, step)]))).collect::<Result<_>>()?;
            let minus: Vec<DMatrix<f64>> = (0..n).map(|k| inverse(u, &shifted(x, &[(k, -step)]))).collect::<Result<_>>()?;
            let dh = (0..n).map(|k| (&plus[k] - &minus[k]) / (2.0 * step)).collect();
            let d2h = if second {
                let mut d2h = vec![vec![DMatrix::zeros(n, n); n]; n];
                for k in 0..n {
                    d2h[k][k] = (&plus[k] - &h * 2.0 + &minus[k]) / (step * step);
                    for m in 0..k {
                        let pp = inverse(u, &shifted(x, &[(k, step), (m, step)]))?;
                        let pm = inverse(u, &shifted(x, &[(k, step), (m, -step)]))?;
                        let mp = inverse(u, &shifted(x, &[(k, -step), (m, step)]))?;
                        let mm = inverse(u, &shifted(x, &[(k, -step), (m, -step)]))?;
                        let v = (pp - pm - mp + mm) / (4.0 * step * step);
                        d2h[m][k] = v.clone();
                        d2h[k][m] = v;
                    }
                }
                d2h
            } else {
                Vec::new()
            };
            Ok(HDerivatives { h, dh, d2h, mode })
        }
    }
}

/// `-sum_ij (H_ij,i d_j f + H_ij d_i d_j f)`.
pub fn laplacian_invariant(u: &SymplecticPotential, f: &dyn TestFunction, x: &[f64]) -> Result<f64> {
    laplacian_invariant_with(u, f, x, DerivativeMode::Auto)
}

pub fn laplacian_invariant_with(u: &SymplecticPotential, f: &dyn TestFunction, x: &[f64], mode: DerivativeMode) -> Result<f64> {
    let d = h_derivatives(u, x, false, mode)?;
    Ok(laplacian_from(&d, &f.gradient(x), &f.hessian(x)))
}

fn laplacian_from(d: &HDerivatives, grad: &[f64], hess: &DMatrix<f64>) -> f64 {
    let n = grad.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += d.dh[i][(i, j)] * grad[j] + d.h[(i, j)] * hess[(i, j)];
        }
    }
    -s
}

/// `Delta x_j` for every coordinate `j`.
pub fn coordinate_laplacians(u: &SymplecticPotential, x: &[f64], mode: DerivativeMode) -> Result<Vec<f64>> {
    let d = h_derivatives(u, x, false, mode)?;
    let n = x.len();
    Ok((0..n).map(|j| -(0..n).map(|i| d.dh[i][(i, j)]).sum::<f64>()).collect())
}

pub fn scalar_curvature(u: &SymplecticPotential, x: &[f64]) -> Result<CurvatureSample> {
    scalar_curvature_with(u, x, DerivativeMode::Auto)
}

pub fn scalar_curvature_with(u: &SymplecticPotential, x: &[f64], mode: DerivativeMode) -> Result<CurvatureSample> {
    u.facet_values_guarded(x, CURVATURE_GUARD)?;
    let d = h_derivatives(u, x, true, mode)?;
    let n = x.len();
    let mut scal = 0.0;
    for i in 0..n {
        for j in 0..n {
            scal -= d.d2h[i][j][(i, j)];
        }
    }
    let ricci = DMatrix::from_fn(n, n, |k, l| -0.5 * (0..n).map(|i| d.d2h[i][k][(l, i)]).sum::<f64>());
    Ok(CurvatureSample { x: x.to_vec(), scal, ricci, dh: d.dh, d2h: d.d2h })
}

/// Fits `Delta x_i = 2 lambda (x_i - xbar_i)` jointly over all coordinates
/// (one `lambda`, one `xbar_i` per coordinate) at Halton interior samples.
pub fn ke_check(u: &SymplecticPotential, samples: usize, tol: Option<f64>) -> Result<KEReport> {
    ke_check_with(u, samples, tol, DerivativeMode::Auto)
}

pub fn ke_check_with(u: &SymplecticPotential, samples: usize, tol: Option<f64>, mode: DerivativeMode) -> Result<KEReport> {
    if samples < 20 {
        return Err(Error::InvalidParameter(format!("ke_check needs at least 20 samples, got {samples}")));
    }
    let mode = mode.resolve(u)?;
    let tol = tol.unwrap_or(if mode == DerivativeMode::ClosedForm { KE_TOL_CLOSED } else { KE_TOL_FD });
    let pts = u.float_polytope().interior_points(samples, 0.02);
    let lap: Vec<Vec<f64>> = pts.iter().map(|x| coordinate_laplacians(u, x, mode)).collect::<Result<_>>()?;
    let n = u.dim();
    let m = pts.len() as f64;
    let (mut num, mut den) = (0.0, 0.0);
    let mut sums = Vec::with_capacity(n);
    for i in 0..n {
        let s: f64 = pts.iter().map(|x| x[i]).sum();
        let q: f64 = pts.iter().map(|x| x[i] * x[i]).sum();
        let y: f64 = lap.iter().map(|l| l[i]).sum();
        let p: f64 = pts.iter().zip(&lap).map(|(x, l)| x[i] * l[i]).sum();
        num += p - s * y / m;
        den += q - s * s / m;
        sums.push((s, y));
    }
    // a = 2 lambda, b_i = a xbar_i
    let a = num / den;
    let b: Vec<f64> = sums.iter().map(|(s, y)| (a * s - y) / m).collect();
    let mut rmax = 0.0_f64;
    let mut rss = 0.0;
    for (x, l) in pts.iter().zip(&lap) {
        for i in 0..n {
            let r = l[i] - (a * x[i] - b[i]);
            rmax = rmax.max(r.abs());
            rss += r * r;
        }
    }
    Ok(KEReport {
        lambda_hat: a / 2.0,
        xbar: b.iter().map(|bi| bi / a).collect(),
        residual_max: rmax,
        residual_l2: (rss / (m * n as f64)).sqrt(),
        is_ke: rmax < tol,
        samples: pts.len(),
        tol,
        mode,
    })
}
