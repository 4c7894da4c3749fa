//! Symplectic potentials on a labelled polytope and their Hessians.
//!
//! Every kind except the polynomial perturbation has `G = sum_l a(L_l) nu_l nu_l^T`
//! (plus a constant diagonal term for `u_c`), which gives closed forms for the
//! first two derivatives of `G` as well.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, SymmetricEigen};
use crate::poly::{Polynomial, TestFunction};
use crate::polytope::LabelledPolytope;
use crate::sampling::FloatPolytope;

/// Evaluation refuses points with some `L_i(x)` below this.
pub const INTERIOR_GUARD: f64 = 1e-10;

/// Samples drawn when a polynomial perturbation is validated at construction.
pub const DEFAULT_VALIDATION_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Guillemin,
    /// `u_0 + (c/2) x_axis^2`.
    QuadraticPerturbed { axis: usize, c: f64 },
    /// `u_0 - u_0^s / s`, where `u_0^s` is the Guillemin potential of the
    /// polytope with offsets `L_k(x_c) * s`, `x_c` the vertex centroid.
    Dilation { s: f64 },
    /// `u_0 + v`.
    GuilleminPlusPoly { poly: Polynomial },
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Guillemin => write!(f, "guillemin"),
            Self::QuadraticPerturbed { axis, c } => write!(f, "uc:i={axis},c={c}"),
            Self::Dilation { s } => write!(f, "dilation:s={s}"),
            Self::GuilleminPlusPoly { poly } => write!(f, "poly:{} terms", poly.terms.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HessianSample {
    pub x: Vec<f64>,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub logdet_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    /// Smallest eigenvalue seen over all checks (full or tangential `G`).
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    pub points_checked: usize,
}

#[derive(Debug, Clone)]
pub struct SymplecticPotential {
    polytope: LabelledPolytope,
    fp: FloatPolytope,
    kind: PotentialKind,
    /// `L_k` at the vertex centroid; only used by the dilation family.
    centred_offsets: Vec<f64>,
}

impl SymplecticPotential {
    pub fn guillemin(p: &LabelledPolytope) -> Result<Self> {
        Self::build(p, PotentialKind::Guillemin)
    }

    /// `c >= 0`; `c = 0` is the Guillemin potential.
    pub fn quadratic_perturbed(p: &LabelledPolytope, axis: usize, c: f64) -> Result<Self> {
        Self::build(p, PotentialKind::QuadraticPerturbed { axis, c })
    }

    pub fn dilation(p: &LabelledPolytope, s: f64) -> Result<Self> {
        Self::build(p, PotentialKind::Dilation { s })
    }

    /// Validated with [`DEFAULT_VALIDATION_SAMPLES`] samples.
    pub fn guillemin_plus_poly(p: &LabelledPolytope, poly: Polynomial) -> Result<Self> {
        let u = Self::build(p, PotentialKind::GuilleminPlusPoly { poly })?;
        let rep = u.validate(DEFAULT_VALIDATION_SAMPLES);
        if !rep.passed {
            return Err(Error::InvalidPotential { worst_margin: rep.worst_margin });
        }
        Ok(u)
    }

    /// Parameter checks only; no sampling validation.
    pub fn with_kind_unchecked(p: &LabelledPolytope, kind: PotentialKind) -> Result<Self> {
        Self::build(p, kind)
    }

    pub fn from_kind(p: &LabelledPolytope, kind: PotentialKind) -> Result<Self> {
        match kind {
            PotentialKind::GuilleminPlusPoly { poly } => Self::guillemin_plus_poly(p, poly),
            k => Self::build(p, k),
        }
    }

    fn build(p: &LabelledPolytope, kind: PotentialKind) -> Result<Self> {
        let n = p.dim();
        match &kind {
            PotentialKind::Guillemin => {}
            PotentialKind::QuadraticPerturbed { axis, c } => {
                if *axis >= n {
                    return Err(Error::InvalidParameter(format!("axis {axis} out of range for dimension {n}")));
                }
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidParameter(format!("c = {c} must be finite and >= 0")));
                }
            }
            PotentialKind::Dilation { s } => {
                if !(s.is_finite() && *s > 1.0) {
                    return Err(Error::InvalidParameter(format!("s = {s} must be finite and > 1")));
                }
            }
            PotentialKind::GuilleminPlusPoly { poly } => {
                if poly.dim != n {
                    return Err(Error::DimensionMismatch { expected: n, got: poly.dim });
                }
            }
        }
        let fp = FloatPolytope::new(p)?;
        let centre = fp.centroid();
        let centred_offsets = fp.facet_values(&centre);
        Ok(Self { polytope: p.clone(), fp, kind, centred_offsets })
    }

    pub fn polytope(&self) -> &LabelledPolytope {
        &self.polytope
    }

    pub fn float_polytope(&self) -> &FloatPolytope {
        &self.fp
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.fp.dim
    }

    /// Translation applied before dilating: the vertex centroid.
    pub fn dilation_shift(&self) -> Option<Vec<f64>> {
        matches!(self.kind, PotentialKind::Dilation { .. }).then(|| self.fp.centroid())
    }

    /// True when derivatives of `G` are available in closed form.
    pub fn has_closed_form_derivatives(&self) -> bool {
        !matches!(self.kind, PotentialKind::GuilleminPlusPoly { .. })
    }

    /// `L_i(x)` for all facets, after checking the interior guard.
    pub fn facet_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.facet_values_guarded(x, INTERIOR_GUARD)
    }

    pub fn facet_values_guarded(&self, x: &[f64], guard: f64) -> Result<Vec<f64>> {
        if x.len() != self.fp.dim {
            return Err(Error::DimensionMismatch { expected: self.fp.dim, got: x.len() });
        }
        let l = self.fp.facet_values(x);
        for (facet, &value) in l.iter().enumerate() {
            if !(value >= guard) {
                return Err(Error::BoundaryPoint { facet, value, guard });
            }
        }
        Ok(l)
    }

    fn dilated(&self, s: f64, l: &[f64]) -> Vec<f64> {
        l.iter().zip(&self.centred_offsets).map(|(li, c)| li + (s - 1.0) * c).collect()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let l = self.facet_values(x)?;
        let u0 = |l: &[f64]| 0.5 * l.iter().map(|&v| v * v.ln() - v).sum::<f64>();
        Ok(match &self.kind {
            PotentialKind::Guillemin => u0(&l),
            PotentialKind::QuadraticPerturbed { axis, c } => u0(&l) + 0.5 * c * x[*axis] * x[*axis],
            PotentialKind::Dilation { s } => u0(&l) - u0(&self.dilated(*s, &l)) / s,
            PotentialKind::GuilleminPlusPoly { poly } => u0(&l) + poly.value(x),
        })
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let l = self.facet_values(x)?;
        let n = self.fp.dim;
        let mut g = vec![0.0; n];
        let weight: Vec<f64> = match &self.kind {
            PotentialKind::Dilation { s } => {
                let ls = self.dilated(*s, &l);
                l.iter().zip(&ls).map(|(a, b)| 0.5 * (a.ln() - b.ln() / s)).collect()
            }
            _ => l.iter().map(|a| 0.5 * a.ln()).collect(),
        };
        for (nu, w) in self.fp.normals.iter().zip(&weight) {
            for j in 0..n {
                g[j] += w * nu[j];
            }
        }
        match &self.kind {
            PotentialKind::QuadraticPerturbed { axis, c } => g[*axis] += c * x[*axis],
            PotentialKind::GuilleminPlusPoly { poly } => {
                for (gj, pj) in g.iter_mut().zip(poly.gradient(x)) {
                    *gj += pj;
                }
            }
            _ => {}
        }
        Ok(g)
    }

    /// Per-facet coefficients `(a, a', a'')` of `G = sum a(L) nu nu^T`.
    fn facet_coefficients(&self, l: &[f64]) -> Vec<(f64, f64, f64)> {
        match &self.kind {
            PotentialKind::Dilation { s } => {
                let s = *s;
                l.iter()
                    .zip(&self.centred_offsets)
                    .map(|(&l, &c)| {
                        let ls = l + (s - 1.0) * c;
                        // rearranged to avoid cancellation as s -> 1
                        let a = (s - 1.0) * (l + s * c) / (2.0 * s * l * ls);
                        let a1 = -(s - 1.0) * (l * l + 2.0 * s * l * c + s * (s - 1.0) * c * c) / (2.0 * s * l * l * ls * ls);
                        let a2 = (s - 1.0)
                            * (l.powi(3) + s * (3.0 * l * l * c + 3.0 * (s - 1.0) * l * c * c + (s - 1.0).powi(2) * c.powi(3)))
                            / (s * l.powi(3) * ls.powi(3));
                        (a, a1, a2)
                    })
                    .collect()
            }
            _ => l.iter().map(|&l| (0.5 / l, -0.5 / (l * l), 1.0 / l.powi(3))).collect(),
        }
    }

    fn rank_one_sum(&self, coef: impl Fn(usize, &[f64]) -> f64) -> DMatrix<f64> {
        let n = self.fp.dim;
        let mut g = DMatrix::zeros(n, n);
        for (i, nu) in self.fp.normals.iter().enumerate() {
            let a = coef(i, nu);
            if a == 0.0 {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    g[(r, c)] += a * nu[r] * nu[c];
                }
            }
        }
        g
    }

    /// `G = Hess u`.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let l = self.facet_values(x)?;
        let coef = self.facet_coefficients(&l);
        let mut g = self.rank_one_sum(|i, _| coef[i].0);
        match &self.kind {
            PotentialKind::QuadraticPerturbed { axis, c } => g[(*axis, *axis)] += c,
            PotentialKind::GuilleminPlusPoly { poly } => g += poly.hessian(x),
            _ => {}
        }
        Ok(g)
    }

    /// `G` of the Guillemin potential on the same polytope.
    pub fn guillemin_hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let l = self.facet_values(x)?;
        Ok(self.rank_one_sum(|i, _| 0.5 / l[i]))
    }

    pub fn eval_grad_hess(&self, x: &[f64]) -> Result<HessianSample> {
        let g = self.hessian(x)?;
        let (h, logdet_g) = spd_inverse(&g)?;
        Ok(HessianSample { x: x.to_vec(), g, h, logdet_g })
    }

    /// `[dG/dx_k]_k` in closed form; `None` for polynomial perturbations.
    pub fn hessian_derivatives(&self, x: &[f64]) -> Result<Option<Vec<DMatrix<f64>>>> {
        if !self.has_closed_form_derivatives() {
            return Ok(None);
        }
        let l = self.facet_values(x)?;
        let coef = self.facet_coefficients(&l);
        Ok(Some((0..self.fp.dim).map(|k| self.rank_one_sum(|i, nu| coef[i].1 * nu[k])).collect()))
    }

    /// `[d^2 G/dx_k dx_m]_{k,m}` in closed form; `None` for polynomial perturbations.
    pub fn hessian_second_derivatives(&self, x: &[f64]) -> Result<Option<Vec<Vec<DMatrix<f64>>>>> {
        if !self.has_closed_form_derivatives() {
            return Ok(None);
        }
        let l = self.facet_values(x)?;
        let coef = self.facet_coefficients(&l);
        let n = self.fp.dim;
        Ok(Some((0..n).map(|k| (0..n).map(|m| self.rank_one_sum(|i, nu| coef[i].2 * nu[k] * nu[m])).collect()).collect()))
    }

    /// `H_c[i][i]` for `u_c` through the cofactor formula
    /// `det M_ii / (det G_0 + c det M_ii)`.
    pub fn hc_diag(&self, x: &[f64]) -> Result<f64> {
        let PotentialKind::QuadraticPerturbed { axis, c } = self.kind else {
            return Err(Error::InvalidParameter("hc_diag needs a quadratic-perturbed potential".into()));
        };
        let g0 = self.guillemin_hessian(x)?;
        let minor = if g0.nrows() == 1 { 1.0 } else { g0.clone().remove_row(axis).remove_column(axis).determinant() };
        Ok(minor / (g0.determinant() + c * minor))
    }

    /// Samples Halton interior points plus points approaching every face.
    /// Full `G` must be positive definite everywhere; near a face, `G`
    /// restricted to the face's tangent space must be as well.
    pub fn validate(&self, samples: usize) -> ValidationReport {
        let samples = samples.max(10);
        let mut worst = f64::INFINITY;
        let mut worst_point = Vec::new();
        let mut checked = 0;
        let mut record = |m: f64, x: &[f64], worst: &mut f64| {
            if !(m >= *worst) {
                *worst = if m.is_nan() { f64::NEG_INFINITY } else { m };
                worst_point = x.to_vec();
            }
        };
        for x in self.fp.interior_points(samples, 1e-3) {
            checked += 1;
            let m = self.min_eig(&x, None);
            record(m, &x, &mut worst);
        }
        let n = self.fp.dim;
        for face in self.fp.faces() {
            let tangent = (face.len() < n).then(|| self.tangent_basis(&face));
            for e in 2..=6 {
                let x = self.fp.near_face(&face, 10f64.powi(-e));
                checked += 1;
                let m = self.min_eig(&x, None);
                record(m, &x, &mut worst);
                if let Some(t) = &tangent {
                    let m = self.min_eig(&x, Some(t));
                    record(m, &x, &mut worst);
                }
            }
        }
        ValidationReport { passed: worst > 0.0, worst_margin: worst, worst_point, points_checked: checked }
    }

    fn min_eig(&self, x: &[f64], basis: Option<&DMatrix<f64>>) -> f64 {
        let g = match self.hessian(x) {
            Ok(g) => g,
            Err(_) => return f64::NEG_INFINITY,
        };
        let g = match basis {
            Some(t) => t.transpose() * g * t,
            None => g,
        };
        if !g.iter().all(|v| v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        SymmetricEigen::jacobi(&g, 1e-14).values[0]
    }

    /// Orthonormal basis of the directions orthogonal to the face normals.
    fn tangent_basis(&self, face: &[usize]) -> DMatrix<f64> {
        let n = self.fp.dim;
        let nn = DMatrix::from_fn(n, n, |r, c| face.iter().map(|&i| self.fp.normals[i][r] * self.fp.normals[i][c]).sum());
        let e = SymmetricEigen::jacobi(&nn, 1e-15);
        let k = n - face.len();
        e.vectors.columns(0, k).into_owned()
    }
}

/// `B_x = (1/2) sum (L_k + c_k) / L_k^2 nu_k nu_k^T`: the first-order term of
/// the dilation Hessian as `s -> 1`, for a polytope containing the origin.
pub fn dilation_limit_b(p: &LabelledPolytope, x: &[f64]) -> Result<DMatrix<f64>> {
    let offsets = p.offsets_f64();
    for (facet, &c) in offsets.iter().enumerate() {
        if !(c > 0.0) {
            return Err(Error::OriginNotInterior { facet, offset: c });
        }
    }
    let normals = p.normals_f64();
    let n = p.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut b = DMatrix::zeros(n, n);
    for (facet, (nu, c)) in normals.iter().zip(&offsets).enumerate() {
        let l: f64 = nu.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + c;
        if !(l >= INTERIOR_GUARD) {
            return Err(Error::BoundaryPoint { facet, value: l, guard: INTERIOR_GUARD });
        }
        let v = DVector::from_column_slice(nu);
        b += (0.5 * (l + c) / (l * l)) * &v * v.transpose();
    }
    Ok(b)
}
