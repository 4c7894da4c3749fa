//! Rayleigh-Ritz approximation of the first torus-invariant eigenvalue.
//!
//! The trial space is all polynomials of total degree `1..=D`, written as
//! products of Legendre polynomials in coordinates scaled to the bounding box
//! of `P` (same span as the monomials, much better conditioned), each centred
//! by its quadrature mean so the constant mode is excluded.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lower_inverse, PivotedCholesky, SymmetricEigen};
use crate::poly::TestFunction;
use crate::polytope::LabelledPolytope;
use crate::potential::SymplecticPotential;
use crate::quadrature::QuadratureRule;

pub const DEFAULT_DEGREE: usize = 6;
/// Relative pivot threshold below which mass directions are dropped.
pub const MASS_DROP: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-8;

fn legendre(k: usize, t: f64) -> (f64, f64) {
    // (P_k(t), P_k'(t))
    let (mut p0, mut p1) = (1.0, t);
    let (mut d0, mut d1) = (0.0, 1.0);
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 1..k {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * t * p1 - jf * p0) / (jf + 1.0);
        let d2 = d0 + (2.0 * jf + 1.0) * p1;
        (p0, p1) = (p1, p2);
        (d0, d1) = (d1, d2);
    }
    (p1, d1)
}

/// Multi-indices of total degree `1..=degree` in `dim` variables, graded.
fn multi_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|p: Vec<usize>| (0..=degree).map(move |e| [p.clone(), vec![e]].concat())).collect();
    }
    let mut out: Vec<Vec<usize>> = out.into_iter().filter(|a| (1..=degree).contains(&a.iter().sum())).collect();
    out.sort_by_key(|a| (a.iter().sum::<usize>(), a.iter().rev().cloned().collect::<Vec<_>>()));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSpace {
    pub degree: usize,
    pub centre: Vec<f64>,
    pub half_width: Vec<f64>,
    pub indices: Vec<Vec<usize>>,
    /// Quadrature mean of each raw basis function (subtracted on evaluation).
    pub means: Vec<f64>,
}

impl TrialSpace {
    pub fn new(p: &LabelledPolytope, degree: usize, q: &QuadratureRule) -> Result<Self> {
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        let fp = crate::sampling::FloatPolytope::new(p)?;
        let n = fp.dim;
        let lo: Vec<f64> = (0..n).map(|j| fp.vertices.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..n).map(|j| fp.vertices.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let mut s = Self {
            degree,
            centre: lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            half_width: lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect(),
            indices: multi_indices(n, degree),
            means: Vec::new(),
        };
        let b = s.indices.len();
        let mut sums = vec![0.0; b];
        for (x, w) in q.nodes.iter().zip(&q.weights) {
            let (v, _) = s.raw(x);
            for a in 0..b {
                sums[a] += w * v[a];
            }
        }
        s.means = sums.iter().map(|v| v / q.total_weight()).collect();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Uncentred values and gradients (`grads[a][j]`).
    fn raw(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = x.len();
        let t: Vec<f64> = (0..n).map(|j| (x[j] - self.centre[j]) / self.half_width[j]).collect();
        let table: Vec<Vec<(f64, f64)>> = (0..n).map(|j| (0..=self.degree).map(|k| legendre(k, t[j])).collect()).collect();
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for a in &self.indices {
            let v: f64 = (0..n).map(|j| table[j][a[j]].0).product();
            let g: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|i| if i == j { table[i][a[i]].1 / self.half_width[i] } else { table[i][a[i]].0 }).product())
                .collect();
            vals.push(v);
            grads.push(g);
        }
        (vals, grads)
    }

    /// Centred values and gradients.
    pub fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (mut v, g) = self.raw(x);
        for (vi, m) in v.iter_mut().zip(&self.means) {
            *vi -= m;
        }
        (v, g)
    }
}

/// A trial-space element `sum_a c_a phi_a`.
#[derive(Debug, Clone, Serialize)]
pub struct TrialFunction {
    pub space: TrialSpace,
    pub coeffs: Vec<f64>,
}

impl TestFunction for TrialFunction {
    fn dim(&self) -> usize {
        self.space.centre.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.space.eval(x).0.iter().zip(&self.coeffs).map(|(v, c)| v * c).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (_, g) = self.space.eval(x);
        (0..x.len()).map(|j| g.iter().zip(&self.coeffs).map(|(ga, c)| ga[j] * c).sum()).collect()
    }

    /// Not needed by the Ritz machinery; central differences of the gradient.
    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let h = 1e-6;
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (gp, gm) = (self.gradient(&xp), self.gradient(&xm));
            for j in 0..n {
                m[(j, k)] = (gp[j] - gm[j]) / (2.0 * h);
            }
        }
        crate::linalg::symmetrize(m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RitzResult {
    pub degree: usize,
    pub basis_size: usize,
    /// Basis directions kept after the pivoted mass factorisation.
    pub rank: usize,
    pub quad_nodes: usize,
    pub quad_order: usize,
    pub quad_depth: usize,
    pub mass_condition: f64,
    pub stiffness_condition: f64,
    pub eigenvalues: Vec<f64>,
    #[serde(rename = "lambda1T")]
    pub lambda1_t: f64,
    pub eigvec: Vec<f64>,
    pub jacobi_sweeps: usize,
    #[serde(skip)]
    pub space: TrialSpace,
}

impl RitzResult {
    pub fn eigenfunction(&self) -> TrialFunction {
        TrialFunction { space: self.space.clone(), coeffs: self.eigvec.clone() }
    }
}

/// Stiffness and mass matrices of the centred basis.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

/// `H` at every quadrature node.
fn inverse_hessians(u: &SymplecticPotential, q: &QuadratureRule) -> Result<Vec<DMatrix<f64>>> {
    q.nodes.par_iter().map(|x| Ok(u.eval_grad_hess(x)?.h)).collect()
}

/// Per-simplex partial sums computed in parallel, reduced in simplex order.
pub fn assemble(u: &SymplecticPotential, space: &TrialSpace, q: &QuadratureRule) -> Result<Assembled> {
    let hs = inverse_hessians(u, q)?;
    let b = space.len();
    let n = q.dim;
    let per = q.nodes_per_simplex;
    let parts: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..q.simplices.len())
        .into_par_iter()
        .map(|s| {
            let mut a = DMatrix::zeros(b, b);
            let mut m = DMatrix::zeros(b, b);
            for i in s * per..(s + 1) * per {
                let w = q.weights[i];
                let (v, g) = space.eval(&q.nodes[i]);
                let h = &hs[i];
                let hg: Vec<Vec<f64>> = g.iter().map(|ga| (0..n).map(|r| (0..n).map(|c| h[(r, c)] * ga[c]).sum()).collect()).collect();
                for r in 0..b {
                    for c in 0..b {
                        a[(r, c)] += w * (0..n).map(|j| g[r][j] * hg[c][j]).sum::<f64>();
                        m[(r, c)] += w * v[r] * v[c];
                    }
                }
            }
            (a, m)
        })
        .collect();
    let mut stiffness = DMatrix::zeros(b, b);
    let mut mass = DMatrix::zeros(b, b);
    for (a, m) in parts {
        stiffness += a;
        mass += m;
    }
    Ok(Assembled { stiffness, mass })
}

/// `int H(df, df) / int (f - mean f)^2` under the rule.
pub fn rayleigh_quotient(u: &SymplecticPotential, f: &dyn TestFunction, q: &QuadratureRule) -> Result<f64> {
    let vol = q.total_weight();
    let mean = q.integrate(|x| f.value(x)) / vol;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut norm = 0.0;
    for (x, w) in q.nodes.iter().zip(&q.weights) {
        let h = u.eval_grad_hess(x)?.h;
        let g = DVector::from_vec(f.gradient(x));
        num += w * g.dot(&(&h * &g));
        let v = f.value(x);
        den += w * (v - mean).powi(2);
        norm += w * v * v;
    }
    if !(den > 1e-24 * norm.max(f64::MIN_POSITIVE)) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Output of [`solve_generalized`].
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvector of the smallest value, in full basis coordinates.
    pub vector: Vec<f64>,
    pub rank: usize,
    /// Ratio of the largest to smallest kept Cholesky pivot.
    pub mass_condition: f64,
    pub stiffness_condition: f64,
    pub sweeps: usize,
}

/// Smallest eigenpairs of `A c = lambda M c` on the mass-nondegenerate subspace.
pub fn solve_generalized(asm: &Assembled) -> Result<GeneralizedEigen> {
    let a = &asm.stiffness;
    let scale = a.amax();
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::QuadratureTooCoarse(asym / scale));
    }
    let f = PivotedCholesky::new(&asm.mass, MASS_DROP);
    if f.rank == 0 {
        return Err(Error::MassSingular);
    }
    let r = f.rank;
    let l = f.leading();
    let linv = lower_inverse(&l);
    let keep = &f.perm[..r];
    let ass = DMatrix::from_fn(r, r, |i, j| a[(keep[i], keep[j])]);
    let c = crate::linalg::symmetrize(&linv * ass * linv.transpose());
    let e = SymmetricEigen::jacobi(&c, EIGEN_TOL);
    let lambda = e.values[0];
    if !(lambda > 0.0) {
        return Err(Error::QuadratureTooCoarse(lambda));
    }
    let y = e.vectors.column(0).into_owned();
    let cs = linv.transpose() * y;
    let mut coeffs = vec![0.0; a.nrows()];
    for (i, &k) in keep.iter().enumerate() {
        coeffs[k] = cs[i];
    }
    let pmax = f.pivots.iter().cloned().fold(0.0, f64::max);
    let pmin = f.pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    let emax = e.values[r - 1];
    Ok(GeneralizedEigen {
        values: e.values,
        vector: coeffs,
        rank: r,
        mass_condition: pmax / pmin,
        stiffness_condition: emax / lambda,
        sweeps: e.sweeps,
    })
}

pub fn lambda1_invariant(u: &SymplecticPotential, degree: usize, q: &QuadratureRule) -> Result<RitzResult> {
    let space = TrialSpace::new(u.polytope(), degree, q)?;
    lambda1_with_space(u, space, q)
}

pub fn lambda1_with_space(u: &SymplecticPotential, space: TrialSpace, q: &QuadratureRule) -> Result<RitzResult> {
    let asm = assemble(u, &space, q)?;
    let g = solve_generalized(&asm)?;
    Ok(RitzResult {
        degree: space.degree,
        basis_size: space.len(),
        rank: g.rank,
        quad_nodes: q.len(),
        quad_order: q.order,
        quad_depth: q.depth,
        mass_condition: g.mass_condition,
        stiffness_condition: g.stiffness_condition,
        lambda1_t: g.values[0],
        eigenvalues: g.values,
        eigvec: g.vector,
        jacobi_sweeps: g.sweeps,
        space,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    #[serde(rename = "lambda1T")]
    pub lambda1_t: f64,
    pub degree: usize,
    pub quad_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub param_name: String,
    pub rows: Vec<SweepRow>,
    /// Guillemin value on the same basis and rule (dilation sweeps only).
    pub reference: Option<f64>,
    /// Diagnostics that do not fail the sweep.
    pub flags: Vec<String>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("param,lambda1T,degree,quad_nodes\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.param, r.lambda1_t, r.degree, r.quad_nodes));
        }
        s
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda1_t).collect()
    }
}

fn run_sweep(p: &LabelledPolytope, params: &[f64], degree: usize, q: &QuadratureRule, make: impl Fn(f64) -> Result<SymplecticPotential>) -> Result<Vec<SweepRow>> {
    let space = TrialSpace::new(p, degree, q)?;
    params
        .iter()
        .map(|&t| {
            let r = lambda1_with_space(&make(t)?, space.clone(), q)?;
            Ok(SweepRow { param: t, lambda1_t: r.lambda1_t, degree, quad_nodes: q.len() })
        })
        .collect()
}

/// `lambda_1^T` of `u_c` along `c_list` (non-negative, strictly ascending).
/// Rows that fail to decrease by more than `1e-8` are flagged.
pub fn sweep_uc(p: &LabelledPolytope, axis: usize, c_list: &[f64], degree: usize, q: &QuadratureRule) -> Result<SweepTable> {
    if c_list.is_empty() || c_list.iter().any(|c| !(c.is_finite() && *c >= 0.0)) || c_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadSweep { order: "ascending", range: "[0, inf)" });
    }
    let rows = run_sweep(p, c_list, degree, q, |c| SymplecticPotential::quadratic_perturbed(p, axis, c))?;
    let flags = rows
        .windows(2)
        .filter(|w| !(w[1].lambda1_t < w[0].lambda1_t - 1e-8))
        .map(|w| format!("not decreasing between c = {} and c = {}", w[0].param, w[1].param))
        .collect();
    Ok(SweepTable { param_name: "c".into(), rows, reference: None, flags })
}

/// `lambda_1^T` of the dilation family along `s_list` (strictly decreasing,
/// all `> 1`). Entries below the Guillemin value and non-monotone steps are
/// flagged rather than treated as failures.
pub fn sweep_dilation(p: &LabelledPolytope, s_list: &[f64], degree: usize, q: &QuadratureRule) -> Result<SweepTable> {
    if s_list.is_empty() || s_list.iter().any(|s| !(s.is_finite() && *s > 1.0)) || s_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::BadSweep { order: "descending", range: "(1, inf)" });
    }
    let space = TrialSpace::new(p, degree, q)?;
    let reference = lambda1_with_space(&SymplecticPotential::guillemin(p)?, space, q)?.lambda1_t;
    let rows = run_sweep(p, s_list, degree, q, |s| SymplecticPotential::dilation(p, s))?;
    let mut flags: Vec<String> = rows
        .iter()
        .filter(|r| r.lambda1_t < reference - 1e-6)
        .map(|r| format!("s = {}: value below the Guillemin value {}", r.param, reference))
        .collect();
    flags.extend(rows.windows(2).filter(|w| w[1].lambda1_t < w[0].lambda1_t).map(|w| format!("not increasing between s = {} and s = {}", w[0].param, w[1].param)));
    Ok(SweepTable { param_name: "s".into(), rows, reference: Some(reference), flags })
}
