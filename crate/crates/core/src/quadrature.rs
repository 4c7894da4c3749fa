//! Composite quadrature on a polytope of dimension at most 3.
//!
//! `P` is triangulated by coning the vertex barycentre of each face over the
//! triangulation of its facets (edges are kept as segments), each simplex is
//! refined `depth` times by midpoint subdivision, and every leaf carries a
//! collapsed Gauss-Jacobi product rule with `order` points per direction,
//! exact for polynomials of degree `2 * order - 1`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymmetricEigen;
use crate::polytope::LabelledPolytope;
use crate::rational::{self, Rational};

pub const MAX_DIM: usize = 3;
/// Points per direction of the collapsed rule (exact to degree 5).
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_DEPTH: usize = 2;

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Leaf simplices as vertex tuples; node block `i` belongs to simplex `i`.
    pub simplices: Vec<Vec<Vec<f64>>>,
    pub nodes_per_simplex: usize,
    pub order: usize,
    pub depth: usize,
    /// Exact volume of `P` as a reduced fraction string.
    pub volume: String,
    #[serde(skip)]
    pub volume_f64: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Sequential sum in node order.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss-Jacobi rule for `int_0^1 (1 - t)^a f(t) dt` with `q` nodes.
pub fn gauss_jacobi_unit(q: usize, a: u32) -> (Vec<f64>, Vec<f64>) {
    let alpha = a as f64;
    let mut jm = DMatrix::<f64>::zeros(q, q);
    for k in 0..q {
        let kf = k as f64;
        let s = 2.0 * kf + alpha;
        jm[(k, k)] = if k == 0 { -alpha / (alpha + 2.0) } else { -alpha * alpha / (s * (s + 2.0)) };
        if k + 1 < q {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + alpha;
            let b = (4.0 * k1 * (k1 + alpha) * k1 * (k1 + alpha) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))).sqrt();
            jm[(k, k + 1)] = b;
            jm[(k + 1, k)] = b;
        }
    }
    let e = SymmetricEigen::jacobi(&jm, 1e-16);
    // mass of (1 - x)^a on [-1, 1] is 2^(a+1)/(a+1); the map to [0, 1] divides by 2^(a+1)
    let mu = 1.0 / (alpha + 1.0);
    let nodes = e.values.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let weights = (0..q).map(|i| mu * e.vectors[(0, i)].powi(2)).collect();
    (nodes, weights)
}

type Simplex = Vec<Vec<Rational>>;

fn midpoint(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let half = rational::frac(1, 2);
    a.iter().zip(b).map(|(x, y)| (x + y) * &half).collect()
}

fn refine(s: &Simplex) -> Vec<Simplex> {
    let v = |i: usize| s[i].clone();
    let m = |i: usize, j: usize| midpoint(&s[i], &s[j]);
    match s.len() {
        2 => vec![vec![v(0), m(0, 1)], vec![m(0, 1), v(1)]],
        3 => vec![
            vec![v(0), m(0, 1), m(0, 2)],
            vec![m(0, 1), v(1), m(1, 2)],
            vec![m(0, 2), m(1, 2), v(2)],
            vec![m(0, 1), m(1, 2), m(0, 2)],
        ],
        4 => {
            let (x01, x02, x03, x12, x13, x23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
            vec![
                vec![v(0), x01.clone(), x02.clone(), x03.clone()],
                vec![x01.clone(), v(1), x12.clone(), x13.clone()],
                vec![x02.clone(), x12.clone(), v(2), x23.clone()],
                vec![x03.clone(), x13.clone(), x23.clone(), v(3)],
                vec![x01.clone(), x02.clone(), x03.clone(), x13.clone()],
                vec![x01.clone(), x02.clone(), x12.clone(), x13.clone()],
                vec![x02.clone(), x03.clone(), x13.clone(), x23.clone()],
                vec![x02, x12, x13, x23],
            ]
        }
        _ => unreachable!("simplices have 2..=4 vertices"),
    }
}

/// `|det(v_1 - v_0, ..., v_n - v_0)| / n!`.
pub fn simplex_volume(s: &[Vec<Rational>]) -> Rational {
    let n = s.len() - 1;
    let rows: Vec<Vec<Rational>> = (1..=n).map(|i| s[i].iter().zip(&s[0]).map(|(a, b)| a - b).collect()).collect();
    let fact: i64 = (1..=n as i64).product();
    rational::det(rows).abs() / rational::int(fact)
}

struct Faces {
    coords: Vec<Vec<Rational>>,
    active: Vec<Vec<usize>>,
    n: usize,
}

impl Faces {
    fn vertices_of(&self, face: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.coords.len()).filter(|&v| face.iter().all(|i| self.active[v].contains(i))).collect()
    }

    fn triangulate(&self, face: &BTreeSet<usize>) -> Vec<Simplex> {
        let verts = self.vertices_of(face);
        let dim = self.n - face.len();
        if dim == 0 {
            return vec![vec![self.coords[verts[0]].clone()]];
        }
        if dim == 1 {
            return vec![vec![self.coords[verts[0]].clone(), self.coords[verts[1]].clone()]];
        }
        let m = rational::int(verts.len() as i64);
        let centre: Vec<Rational> = (0..self.n).map(|j| verts.iter().map(|&v| self.coords[v][j].clone()).sum::<Rational>() / &m).collect();
        let subfaces: BTreeSet<BTreeSet<usize>> = verts
            .iter()
            .flat_map(|&v| self.active[v].iter().filter(|i| !face.contains(i)).map(|&i| {
                let mut f = face.clone();
                f.insert(i);
                f
            }))
            .collect();
        let mut out = Vec::new();
        for sub in &subfaces {
            for mut s in self.triangulate(sub) {
                s.insert(0, centre.clone());
                out.push(s);
            }
        }
        out
    }
}

/// Leaf simplices of the triangulation refined `depth` times, in canonical order.
pub fn triangulate(p: &LabelledPolytope, depth: usize) -> Result<Vec<Simplex>> {
    let n = p.dim();
    if n > MAX_DIM {
        return Err(Error::DimUnsupported(n));
    }
    let verts = p.vertices()?;
    let faces = Faces { coords: verts.iter().map(|v| v.coords.clone()).collect(), active: verts.into_iter().map(|v| v.active).collect(), n };
    let mut simplices = if n == 1 { vec![faces.coords.clone()] } else { faces.triangulate(&BTreeSet::new()) };
    for _ in 0..depth {
        simplices = simplices.iter().flat_map(refine).collect();
    }
    Ok(simplices)
}

pub fn build_quadrature(p: &LabelledPolytope, order: usize, depth: usize) -> Result<QuadratureRule> {
    let n = p.dim();
    if n > MAX_DIM {
        return Err(Error::DimUnsupported(n));
    }
    if !(1..=4).contains(&order) {
        return Err(Error::BadOrder(order));
    }
    let simplices = triangulate(p, depth)?;
    let volume: Rational = simplices.iter().map(|s| simplex_volume(s)).fold(Rational::zero(), |a, b| a + b);
    // direction j (0-based) carries weight (1 - t)^(n - 1 - j)
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..n).map(|j| gauss_jacobi_unit(order, (n - 1 - j) as u32)).collect();
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    let per = order.pow(n as u32);
    let mut nodes = Vec::with_capacity(simplices.len() * per);
    let mut weights = Vec::with_capacity(simplices.len() * per);
    let mut float_simplices = Vec::with_capacity(simplices.len());
    for s in &simplices {
        let vs: Vec<Vec<f64>> = s.iter().map(|v| v.iter().map(rational::to_f64).collect()).collect();
        let scale = fact * rational::to_f64(&simplex_volume(s));
        for idx in 0..per {
            let mut rem = idx;
            let mut bary = vec![0.0; n + 1];
            let mut left = 1.0;
            let mut w = scale;
            for (j, (tn, tw)) in rules.iter().enumerate() {
                let k = rem % order;
                rem /= order;
                bary[j + 1] = left * tn[k];
                left *= 1.0 - tn[k];
                w *= tw[k];
            }
            bary[0] = left;
            let x: Vec<f64> = (0..n).map(|c| bary.iter().zip(&vs).map(|(b, v)| b * v[c]).sum()).collect();
            nodes.push(x);
            weights.push(w);
        }
        float_simplices.push(vs);
    }
    Ok(QuadratureRule {
        dim: n,
        nodes,
        weights,
        simplices: float_simplices,
        nodes_per_simplex: per,
        order,
        depth,
        volume_f64: rational::to_f64(&volume),
        volume: rational::format(&volume),
    })
}
