//! Deterministic sample points: Halton points in the interior and points
//! approaching the relative interior of each face.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::polytope::LabelledPolytope;
use crate::rational;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Float copy of the polytope data used by all pointwise evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPolytope {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub vertex_active: Vec<Vec<usize>>,
}

impl FloatPolytope {
    pub fn new(p: &LabelledPolytope) -> Result<Self> {
        let verts = p.vertices()?;
        Ok(Self {
            dim: p.dim(),
            normals: p.normals_f64(),
            offsets: p.offsets_f64(),
            vertices: verts.iter().map(|v| v.coords.iter().map(rational::to_f64).collect()).collect(),
            vertex_active: verts.into_iter().map(|v| v.active).collect(),
        })
    }

    pub fn eval(&self, i: usize, x: &[f64]) -> f64 {
        self.normals[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offsets[i]
    }

    pub fn facet_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.normals.len()).map(|i| self.eval(i, x)).collect()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let m = self.vertices.len() as f64;
        (0..self.dim).map(|j| self.vertices.iter().map(|v| v[j]).sum::<f64>() / m).collect()
    }

    /// `min_i max_v L_i(v)`: the thinnest extent of `P` across a facet.
    pub fn width(&self) -> f64 {
        (0..self.normals.len())
            .map(|i| self.vertices.iter().map(|v| self.eval(i, v)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    /// `count` Halton points with `L_i(x) >= rel_margin * width()` for all `i`.
    pub fn interior_points(&self, count: usize, rel_margin: f64) -> Vec<Vec<f64>> {
        let n = self.dim;
        let lo: Vec<f64> = (0..n).map(|j| self.vertices.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..n).map(|j| self.vertices.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let margin = rel_margin * self.width();
        let mut out = Vec::with_capacity(count);
        let mut i = 1u64;
        while out.len() < count && i < 1000 * count as u64 + 1000 {
            let x: Vec<f64> = (0..n).map(|j| lo[j] + (hi[j] - lo[j]) * radical_inverse(i, PRIMES[j % PRIMES.len()])).collect();
            if self.facet_values(&x).iter().all(|&l| l >= margin) {
                out.push(x);
            }
            i += 1;
        }
        out
    }

    /// Faces as sets of facet indices (every nonempty subset of some vertex's
    /// active set), from facets down to vertices.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut faces = BTreeSet::new();
        for act in &self.vertex_active {
            let m = act.len();
            for mask in 1u32..(1 << m) {
                let s: Vec<usize> = (0..m).filter(|b| mask & (1 << b) != 0).map(|b| act[b]).collect();
                faces.insert(s);
            }
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by_key(|f| f.len());
        faces
    }

    /// Centroid of the vertices lying on the face.
    pub fn face_centroid(&self, face: &[usize]) -> Vec<f64> {
        let on: Vec<&Vec<f64>> =
            self.vertices.iter().zip(&self.vertex_active).filter(|(_, a)| face.iter().all(|i| a.contains(i))).map(|(v, _)| v).collect();
        let m = on.len() as f64;
        (0..self.dim).map(|j| on.iter().map(|v| v[j]).sum::<f64>() / m).collect()
    }

    /// Point on the segment from the face centroid to the polytope centroid
    /// with `min_{i in face} L_i = delta`.
    pub fn near_face(&self, face: &[usize], delta: f64) -> Vec<f64> {
        let f = self.face_centroid(face);
        let c = self.centroid();
        let lc = face.iter().map(|&i| self.eval(i, &c)).fold(f64::INFINITY, f64::min);
        let t = delta / lc;
        f.iter().zip(&c).map(|(fi, ci)| fi + t * (ci - fi)).collect()
    }
}
