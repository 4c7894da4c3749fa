//! Labelled Delzant polytopes in exact arithmetic.
//!
//! A polytope is stored by its defining functions `L_i(x) = <x, nu_i> + c_i`
//! with primitive inward integer normals `nu_i` and rational offsets `c_i`.
//! Everything in this module (vertices, lattice points, the shrunken
//! polytopes `P_k`, the bound `2nk(N_k+1)/N_k`) is computed exactly.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Search cutoff for `k0` when none is given.
pub const DEFAULT_K_MAX: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rational,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rational) -> Self {
        Self { normal, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub coords: Vec<Rational>,
    /// Sorted indices of the facets through this vertex.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledPolytope {
    dim: usize,
    facets: Vec<Facet>,
}

impl LabelledPolytope {
    /// Builds a polytope and checks every structural invariant: primitive
    /// normals, boundedness, nonempty interior, simplicity and that no
    /// inequality is redundant.
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        let p = Self::new_unchecked(dim, facets)?;
        for (i, f) in p.facets.iter().enumerate() {
            let g = f.normal.iter().fold(0i64, |g, &a| g.gcd(&a));
            if g != 1 {
                return Err(Error::NonPrimitiveNormal { facet: i, normal: f.normal.clone(), gcd: g });
            }
        }
        if p.facets.len() < dim + 1 {
            return Err(Error::TooFewFacets { dim, needed: dim + 1, got: p.facets.len() });
        }
        let verts = p.vertices()?;
        let centroid = centroid_of(&verts, dim);
        if (0..p.facets.len()).any(|i| !p.eval(i, &centroid).is_positive()) {
            return Err(Error::EmptyInterior);
        }
        p.check_irredundant(&verts)?;
        Ok(p)
    }

    /// Only checks shapes. Used for shrunken polytopes `P_k`, which may be
    /// degenerate, and for tests that need malformed input.
    pub fn new_unchecked(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (i, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(Error::NormalLength { facet: i, expected: dim, got: f.normal.len() });
            }
        }
        Ok(Self { dim, facets })
    }

    /// The interval `[lo, hi]`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(1, vec![Facet::new(vec![1], -lo), Facet::new(vec![-1], hi)])
    }

    /// The standard simplex `{x_i >= 0, sum x_i <= 1}` scaled by `scale`.
    pub fn standard_simplex(dim: usize, scale: i64) -> Result<Self> {
        let mut facets: Vec<Facet> = (0..dim)
            .map(|i| {
                let mut nu = vec![0; dim];
                nu[i] = 1;
                Facet::new(nu, Rational::zero())
            })
            .collect();
        facets.push(Facet::new(vec![-1; dim], rational::int(scale)));
        Self::new(dim, facets)
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Result<Self> {
        let mut facets = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut nu = vec![0; dim];
            nu[i] = 1;
            facets.push(Facet::new(nu, -lo.clone()));
        }
        for i in 0..dim {
            let mut nu = vec![0; dim];
            nu[i] = -1;
            facets.push(Facet::new(nu, hi.clone()));
        }
        Self::new(dim, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn normals(&self) -> impl Iterator<Item = &[i64]> {
        self.facets.iter().map(|f| f.normal.as_slice())
    }

    /// Same normals, new offsets.
    pub fn with_offsets(&self, offsets: Vec<Rational>) -> Self {
        assert_eq!(offsets.len(), self.facets.len());
        let facets = self.facets.iter().zip(offsets).map(|(f, c)| Facet::new(f.normal.clone(), c)).collect();
        Self { dim: self.dim, facets }
    }

    /// `L_i(x)` at a rational point.
    pub fn eval(&self, i: usize, x: &[Rational]) -> Rational {
        let f = &self.facets[i];
        f.normal.iter().zip(x).fold(f.offset.clone(), |acc, (&a, xi)| acc + xi * BigInt::from(a))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        (0..self.facets.len()).all(|i| rational::is_nonneg(&self.eval(i, x)))
    }

    pub fn normals_f64(&self) -> Vec<Vec<f64>> {
        self.facets.iter().map(|f| f.normal.iter().map(|&a| a as f64).collect()).collect()
    }

    pub fn offsets_f64(&self) -> Vec<f64> {
        self.facets.iter().map(|f| rational::to_f64(&f.offset)).collect()
    }

    fn normal_rows(&self, idx: &[usize]) -> Vec<Vec<Rational>> {
        idx.iter().map(|&i| self.facets[i].normal.iter().map(|&a| rational::int(a)).collect()).collect()
    }

    fn is_bounded(&self) -> bool {
        let n = self.dim;
        let all: Vec<usize> = (0..self.facets.len()).collect();
        if rational::rank(self.normal_rows(&all)) < n {
            return false;
        }
        // The recession cone {y : <nu_i, y> >= 0} is pointed here, so it is
        // nonzero iff it has an extreme ray cut out by n-1 independent normals.
        for subset in all.iter().copied().combinations(n - 1) {
            let rows = self.normal_rows(&subset);
            let y: Vec<Rational> = (0..n)
                .map(|j| {
                    let minor: Vec<Vec<Rational>> = rows
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                        .collect();
                    let d = rational::det(minor);
                    if j % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect();
            if y.iter().all(Zero::is_zero) {
                continue;
            }
            let dots: Vec<Rational> = self
                .facets
                .iter()
                .map(|f| f.normal.iter().zip(&y).fold(Rational::zero(), |acc, (&a, yi)| acc + yi * BigInt::from(a)))
                .collect();
            if dots.iter().all(|d| !d.is_negative()) || dots.iter().all(|d| !d.is_positive()) {
                return false;
            }
        }
        true
    }

    /// All vertices, sorted lexicographically, each with its active facets.
    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        let n = self.dim;
        let d = self.facets.len();
        if d < n || !self.is_bounded() {
            return Err(Error::UnboundedOrEmpty);
        }
        let mut found: BTreeMap<Vec<Rational>, ()> = BTreeMap::new();
        for subset in (0..d).combinations(n) {
            let a = self.normal_rows(&subset);
            let b = subset.iter().map(|&i| -self.facets[i].offset.clone()).collect();
            if let Some(x) = rational::solve(a, b) {
                if self.contains(&x) {
                    found.insert(x, ());
                }
            }
        }
        if found.is_empty() {
            return Err(Error::UnboundedOrEmpty);
        }
        let mut out = Vec::with_capacity(found.len());
        for (coords, ()) in found {
            let active: Vec<usize> = (0..d).filter(|&i| self.eval(i, &coords).is_zero()).collect();
            if active.len() > n {
                return Err(Error::NonSimple {
                    vertex: coords.iter().map(rational::format).collect(),
                    active: active.len(),
                });
            }
            out.push(Vertex { coords, active });
        }
        Ok(out)
    }

    fn check_irredundant(&self, verts: &[Vertex]) -> Result<()> {
        // In a simple polytope a facet-defining inequality is tight at some
        // vertex; a redundant one touching P would break simplicity instead.
        for i in 0..self.facets.len() {
            if !verts.iter().any(|v| v.active.contains(&i)) {
                return Err(Error::RedundantFacet { facet: i });
            }
        }
        Ok(())
    }

    /// Average of the vertices (exact).
    pub fn vertex_centroid(&self) -> Result<Vec<Rational>> {
        Ok(centroid_of(&self.vertices()?, self.dim))
    }

    /// Every vertex's active normals form a basis of `Z^n`.
    pub fn is_delzant(&self) -> Result<bool> {
        for v in self.vertices()? {
            let d = rational::det(self.normal_rows(&v.active));
            if d.abs() != Rational::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.vertices()?.iter().all(|v| v.coords.iter().all(|c| c.is_integer())))
    }

    /// Standard simplex up to an integral affine change of coordinates: a
    /// simplex whose only lattice points are its `n+1` vertices.
    pub fn is_unimodular_simplex(&self) -> Result<bool> {
        if self.facets.len() != self.dim + 1 || !self.is_integral()? || !self.is_delzant()? {
            return Ok(false);
        }
        Ok(self.lattice_points(1)?.points.len() == self.dim + 1)
    }

    /// Points of `P ∩ Z^n/k`, `N_k`, `L_min(., k)` and the shrunken `P_k`.
    pub fn lattice_points(&self, k: u64) -> Result<LatticeData> {
        if k == 0 {
            return Err(Error::ZeroRefinement);
        }
        let verts = self.vertices()?;
        let kq = Rational::from_integer(BigInt::from(k));
        let n = self.dim;
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|j| {
                let lo = verts.iter().map(|v| &v.coords[j]).min().unwrap() * &kq;
                let hi = verts.iter().map(|v| &v.coords[j]).max().unwrap() * &kq;
                (
                    rational::ceil(&lo).to_i64().expect("bounding box fits in i64"),
                    rational::floor(&hi).to_i64().expect("bounding box fits in i64"),
                )
            })
            .collect();
        // membership for m/k: <m, nu_i> + k c_i >= 0
        let kc: Vec<Rational> = self.facets.iter().map(|f| &f.offset * &kq).collect();
        let inside = |m: &[i64]| {
            self.facets.iter().zip(&kc).all(|(f, c)| {
                let dot: i64 = f.normal.iter().zip(m).map(|(a, b)| a * b).sum();
                !(c + BigInt::from(dot)).is_negative()
            })
        };
        let (lo0, hi0) = ranges[0];
        let mut numerators: Vec<Vec<i64>> = (lo0..=hi0.max(lo0 - 1))
            .into_par_iter()
            .flat_map_iter(|first| {
                let rest = &ranges[1..];
                let tails: Vec<Vec<i64>> = if rest.is_empty() {
                    vec![vec![]]
                } else {
                    rest.iter().map(|&(a, b)| a..=b).multi_cartesian_product().collect()
                };
                tails
                    .into_iter()
                    .map(move |t| {
                        let mut m = Vec::with_capacity(t.len() + 1);
                        m.push(first);
                        m.extend(t);
                        m
                    })
                    .filter(|m| inside(m))
                    .collect::<Vec<_>>()
            })
            .collect();
        numerators.sort();
        numerators.dedup();
        if numerators.is_empty() {
            return Err(Error::EmptyLattice { k });
        }
        let points: Vec<Vec<Rational>> = numerators
            .iter()
            .map(|m| m.iter().map(|&a| Rational::new(BigInt::from(a), BigInt::from(k))).collect())
            .collect();
        let l_min: Vec<Rational> = (0..self.facets.len())
            .map(|i| points.iter().map(|p| self.eval(i, p)).min().unwrap())
            .collect();
        let shrunk = self.with_offsets(self.facets.iter().zip(&l_min).map(|(f, l)| &f.offset - l).collect());
        Ok(LatticeData { k, n_k: points.len() - 1, points, numerators, l_min, shrunk })
    }

    /// Active-set bijection test between `self` and a polytope with the same
    /// normals. Degenerate or redundant `q` yields `false`.
    pub fn same_combinatorial_type(&self, q: &LabelledPolytope) -> Result<bool> {
        if self.dim != q.dim
            || self.facets.len() != q.facets.len()
            || self.facets.iter().zip(&q.facets).any(|(a, b)| a.normal != b.normal)
        {
            return Err(Error::MismatchedNormals);
        }
        let mine: BTreeSet<Vec<usize>> = self.vertices()?.into_iter().map(|v| v.active).collect();
        let Ok(theirs) = q.vertices() else { return Ok(false) };
        if q.check_irredundant(&theirs).is_err() {
            return Ok(false);
        }
        let theirs: BTreeSet<Vec<usize>> = theirs.into_iter().map(|v| v.active).collect();
        Ok(mine == theirs)
    }

    /// Smallest `k <= k_max` with `P_k` of the same combinatorial type as `P`.
    pub fn k0(&self, k_max: u64) -> Result<u64> {
        for k in 1..=k_max {
            match self.lattice_points(k) {
                Err(Error::EmptyLattice { .. }) => continue,
                Err(e) => return Err(e),
                Ok(ld) => {
                    if self.same_combinatorial_type(&ld.shrunk)? {
                        return Ok(k);
                    }
                }
            }
        }
        Err(Error::K0NotFound { k_max })
    }

    fn require_k_at_least_k0(&self, k: u64) -> Result<()> {
        if k == 0 {
            return Err(Error::ZeroRefinement);
        }
        match self.k0(k) {
            Ok(_) => Ok(()),
            Err(Error::K0NotFound { .. }) => Err(Error::PrematureK { k }),
            Err(e) => Err(e),
        }
    }

    /// Builds `kP_k` and checks it is integral, Delzant and has `N_k + 1`
    /// lattice points.
    pub fn check_kpk_integral(&self, k: u64) -> Result<KpkReport> {
        self.require_k_at_least_k0(k)?;
        let ld = self.lattice_points(k)?;
        let kq = Rational::from_integer(BigInt::from(k));
        let scaled = ld.shrunk.with_offsets(ld.shrunk.facets.iter().map(|f| &f.offset * &kq).collect());
        let same_type = self.same_combinatorial_type(&ld.shrunk)?;
        // a collapsed P_k (possible for some k > k0) has no usable vertex set
        let (is_integral, is_delzant, lattice_count) = if same_type {
            (scaled.is_integral()?, scaled.is_delzant()?, scaled.lattice_points(1)?.points.len())
        } else {
            (false, false, scaled.lattice_points(1).map(|l| l.points.len()).unwrap_or(0))
        };
        Ok(KpkReport {
            k,
            n_k: ld.n_k,
            lattice_count,
            lattice_count_matches: lattice_count == ld.n_k + 1,
            same_type,
            is_integral,
            is_delzant,
            scaled,
        })
    }

    /// `2 n k (N_k + 1) / N_k`, exact. Without `k`, integral polytopes use
    /// `k = 1` and others `k0(P)`.
    pub fn bly_bound(&self, k: Option<u64>) -> Result<BlyBound> {
        let k = match k {
            Some(k) => {
                self.require_k_at_least_k0(k)?;
                k
            }
            None if self.is_integral()? => 1,
            None => self.k0(DEFAULT_K_MAX)?,
        };
        let ld = self.lattice_points(k)?;
        bound_from_count(self.dim, k, ld.n_k)
    }
}

pub(crate) fn bound_from_count(dim: usize, k: u64, n_k: usize) -> Result<BlyBound> {
    if n_k == 0 {
        return Err(Error::DegenerateN);
    }
    let nk = BigInt::from(n_k);
    let bound = Rational::new(BigInt::from(2 * dim as u64 * k) * (&nk + 1), nk);
    Ok(BlyBound { k_used: k, n_k, is_integer_bound: bound.is_integer(), bound })
}

fn centroid_of(verts: &[Vertex], dim: usize) -> Vec<Rational> {
    let count = Rational::from_integer(BigInt::from(verts.len()));
    (0..dim)
        .map(|j| verts.iter().fold(Rational::zero(), |acc, v| acc + &v.coords[j]) / &count)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeData {
    pub k: u64,
    /// Points of `P ∩ Z^n/k`, lexicographically sorted.
    pub points: Vec<Vec<Rational>>,
    /// The same points scaled by `k` (integer vectors `m` with point `m/k`).
    pub numerators: Vec<Vec<i64>>,
    pub n_k: usize,
    pub l_min: Vec<Rational>,
    /// `P_k`: same normals, offsets `c_i - L_min(i, k)`.
    pub shrunk: LabelledPolytope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpkReport {
    pub k: u64,
    pub n_k: usize,
    pub scaled: LabelledPolytope,
    /// `P_k` has the combinatorial type of `P`.
    pub same_type: bool,
    pub is_integral: bool,
    pub is_delzant: bool,
    pub lattice_count: usize,
    pub lattice_count_matches: bool,
}

impl KpkReport {
    pub fn passes(&self) -> bool {
        self.same_type && self.is_integral && self.is_delzant && self.lattice_count_matches
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlyBound {
    pub k_used: u64,
    pub n_k: usize,
    pub bound: Rational,
    pub is_integer_bound: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn simplex2() -> LabelledPolytope {
        LabelledPolytope::standard_simplex(2, 1).unwrap()
    }

    fn interval(lo: Rational, hi: Rational) -> LabelledPolytope {
        LabelledPolytope::interval(lo, hi).unwrap()
    }

    fn coords(v: &[Vertex]) -> Vec<Vec<Rational>> {
        v.iter().map(|v| v.coords.clone()).collect()
    }

    #[test]
    fn simplex_vertices_and_active_sets() {
        let v = simplex2().vertices().unwrap();
        assert_eq!(coords(&v), vec![vec![int(0), int(0)], vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(v[0].active, vec![0, 1]);
        assert_eq!(v[1].active, vec![0, 2]);
        assert_eq!(v[2].active, vec![1, 2]);
    }

    #[test]
    fn interval_and_square_vertices() {
        let v = interval(int(0), int(1)).vertices().unwrap();
        assert_eq!(coords(&v), vec![vec![int(0)], vec![int(1)]]);
        let sq = LabelledPolytope::cube(2, int(0), int(1)).unwrap();
        assert_eq!(sq.vertices().unwrap().len(), 4);
        assert!(sq.is_delzant().unwrap());
    }

    #[test]
    fn unbounded_and_empty_inputs() {
        let half = LabelledPolytope::new(1, vec![Facet::new(vec![1], int(0)), Facet::new(vec![1], int(1))]);
        assert_eq!(half.unwrap_err(), Error::UnboundedOrEmpty);
        let empty = LabelledPolytope::new(1, vec![Facet::new(vec![1], int(-2)), Facet::new(vec![-1], int(1))]);
        assert_eq!(empty.unwrap_err(), Error::UnboundedOrEmpty);
        let strip = LabelledPolytope::new(
            2,
            vec![Facet::new(vec![1, 0], int(0)), Facet::new(vec![-1, 0], int(1)), Facet::new(vec![1, 0], int(2))],
        );
        assert_eq!(strip.unwrap_err(), Error::UnboundedOrEmpty);
    }

    #[test]
    fn rejects_non_primitive_and_degenerate() {
        let e = LabelledPolytope::new(1, vec![Facet::new(vec![2], int(0)), Facet::new(vec![-1], int(1))]);
        assert!(matches!(e, Err(Error::NonPrimitiveNormal { facet: 0, .. })));
        let point = LabelledPolytope::new(1, vec![Facet::new(vec![1], int(0)), Facet::new(vec![-1], int(0))]);
        assert!(matches!(point, Err(Error::NonSimple { .. })));
        // x >= 0, y >= 0, x + y <= 1, x <= 5 (last one never tight)
        let red = LabelledPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], int(0)),
                Facet::new(vec![0, 1], int(0)),
                Facet::new(vec![-1, -1], int(1)),
                Facet::new(vec![-1, 0], int(5)),
            ],
        );
        assert_eq!(red.unwrap_err(), Error::RedundantFacet { facet: 3 });
    }

    #[test]
    fn delzant_tests() {
        assert!(simplex2().is_delzant().unwrap());
        // normals (1,0),(0,1),(-1,-2): det at vertex (2,0) is 2
        let orb = LabelledPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], int(0)),
                Facet::new(vec![0, 1], int(0)),
                Facet::new(vec![-1, -2], int(2)),
            ],
        )
        .unwrap();
        assert!(!orb.is_delzant().unwrap());
    }

    #[test]
    fn integrality() {
        assert!(simplex2().is_integral().unwrap());
        assert!(!interval(int(0), frac(3, 2)).is_integral().unwrap());
        assert!(!interval(int(0), frac(1, 3)).is_integral().unwrap());
    }

    #[test]
    fn lattice_enumeration_examples() {
        let ld = simplex2().lattice_points(1).unwrap();
        assert_eq!(ld.points, vec![vec![int(0), int(0)], vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(ld.n_k, 2);
        assert_eq!(ld.l_min, vec![int(0); 3]);
        assert_eq!(ld.shrunk, simplex2());

        let p = interval(int(0), frac(3, 2));
        let ld = p.lattice_points(1).unwrap();
        assert_eq!(ld.points, vec![vec![int(0)], vec![int(1)]]);
        assert_eq!(ld.n_k, 1);
        assert_eq!(ld.l_min, vec![int(0), frac(1, 2)]);
        assert_eq!(ld.shrunk, interval(int(0), int(1)));

        let p = interval(int(0), frac(1, 3));
        let ld = p.lattice_points(3).unwrap();
        assert_eq!(ld.points, vec![vec![int(0)], vec![frac(1, 3)]]);
        assert_eq!(ld.n_k, 1);
        assert_eq!(ld.l_min, vec![int(0), int(0)]);
        assert_eq!(ld.shrunk, p);

        let tiny = interval(frac(1, 5), frac(2, 5));
        assert_eq!(tiny.lattice_points(1).unwrap_err(), Error::EmptyLattice { k: 1 });
    }

    #[test]
    fn combinatorial_type_examples() {
        let p = interval(int(0), frac(3, 2));
        assert!(p.same_combinatorial_type(&interval(int(0), int(1))).unwrap());
        let third = interval(int(0), frac(1, 3));
        let point = third.with_offsets(vec![int(0), int(0)]);
        assert!(!third.same_combinatorial_type(&point).unwrap());
        let shifted = simplex2().with_offsets(vec![frac(-1, 10), frac(-1, 10), int(1)]);
        assert!(simplex2().same_combinatorial_type(&shifted).unwrap());
        let sq = LabelledPolytope::cube(2, int(0), int(1)).unwrap();
        assert_eq!(simplex2().same_combinatorial_type(&sq).unwrap_err(), Error::MismatchedNormals);
    }

    #[test]
    fn k0_examples() {
        assert_eq!(simplex2().k0(DEFAULT_K_MAX).unwrap(), 1);
        assert_eq!(interval(int(0), frac(3, 2)).k0(DEFAULT_K_MAX).unwrap(), 1);
        assert_eq!(interval(int(0), frac(1, 3)).k0(DEFAULT_K_MAX).unwrap(), 3);
        assert_eq!(interval(int(0), frac(1, 3)).k0(2).unwrap_err(), Error::K0NotFound { k_max: 2 });
    }

    #[test]
    fn kpk_examples() {
        let r = interval(int(0), frac(3, 2)).check_kpk_integral(1).unwrap();
        assert!(r.passes());
        assert_eq!(r.scaled, interval(int(0), int(1)));
        assert_eq!(r.lattice_count, 2);

        let r = simplex2().check_kpk_integral(2).unwrap();
        assert!(r.passes());
        assert_eq!(r.n_k, 5);
        assert_eq!(r.lattice_count, 6);
        assert_eq!(r.scaled, LabelledPolytope::standard_simplex(2, 2).unwrap());

        let r = interval(int(0), frac(1, 3)).check_kpk_integral(3).unwrap();
        assert!(r.passes());
        assert_eq!(r.scaled, interval(int(0), int(1)));

        let e = interval(int(0), frac(1, 3)).check_kpk_integral(2).unwrap_err();
        assert_eq!(e, Error::PrematureK { k: 2 });
    }

    #[test]
    fn bly_bound_examples() {
        let b = simplex2().bly_bound(None).unwrap();
        assert_eq!((b.k_used, b.n_k, b.bound.clone(), b.is_integer_bound), (1, 2, int(6), true));
        let b = interval(int(0), int(1)).bly_bound(None).unwrap();
        assert_eq!(b.bound, int(4));
        let b = interval(int(0), frac(1, 3)).bly_bound(Some(3)).unwrap();
        assert_eq!((b.k_used, b.n_k, b.bound), (3, 1, int(12)));
        let b = interval(int(0), frac(1, 3)).bly_bound(None).unwrap();
        assert_eq!(b.k_used, 3);
        let b = simplex2().bly_bound(Some(2)).unwrap();
        assert_eq!(b.bound, frac(48, 5));
        assert!(!b.is_integer_bound);
        assert_eq!(bound_from_count(1, 1, 0).unwrap_err(), Error::DegenerateN);
    }

    #[test]
    fn unimodular_simplex_detection() {
        assert!(simplex2().is_unimodular_simplex().unwrap());
        assert!(!LabelledPolytope::standard_simplex(2, 2).unwrap().is_unimodular_simplex().unwrap());
        assert!(!LabelledPolytope::cube(2, int(0), int(1)).unwrap().is_unimodular_simplex().unwrap());
        assert!(interval(int(0), int(1)).is_unimodular_simplex().unwrap());
    }
}
