//! Smooth functions on the polytope with exact derivatives.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A function on `P` that knows its gradient and Hessian.
pub trait TestFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> DMatrix<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coef: f64,
}

/// Sparse polynomial in monomials `coef * prod x_i^e_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<Term>,
}

fn pow(x: f64, e: u32) -> f64 {
    x.powi(e as i32)
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Term>) -> Self {
        assert!(terms.iter().all(|t| t.exponents.len() == dim), "exponent length must equal dim");
        Self { dim, terms }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, vec![Term { exponents: vec![0; dim], coef: c }])
    }

    /// `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::new(dim, vec![Term { exponents: e, coef: 1.0 }])
    }

    /// `sum a_i x_i + b`.
    pub fn affine(a: &[f64], b: f64) -> Self {
        let dim = a.len();
        let mut terms: Vec<Term> = a
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; dim];
                e[i] = 1;
                Term { exponents: e, coef: c }
            })
            .collect();
        terms.push(Term { exponents: vec![0; dim], coef: b });
        Self::new(dim, terms)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum()).max().unwrap_or(0)
    }

    /// Mixed partial derivative of order `orders` (one entry per variable).
    pub fn derivative_at(&self, orders: &[u32], x: &[f64]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let mut v = t.coef;
            for ((&e, &o), &xi) in t.exponents.iter().zip(orders).zip(x) {
                if o > e {
                    v = 0.0;
                    break;
                }
                let falling: f64 = (0..o).map(|j| (e - j) as f64).product();
                v *= falling * pow(xi, e - o);
            }
            total += v;
        }
        total
    }

    fn unit(&self, idx: &[usize]) -> Vec<u32> {
        let mut o = vec![0; self.dim];
        for &i in idx {
            o[i] += 1;
        }
        o
    }

    /// `d^3 v / dx_i dx_j dx_k`.
    pub fn third(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        self.derivative_at(&self.unit(&[i, j, k]), x)
    }
}

impl TestFunction for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.derivative_at(&vec![0; self.dim], x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.derivative_at(&self.unit(&[i]), x)).collect()
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.derivative_at(&self.unit(&[i, j]), x))
    }
}
