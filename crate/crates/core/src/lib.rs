// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod polytope;
pub mod potential;
pub mod projective;
pub mod quadrature;
pub mod rational;
pub mod sampling;
pub mod spectral;
