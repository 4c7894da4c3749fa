use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // polytope construction and combinatorics
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("facet {facet}: normal has length {got}, expected {expected}")]
    NormalLength { facet: usize, expected: usize, got: usize },
    #[error("facet {facet}: normal {normal:?} is not primitive (gcd {gcd})")]
    NonPrimitiveNormal { facet: usize, normal: Vec<i64>, gcd: i64 },
    #[error("need at least {needed} facets in dimension {dim}, got {got}")]
    TooFewFacets { dim: usize, needed: usize, got: usize },
    #[error("feasible set is empty or unbounded")]
    UnboundedOrEmpty,
    #[error("feasible set has empty interior")]
    EmptyInterior,
    #[error("vertex {vertex:?} lies on {active} facets (polytope is not simple)")]
    NonSimple { vertex: Vec<String>, active: usize },
    #[error("facet {facet} is redundant")]
    RedundantFacet { facet: usize },
    #[error("no points of Z^n/{k} inside the polytope")]
    EmptyLattice { k: u64 },
    #[error("polytopes have different normal lists")]
    MismatchedNormals,
    #[error("no k <= {k_max} gives a shrunken polytope of the same combinatorial type")]
    K0NotFound { k_max: u64 },
    #[error("k = {k} is below k0(P)")]
    PrematureK { k: u64 },
    #[error("lattice has a single point (N_k = 0); the bound is undefined")]
    DegenerateN,
    #[error("polytope is not Delzant")]
    NotDelzant,
    #[error("polytope is not integral")]
    NotIntegral,
    #[error("refinement k must be at least 1")]
    ZeroRefinement,

    // potentials and pointwise geometry
    #[error("point is within {guard:e} of facet {facet} (L = {value:e})")]
    BoundaryPoint { facet: usize, value: f64, guard: f64 },
    #[error("Hessian is not positive definite (pivot {pivot:e})")]
    NotPositiveDefinite { pivot: f64 },
    #[error("invalid potential parameter: {0}")]
    InvalidParameter(String),
    #[error("potential fails validation, worst margin {worst_margin:e}")]
    InvalidPotential { worst_margin: f64 },
    #[error("facet {facet} has offset {offset} <= 0: origin is not interior")]
    OriginNotInterior { facet: usize, offset: f64 },
    #[error("finite-difference step {step:e} underflows at this point")]
    StepUnderflow { step: f64 },
    #[error("point has dimension {got}, polytope has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    // spectral
    #[error("dimension {0} is not supported for quadrature (n <= 3)")]
    DimUnsupported(usize),
    #[error("quadrature order {0} is not in 1..=4")]
    BadOrder(usize),
    #[error("test function is constant under the quadrature rule")]
    ZeroDenominator,
    #[error("mass matrix is numerically singular")]
    MassSingular,
    #[error("stiffness matrix asymmetry {0:e} exceeds tolerance")]
    QuadratureTooCoarse(f64),
    #[error("trial degree must be at least 1")]
    ZeroDegree,
    #[error("parameter list must be strictly {order} and inside {range}")]
    BadSweep { order: &'static str, range: &'static str },

    // projective
    #[error("balance iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("weights must be positive and indexed by the {expected} lattice points, got {got}")]
    BadWeights { expected: usize, got: usize },

    // input parsing
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_)
                | Error::MassSingular
                | Error::QuadratureTooCoarse(_)
                | Error::NotPositiveDefinite { .. }
                | Error::StepUnderflow { .. }
                | Error::K0NotFound { .. }
                | Error::ZeroDenominator
        )
    }
}
