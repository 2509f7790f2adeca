use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be positive (and at most {max}), got {got}")]
    BadDimension { got: usize, max: usize },

    #[error("metric is not symmetric (max asymmetry {0:e})")]
    AsymmetricMetric(f64),

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("cubic index {0:?} is not canonical (need i <= j <= k)")]
    NonCanonicalIndex([usize; 3]),

    #[error("cubic index {idx:?} out of range for dimension {dim}")]
    IndexOutOfRange { idx: [usize; 3], dim: usize },

    #[error("duplicate cubic index {0:?}")]
    DuplicateIndex([usize; 3]),

    #[error("degenerate plane: Gram determinant {gram_det:e} below threshold {threshold:e}")]
    DegeneratePlane { gram_det: f64, threshold: f64 },

    #[error("vector is not g-unit (norm {0})")]
    NotUnit(f64),

    #[error("vectors are not g-orthonormal (residual {0:e})")]
    NotOrthonormal(f64),

    #[error("no orthogonal complement in dimension 1")]
    NoComplement,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no start converged within {iterations} iterations (best step {best_step:e})")]
    NoConvergence { iterations: usize, best_step: f64 },

    #[error("{what}: residual {residual:e} exceeds limit {limit:e}")]
    ResidualTooLarge {
        what: &'static str,
        residual: f64,
        limit: f64,
    },

    #[error("point is not a strict local maximum (kind {0})")]
    NotStrictMax(String),

    #[error("Lagrange Jacobian is singular at the start (smallest singular value {0:e})")]
    SingularJacobian(f64),

    #[error("continuation step underflow; last accepted t = {last_t}")]
    StepUnderflow { last_t: f64 },

    #[error("sectional K-curvature is not constant (residual {0:e})")]
    NotConstantCurvature(f64),

    #[error("negative discriminant {0:e} in mu recursion")]
    NegativeDiscriminant(f64),

    #[error("[K,K] does not vanish (max entry {0:e})")]
    NonCommuting(f64),

    #[error("structure is not trace-free (|E| = {0:e})")]
    NotTraceFree(f64),

    #[error("endomorphism is not g-skew (residual {0:e})")]
    NotSkew(f64),

    #[error("cubic form vanishes")]
    ZeroCubic,

    #[error("grid oracle supports dim <= 3, got {0}")]
    OracleDimension(usize),

    #[error("point {point:?} is closer than {margin} to the domain boundary")]
    OutsideDomain { point: Vec<f64>, margin: f64 },

    #[error("quarter bound violated: k = {k}, bound = {bound}")]
    QuarterBoundViolated { k: f64, bound: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input); the CLI maps these to exit code 3.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::ResidualTooLarge { .. }
                | Error::SingularJacobian(_)
                | Error::StepUnderflow { .. }
                | Error::NotConstantCurvature(_)
                | Error::NegativeDiscriminant(_)
                | Error::NonCommuting(_)
                | Error::QuarterBoundViolated { .. }
        )
    }

    /// Stable snake_case name used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::BadDimension { .. } => "bad_dimension",
            Error::AsymmetricMetric(_) => "asymmetric_metric",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::NonCanonicalIndex(_) => "non_canonical_index",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::DuplicateIndex(_) => "duplicate_index",
            Error::DegeneratePlane { .. } => "degenerate_plane",
            Error::NotUnit(_) => "not_unit",
            Error::NotOrthonormal(_) => "not_orthonormal",
            Error::NoComplement => "no_complement",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ResidualTooLarge { .. } => "residual_too_large",
            Error::NotStrictMax(_) => "not_strict_max",
            Error::SingularJacobian(_) => "singular_jacobian",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::NotConstantCurvature(_) => "not_constant_curvature",
            Error::NegativeDiscriminant(_) => "negative_discriminant",
            Error::NonCommuting(_) => "non_commuting",
            Error::NotTraceFree(_) => "not_trace_free",
            Error::NotSkew(_) => "not_skew",
            Error::ZeroCubic => "zero_cubic",
            Error::OracleDimension(_) => "oracle_dimension",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::QuarterBoundViolated { .. } => "quarter_bound_violated",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
