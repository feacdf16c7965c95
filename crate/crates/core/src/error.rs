use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Variants that correspond to a violated hypothesis of an error estimate
/// carry a short machine-readable name (see [`Error::reason`]) so that
/// verification reports can record why a row was skipped.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: need finite a < b, got ({a}, {b})")]
    InvalidDomain { a: f64, b: f64 },

    #[error("breakpoints must be finite and strictly increasing")]
    InvalidBreakpoints,

    #[error("invalid smoothness k={k} for degree p={p}: need -1 <= k <= p-1")]
    InvalidSmoothness { p: usize, k: i32 },

    #[error("point {x} lies outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("derivative order {order} exceeds the maximum {max}")]
    DerivativeOrder { order: usize, max: usize },

    #[error("polynomial of degree {degree} does not fit in a degree-{p} space")]
    DegreeTooHigh { degree: usize, p: usize },

    #[error("quadrature point count {0} outside 1..=64")]
    QuadratureOrder(usize),

    #[error("derivative order {order} is not conforming for this space (max {max})")]
    NonconformingOrder { order: usize, max: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("test function provides derivatives up to order {available}, {requested} requested")]
    MissingDerivative { requested: usize, available: usize },

    #[error("reduced spline space is empty")]
    EmptySpace,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    #[error("grid resolution {found} too small (need at least {min})")]
    Resolution { found: usize, min: usize },

    #[error("degenerate geometry map: |det| = {det:e} at ({x}, {y})")]
    DegenerateMap { det: f64, x: f64, y: f64 },

    #[error("invalid multi-patch layout: {0}")]
    InvalidMultiPatch(String),

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Machine-readable reason used for skipped report rows.
    pub fn reason(&self) -> String {
        match self {
            Error::Precondition { name, .. } => (*name).to_string(),
            Error::InvalidData(_) => "invalid-data".into(),
            Error::InvalidSmoothness { .. } => "invalid-smoothness".into(),
            Error::NonconformingOrder { .. } => "nonconforming-order".into(),
            Error::MissingDerivative { .. } => "missing-derivative".into(),
            Error::EmptySpace => "empty-space".into(),
            Error::DegenerateMap { .. } => "degenerate-map".into(),
            Error::DerivativeOrder { .. } => "derivative-order".into(),
            Error::DegreeTooHigh { .. } => "degree".into(),
            other => format!("error: {other}"),
        }
    }

    /// Whether the error reports an unmet hypothesis rather than a failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition { .. }
                | Error::InvalidData(_)
                | Error::InvalidSmoothness { .. }
                | Error::NonconformingOrder { .. }
                | Error::MissingDerivative { .. }
                | Error::EmptySpace
                | Error::DerivativeOrder { .. }
                | Error::DegreeTooHigh { .. }
        )
    }

    pub(crate) fn precondition(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            name,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
