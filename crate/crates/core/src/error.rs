use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors span rank {rank}, need {needed}")]
    Underdetermined { rank: usize, needed: usize },

    #[error("inconsistent constraints, residual {residual:e}")]
    Inconsistent { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate curve: osculating minors vanish identically at level {level}")]
    DegenerateCurve { level: usize },

    #[error("twistor hypothesis fails: osculating space is quaternionic at {count} point(s)")]
    QuaternionicLocus { count: usize },

    #[error("no admissible hyperplane: best margin {margin:e} after {trials} trial(s)")]
    NoAdmissibleHyperplane { margin: f64, trials: usize },

    #[error("hyperplane meets the curve (margin {margin:e})")]
    HyperplaneMeetsCurve { margin: f64 },

    #[error("tangent construction needs dimension n >= 1")]
    PointCurve,

    #[error("Hopf field vanishes identically (twistor projection), max |A| = {max_norm:e}")]
    TwistorDegenerate { max_norm: f64 },

    #[error("holomorphic form vanishes identically")]
    ZeroForm,

    #[error("holomorphic form has zeros and no continuation data was supplied (min |ω| = {min_norm:e})")]
    FormHasZeros { min_norm: f64 },

    #[error("form is not closed enough to integrate: residual {residual:e} > {tol:e}")]
    NotClosed { residual: f64, tol: f64 },

    #[error("operation needs polynomial (twistor) provenance")]
    NotPolynomial,

    #[error("field has no entry point for this operation: {0}")]
    Unsupported(String),

    #[error("projection pole lies on every sample")]
    PoleEverywhere,

    #[error("splitting certificate {certificate:e} below threshold")]
    SplittingFailed { certificate: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code: 2 for tolerance failures, 3 for violated
    /// preconditions, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 4,
            Error::NotClosed { .. } | Error::SplittingFailed { .. } | Error::Numerical(_) => 2,
            _ => 3,
        }
    }
}
