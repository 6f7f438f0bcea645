use thiserror::Error;

/// Errors raised by the toolkit. Every variant maps onto a named failure of
/// one of the numerical operations; none of them are retried internally.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("non-finite entry in matrix input")]
    NonFinite,

    #[error("not a contraction: smallest eigenvalue of I - P*P is {min_eig:e}")]
    NotAContraction { min_eig: f64 },

    #[error("operators do not commute: commutator norm {residual:e} exceeds {bound:e}")]
    NotCommuting { residual: f64, bound: f64 },

    #[error("simultaneous triangularization failed: off-triangular mass {mass:e}")]
    TriangularizationFailed { mass: f64 },

    #[error("membership criteria disagree at clear margin: {0}")]
    InternalInconsistency(String),

    #[error("|z| = {modulus} is not unimodular")]
    NotUnimodular { modulus: f64 },

    #[error("residual {residual:e} exceeds {bound:e}: {context}")]
    ResidualTooLarge { context: String, residual: f64, bound: f64 },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("not an isometry: ||V3*V3 - I|| = {defect:e}")]
    NotIsometry { defect: f64 },

    #[error("depth must be at least 1")]
    BadDepth,

    #[error("model depth {depth} too shallow for total degree {degree}")]
    DepthTooShallow { depth: usize, degree: usize },

    #[error("dilation block structure mismatch: {0}")]
    BlockStructureMismatch(String),

    #[error("isometry model invariant violated: {0}")]
    SpecInvariantViolated(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
