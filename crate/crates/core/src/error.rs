use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid Kraus family: {0}")]
    InvalidKraus(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("transition map is not primitive: {0}")]
    NotPrimitive(String),

    #[error("input is not centered: Tr(rho X) = {0:e}")]
    InputNotCentered(f64),

    #[error("finite-difference step too large: completeness residual {0:e}")]
    StepTooLarge(f64),

    #[error("parameter {theta} outside domain ({lo}, {hi}) with margin {margin}")]
    OutOfDomain { theta: f64, lo: f64, hi: f64, margin: f64 },

    #[error("stationary state is rank deficient: smallest eigenvalue {0:e}")]
    RankDeficient(f64),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("absorber does not match the Kraus family: |K1 chi| = {0:e}")]
    AbsorberMismatch(f64),

    #[error("gauge condition violated: |<chi|dK0 chi>| = {0:e}")]
    GaugeViolation(f64),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("bad truncation length {0}")]
    BadTruncation(usize),

    #[error("conditional state collapsed (norm {0:e})")]
    NormCollapse(f64),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("too many pattern orderings: {0}")]
    TooManyPatterns(u64),

    #[error("separation exponent must lie in (0, 1), got {0}")]
    BadGamma(f64),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("counting rate is not identifiable on the parameter domain")]
    NonIdentifiable,

    #[error("displaced absorber parameter {0} leaves the domain")]
    DomainExit(f64),

    #[error("Fisher information must be positive, got {0}")]
    BadFisher(f64),

    #[error("not enough estimates")]
    Empty,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by bad user input or unusable files rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::BadGamma(_)
                | Error::BadTruncation(_)
                | Error::InvalidPattern(_)
                | Error::OutOfDomain { .. }
                | Error::DomainExit(_)
                | Error::TooLarge(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}
