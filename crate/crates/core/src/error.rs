use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("center dimension r must be at least 1, got {0}")]
    InvalidRank(usize),

    #[error("no Clifford module of dimension {m} for r = {r}: m must be a positive multiple of d({r})={d}")]
    NoCliffordModule { r: usize, m: usize, d: usize },

    #[error("module dimension overflows for r = {0}")]
    DimensionOverflow(usize),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("structure matrices violate the H-type relations (max residual {0:e})")]
    RelationsViolated(f64),

    #[error("mu has a pole at alpha = {0}")]
    Pole(f64),

    #[error("invalid bracket [{lo}, {hi}] with f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{0} must be non-negative")]
    Negative(&'static str),

    #[error("the full vertical derivative formula requires theta != 0")]
    ZeroTheta,

    #[error("degenerate target: {0}")]
    DegenerateTarget(&'static str),

    #[error("target ratio must be positive, got {0}")]
    NonPositiveRatio(f64),

    #[error("root search cap {0} is too small")]
    CapTooSmall(f64),

    #[error("direction must be a unit vector (|d| = {0})")]
    NotUnit(f64),

    #[error("reconstructed geodesic misses the target endpoint by {0:e}")]
    EndpointMismatch(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line tool: 3 for numerical
    /// failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EndpointMismatch(_) | Error::CapTooSmall(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
