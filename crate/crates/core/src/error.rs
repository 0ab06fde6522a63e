use thiserror::Error;

/// Errors raised across the spectral laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("rank mismatch: {0}")]
    RankMismatch(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("negative fractional power {sigma} requires zero-mode exclusion")]
    ZeroModeExclusion { sigma: f64 },

    #[error("velocity is not divergence-free: relative divergence {relative:.3e} exceeds {tolerance:.1e}")]
    NotDivergenceFree { relative: f64, tolerance: f64 },

    #[error("tensor is not symmetric: deviation {0:.3e}")]
    NotSymmetric(f64),

    #[error("frame change violates orthogonality: {0}")]
    InvalidFrame(String),

    #[error("dyadic index {j} outside resolvable range [{j_min}, {j_max}]")]
    DyadicRange { j: i32, j_min: i32, j_max: i32 },

    #[error("grid resolves only {found} dyadic annuli, at least {required} needed")]
    TooFewAnnuli { found: usize, required: usize },

    #[error("inadmissible model: {0}")]
    Inadmissible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unreachable target norm: {0}")]
    UnreachableTarget(String),

    #[error("CFL violation at t={t:.4}: dt={dt:.3e} exceeds limit {limit:.3e}")]
    Cfl { t: f64, dt: f64, limit: f64 },

    #[error("non-finite state detected at t={t:.4} in {field}")]
    NonFinite { t: f64, field: String },

    #[error("j0 too large for coercivity: quadratic form {value:.3e} < 0 at j={j}")]
    NotCoercive { j: i32, value: f64 },

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("lemma residual: {0}")]
    Lemma(String),

    #[error("config {path}: {msg}")]
    Config { path: String, msg: String },

    #[error("OVF1: bad magic {0:?}")]
    BadMagic([u8; 4]),

    #[error("OVF1: unsupported version {0}")]
    BadVersion(u32),

    #[error("OVF1: payload length mismatch, expected {expected} bytes, found {actual}")]
    PayloadLength { expected: usize, actual: usize },

    #[error("OVF1: header describes an oversized field ({0})")]
    DimensionOverflow(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
