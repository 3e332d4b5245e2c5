use thiserror::Error;

use crate::spectral::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("unresolved field: {what} (spectral tail {tail:.3e} > threshold {threshold:.3e})")]
    Unresolved { what: String, tail: f64, threshold: f64 },

    #[error("boundary contamination at t = {t}: buffer holds {fraction:.3e} of the L2 mass (limit {limit:.3e})")]
    BoundaryContamination { t: f64, fraction: f64, limit: f64 },

    #[error("instability at step {step} (t = {t}): non-finite field")]
    Instability { step: usize, t: f64 },

    #[error("tabulated background queried at x = {x} outside [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("no admissible traveling-wave parameters: {reason} (best residual {residual:.3e})")]
    NoAdmissibleParameters { reason: String, residual: f64 },

    #[error("trajectory does not decay at its temporal ends (end/peak ratio {ratio:.3e})")]
    NonDecayingEnds { ratio: f64 },

    #[error("Picard iteration did not contract within {iterations} iterations (last difference {last:.3e})")]
    NoContraction { iterations: usize, last: f64 },

    #[error("residual tolerance violated: {residual:.3e} > {tolerance:.3e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("run aborted: {cause}")]
    Aborted {
        cause: Box<Error>,
        partial: Box<Trajectory>,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// The innermost cause, looking through [`Error::Aborted`].
    pub fn root(&self) -> &Error {
        match self {
            Error::Aborted { cause, .. } => cause.root(),
            other => other,
        }
    }
}
