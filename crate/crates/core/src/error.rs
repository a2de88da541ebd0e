use crate::series::Rational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("series has a non-invertible constant term")]
    NonInvertibleSeries,

    #[error("composition argument has a nonzero constant term")]
    CompositionDomain,

    #[error("un-shift requires constant term 1, found {0}")]
    ShiftDomain(Rational),

    #[error("{0}")]
    Usage(String),

    #[error("invalid run sequence: {0}")]
    Validation(String),

    /// The dual run sequence left [0, 1], so the input cannot come from a
    /// stationary 1-dependent process.
    #[error("dual run coefficient {index} = {value} lies outside [0, 1]; input is not realizable by a stationary 1-dependent process")]
    NotOneDependent { index: usize, value: Rational },

    #[error("requested depth {requested} exceeds the exact-enumeration limit {limit}")]
    DepthExceeded { requested: usize, limit: usize },

    #[error("no path sampler exists for model {0}")]
    SamplerUnavailable(String),

    #[error("Monte Carlo estimate needs at least one trial")]
    EmptyTrials,

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
