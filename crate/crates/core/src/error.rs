use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A distribution or model parameter lies outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An argument (probability, point, sample size) lies outside the domain
    /// of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested moment or functional does not exist for the parameters.
    #[error("moment does not exist: {0}")]
    MomentExistence(String),

    #[error("empty sample")]
    EmptySample,

    /// The sample does not carry enough information for the estimator,
    /// e.g. all observations equal.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("expected loss undefined: {0}")]
    UndefinedLoss(String),

    #[error("estimator undefined: {0}")]
    EstimatorUndefined(String),

    #[error("no observations beyond the threshold {0}")]
    EmptyTail(f64),

    /// The requested quantile falls below the modelled tail.
    #[error("quantile lies outside the modelled tail: 1 - epsilon = {survival} exceeds F_tilde = {f_tilde}")]
    OutOfTail { survival: f64, f_tilde: f64 },

    #[error("invalid chain configuration: {0}")]
    ChainConfig(String),

    #[error("chain diagnostics: {0}")]
    Diagnostics(String),

    #[error("too few draws: have {have}, need at least {need}")]
    TooFewDraws { have: usize, need: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
