use thiserror::Error;

/// Errors raised by samplers, estimators and the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("row {0} is constant; row standardization is undefined")]
    ConstantRow(usize),

    #[error("degenerate hypothesis: equal total variances, the posterior is flat")]
    DegenerateHypothesis,

    #[error("hypothesis ordering violated: sigma1_2 must exceed sigma0_2")]
    OrderingViolation,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
