use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse rational from {0:?} (expected p/q)")]
    Parse(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("variances must be positive")]
    NonPositiveSigma,
    #[error("hypotheses violated: {0}")]
    Hypothesis(ValidationReport),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("pole of the Gamma function at {0}")]
    PoleOfGamma(String),
    #[error("pole of the decoupling function at {0}")]
    PoleOfD(String),
    #[error("pole of the step coefficient at {0}")]
    PoleOfG(String),
    #[error("pole of the gluing function at {0}")]
    PoleOfW1(String),
    #[error("pole of the transform at {0}")]
    PoleOfPhi1(String),
    #[error("point lies on the kernel zero set")]
    OnKernelZeroSet,
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("series or quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("operation requires {0}")]
    Precondition(String),
    #[error("no solution of the reflection problem for {0:?}")]
    NoSolution((f64, f64)),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
