use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no similarity dimension in [0, {dim}]: sum of ratios^{dim} = {sum} exceeds 1")]
    NoSolutionInRange { dim: usize, sum: f64 },

    #[error("depth {depth} would produce {count} primitives (cap {cap})")]
    DepthOverflow { depth: usize, count: u128, cap: usize },

    #[error("domain has no grid cells")]
    EmptyDomain,

    #[error("region contains no grid cells of the domain")]
    EmptyRegion,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("ball around a sample point contains no boundary mass")]
    InsufficientSamples,

    #[error("no path between sampled cells {0} and {1}")]
    Disconnected(usize, usize),

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations (target {target:e})")]
    SolverDiverged {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("minimizer left [0, 1]: range [{min}, {max}]")]
    MaximumPrinciple { min: f64, max: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("record check failed: {0}")]
    RecordMismatch(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
