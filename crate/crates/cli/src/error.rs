use std::fmt;

use serde_json::json;

/// Exit code for bad input: flags, config files, record streams, empty domains.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "config",
            message: message.into(),
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fractform_core::Error> for CliError {
    fn from(e: fractform_core::Error) -> Self {
        use fractform_core::Error::*;
        let (code, kind) = match e {
            InvalidArgument(_) | NoSolutionInRange { .. } | DepthOverflow { .. } | Parse { .. } | RecordMismatch(_) => {
                (EXIT_CONFIG, "config")
            }
            EmptyDomain | EmptyRegion => (EXIT_CONFIG, "empty_domain"),
            DegenerateFit(_) | InsufficientSamples | Disconnected(..) | SolverDiverged { .. } | MaximumPrinciple { .. } => {
                (EXIT_SOLVER, "solver")
            }
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::config(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::config(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
