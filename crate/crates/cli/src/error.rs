use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] susyfactor::Error),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// One or more identities did not hold; the payload lists them.
    #[error("{count} identity check(s) failed")]
    Identity { count: usize, failures: Value },
    #[error("{source}")]
    Breakdown {
        source: susyfactor::Error,
        /// levels computed before the breakdown
        partial: Value,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Identity { .. } => 1,
            _ => 2,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Identity { failures, .. } => json!({
                "error": "identity",
                "message": self.to_string(),
                "failures": failures,
            }),
            CliError::Breakdown { source, partial } => {
                let mut v = json!({
                    "error": "breakdown",
                    "message": source.to_string(),
                    "partial": partial,
                });
                if let susyfactor::Error::Breakdown { branch, level } = source {
                    v["branch"] = json!(branch);
                    v["level"] = json!(level);
                }
                v
            }
            CliError::Core(e) => {
                let kind = match e {
                    susyfactor::Error::Breakdown { .. } => "breakdown",
                    susyfactor::Error::Range { .. } => "range",
                    susyfactor::Error::SingularGrid { .. } => "singular_grid",
                    susyfactor::Error::Parse(_) => "parse",
                    _ => "domain",
                };
                let mut v = json!({ "error": kind, "message": e.to_string() });
                if let susyfactor::Error::Breakdown { branch, level } = e {
                    v["branch"] = json!(branch);
                    v["level"] = json!(level);
                }
                v
            }
            _ => json!({ "error": "input", "message": self.to_string() }),
        }
    }
}
