use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which recurrence route a factor table follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Minus,
    Plus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("division error: {0}")]
    Division(String),
    #[error("{branch} branch breaks down at level {level}")]
    Breakdown { branch: Branch, level: i64 },
    #[error("eigenfunction at level {level} has degree {found}, expected {level}")]
    Degree { level: i64, found: i64 },
    #[error("diagonal eigenvalues coincide at degrees {i} and {j}")]
    OracleDegenerate { i: i64, j: i64 },
    #[error("association level {m} out of range for principal level {l}")]
    Range { l: i64, m: i64 },
    #[error("cannot classify operator: {0}")]
    Classify(String),
    #[error("p vanishes or changes sign near x = {x}")]
    SingularGrid { x: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
