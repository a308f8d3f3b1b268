use thiserror::Error;

/// Errors raised by construction, assembly and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field profile: {0}")]
    InvalidProfile(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at node {node} (r = {r:.6e}, theta = {theta:.6e}): {what}")]
    NonFinite {
        node: usize,
        r: f64,
        theta: f64,
        what: String,
    },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("factorization breakdown at row {row} (pivot {pivot:.3e}); shifts tried: {shifts:?}")]
    Factorization {
        row: usize,
        pivot: f64,
        shifts: Vec<f64>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("rejected: {0}")]
    Rejected(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
