use thiserror::Error;

/// Direction of a Jackson or series sum that failed to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Terms indexed n = 0, 1, 2, ...
    Forward,
    /// Terms indexed n = -1, -2, ...
    Backward,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Forward => f.write_str("n -> +inf"),
            Direction::Backward => f.write_str("n -> -inf"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("no convergence ({direction}) after {terms} terms: {context}")]
    Convergence {
        direction: Direction,
        terms: usize,
        context: String,
    },
    #[error("series window underflow: [{lo}, {hi}] is empty")]
    WindowUnderflow { lo: i64, hi: i64 },
    #[error("incomparable monomials: {0}")]
    Monomial(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
