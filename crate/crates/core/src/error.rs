use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the game's domain (too few heaps, k above the limit,
    /// mismatched heap count).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value or intermediate total does not fit the exact arithmetic used.
    #[error("arithmetic range error: {0}")]
    ArithmeticRange(String),

    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    /// Malformed persisted table or other textual input.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("illegal move: {0}")]
    IllegalMove(IllegalMove),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::ArithmeticRange(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<IllegalMove> for Error {
    fn from(value: IllegalMove) -> Self {
        Error::IllegalMove(value)
    }
}

/// The move rule a rejected move violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IllegalMove {
    /// Subset reduction whose amount vector does not have one entry per heap.
    Arity { expected: usize, got: usize },
    /// Subset reduction that removes nothing.
    Empty,
    /// Subset reduction touching every heap.
    TooManyHeaps { touched: usize, k: usize },
    /// Removing more tokens than a heap holds.
    Exceeds {
        heap: usize,
        amount: u64,
        available: u64,
    },
    /// Diagonal reduction of zero tokens.
    ZeroDiagonal,
    /// Diagonal reduction larger than the smallest heap.
    DiagonalTooLarge { t: u64, smallest: u64 },
}

impl fmt::Display for IllegalMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IllegalMove::Arity { expected, got } => {
                write!(f, "move lists {got} heap amounts but the position has {expected} heaps")
            }
            IllegalMove::Empty => write!(f, "a move must remove a positive number of tokens"),
            IllegalMove::TooManyHeaps { touched, k } => write!(
                f,
                "a subset reduction may touch at most k-1 heaps ({} for k={k}), this one touches {touched}",
                k - 1
            ),
            IllegalMove::Exceeds {
                heap,
                amount,
                available,
            } => write!(
                f,
                "cannot take {amount} from heap {heap}, it only holds {available}"
            ),
            IllegalMove::ZeroDiagonal => {
                write!(f, "a diagonal reduction must remove a positive number of tokens")
            }
            IllegalMove::DiagonalTooLarge { t, smallest } => write!(
                f,
                "a diagonal reduction of {t} exceeds the smallest heap ({smallest})"
            ),
        }
    }
}

impl IllegalMove {
    /// Short stable identifier of the violated rule, used on the wire.
    pub fn rule(&self) -> &'static str {
        match self {
            IllegalMove::Arity { .. } => "arity",
            IllegalMove::Empty => "empty_move",
            IllegalMove::TooManyHeaps { .. } => "at_most_k_minus_1_heaps",
            IllegalMove::Exceeds { .. } => "exceeds_heap",
            IllegalMove::ZeroDiagonal => "empty_move",
            IllegalMove::DiagonalTooLarge { .. } => "diagonal_exceeds_min_heap",
        }
    }
}
