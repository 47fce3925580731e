//! Perfect play for the k-heap game where a move either takes tokens from at
//! most `k-1` heaps or the same number of tokens from every heap.
//!
//! The P-positions have a closed form (see [`position`]); [`strategy`]
//! builds a winning move from any other position, and [`oracle`] recomputes
//! everything by brute force for cross-checking.

pub mod density;
pub mod error;
pub mod oracle;
pub mod position;
pub mod strategy;
pub mod triangular;
pub mod wire;
pub mod wythoff;

pub use error::{Error, IllegalMove, Result};
pub use position::{
    class_member_containing, enumerate_p_class, is_p_position, normalize, p_class_index, PClass,
    Position,
};
pub use strategy::{analyze, apply, engine_move, followers, is_legal, Analysis, Move, Verdict};
pub use triangular::{exact_triangular_index, triangular, triangular_floor_index, TriangularIndex};
