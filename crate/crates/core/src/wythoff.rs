//! Classical two-heap Wythoff game.
//!
//! Its P-positions are the pairs `(A_n, B_n)` with `A_n` the least value not
//! yet used by an earlier pair and `B_n = A_n + n`; equivalently
//! `A_n = floor(n·φ)` and `B_n = floor(n·φ²)` with `φ` the golden ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WythoffPair {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

/// The first `count` pairs from the mex recurrence.
pub fn wythoff_pairs_mex(count: usize) -> Vec<WythoffPair> {
    let mut pairs = Vec::with_capacity(count);
    // used[v]: v already appears as some A_i or B_i.
    let mut used: Vec<bool> = Vec::new();
    let mut next_free = 0usize;
    for n in 0..count {
        while used.get(next_free).copied().unwrap_or(false) {
            next_free += 1;
        }
        let a = next_free;
        let b = a + n;
        if used.len() <= b {
            used.resize(b + 1, false);
        }
        used[a] = true;
        used[b] = true;
        pairs.push(WythoffPair {
            n: n as u64,
            a: a as u64,
            b: b as u64,
        });
    }
    pairs
}

/// `(floor(n·φ), floor(n·φ²))` in exact integer arithmetic.
///
/// `n·φ = (n + sqrt(5n²))/2`. For `n >= 1`, `sqrt(5n²)` is irrational and lies
/// strictly between `s = isqrt(5n²)` and `s + 1`, so the floor is
/// `floor((n + s)/2)`.
pub fn beatty_pair(n: u64) -> Result<WythoffPair> {
    let wide = n as u128;
    let range = || Error::ArithmeticRange(format!("B_{n} does not fit in 64 bits"));
    let s = wide
        .checked_mul(wide)
        .and_then(|sq| sq.checked_mul(5))
        .ok_or_else(range)?
        .isqrt();
    let a = (wide + s) / 2;
    let b = a + wide;
    let b = u64::try_from(b).map_err(|_| range())?;
    Ok(WythoffPair { n, a: a as u64, b })
}

/// Two-heap verdict. Heaps may be given in either order.
pub fn wythoff_classify(x: u64, y: u64) -> Verdict {
    if wythoff_pair_index(x, y).is_some() {
        Verdict::P
    } else {
        Verdict::N
    }
}

/// The `n` with `{x, y} = {A_n, B_n}`, if any.
pub fn wythoff_pair_index(x: u64, y: u64) -> Option<u64> {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let n = y - x;
    // B_n < 2^64 whenever y does, so this cannot fail for a valid pair.
    let pair = beatty_pair(n).ok()?;
    (pair.a == x && pair.b == y).then_some(n)
}
