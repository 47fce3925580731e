//! Exact triangular-number arithmetic.
//!
//! `T_n = n(n+1)/2`. The inverse is computed with an integer square root over
//! `u128`, so it stays exact for every `u64` input (the floating-point form of
//! the inverse misclassifies values once `8m+1` exceeds 2^53).

use crate::error::{Error, Result};

/// A triangular number together with its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangularIndex {
    pub n: u64,
    pub value: u64,
}

impl TriangularIndex {
    pub fn new(n: u64) -> Result<Self> {
        Ok(Self {
            n,
            value: triangular(n)?,
        })
    }
}

/// `n(n+1)/2` without intermediate overflow. Always fits in `u128`.
#[inline]
pub(crate) fn triangular_wide(n: u64) -> u128 {
    let n = n as u128;
    n * (n + 1) / 2
}

/// The `n`-th triangular number, or a range error if it does not fit in `u64`.
pub fn triangular(n: u64) -> Result<u64> {
    u64::try_from(triangular_wide(n))
        .map_err(|_| Error::range(format!("T_{n} does not fit in 64 bits")))
}

/// The unique `n` with `T_n <= m < T_{n+1}`.
pub fn triangular_floor_index(m: u64) -> u64 {
    let disc = 8 * (m as u128) + 1;
    let root = disc.isqrt();
    let mut n = ((root - 1) / 2) as u64;
    // isqrt is exact, so these only guard the invariant.
    if triangular_wide(n) > m as u128 {
        n -= 1;
    } else if triangular_wide(n + 1) <= m as u128 {
        n += 1;
    }
    debug_assert!(triangular_wide(n) <= m as u128 && (m as u128) < triangular_wide(n + 1));
    n
}

/// `Some(n)` when `m = T_n`.
pub fn exact_triangular_index(m: u64) -> Option<u64> {
    let n = triangular_floor_index(m);
    (triangular_wide(n) == m as u128).then_some(n)
}
