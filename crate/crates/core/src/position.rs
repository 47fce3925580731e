//! Positions of the k-heap game, the P-position test and the P-classes.
//!
//! Every P-position has the form `(T_n, m_1, .., m_{k-1})` with
//! `T_n <= m_1 <= .. <= m_{k-1}` and `m_1 + .. + m_{k-1} = (k-1)T_n + n`.
//! The set of such positions for a fixed `n` is the class `P_n`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::triangular::{triangular, triangular_floor_index, triangular_wide};

/// Smallest heap count the game is defined for.
pub const MIN_HEAPS: usize = 3;

/// Default upper limit on the heap count.
pub const DEFAULT_MAX_HEAPS: usize = 64;

/// A game position in standard form: heap sizes sorted nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Position {
    heaps: Vec<u64>,
}

impl Position {
    /// Builds a canonical position from heap sizes in any order.
    pub fn new(heaps: impl Into<Vec<u64>>) -> Result<Self> {
        Self::with_max_heaps(heaps, DEFAULT_MAX_HEAPS)
    }

    pub fn with_max_heaps(heaps: impl Into<Vec<u64>>, max_heaps: usize) -> Result<Self> {
        let mut heaps = heaps.into();
        check_heaps(&heaps, max_heaps)?;
        heaps.sort_unstable();
        Ok(Self { heaps })
    }

    /// Wraps heaps already known to be sorted and within range.
    pub(crate) fn from_sorted_unchecked(heaps: Vec<u64>) -> Self {
        debug_assert!(heaps.windows(2).all(|w| w[0] <= w[1]));
        Self { heaps }
    }

    pub fn heaps(&self) -> &[u64] {
        &self.heaps
    }

    pub fn into_heaps(self) -> Vec<u64> {
        self.heaps
    }

    /// Number of heaps.
    pub fn k(&self) -> usize {
        self.heaps.len()
    }

    /// The smallest heap.
    pub fn smallest(&self) -> u64 {
        self.heaps[0]
    }

    pub fn total(&self) -> u64 {
        // Checked on construction.
        self.heaps.iter().sum()
    }

    /// Sum of every heap except the smallest.
    pub fn rest_sum(&self) -> u64 {
        self.heaps[1..].iter().sum()
    }

    pub fn is_terminal(&self) -> bool {
        self.heaps.iter().all(|&h| h == 0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.heaps)
    }
}

pub(crate) fn write_tuple(f: &mut impl fmt::Write, values: &[u64]) -> fmt::Result {
    f.write_char('(')?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{v}")?;
    }
    f.write_char(')')
}

/// Formats heap sizes as `(a,b,c)`.
pub fn format_tuple(values: &[u64]) -> String {
    let mut s = String::new();
    write_tuple(&mut s, values).expect("writing to a String");
    s
}

fn check_heaps(heaps: &[u64], max_heaps: usize) -> Result<()> {
    if heaps.len() < MIN_HEAPS {
        return Err(Error::domain(format!(
            "the game needs at least {MIN_HEAPS} heaps, got {}; use the two-heap Wythoff analysis instead",
            heaps.len()
        )));
    }
    if heaps.len() > max_heaps {
        return Err(Error::domain(format!(
            "{} heaps exceeds the configured limit of {max_heaps}",
            heaps.len()
        )));
    }
    heaps
        .iter()
        .try_fold(0u64, |acc, &h| acc.checked_add(h))
        .ok_or_else(|| Error::range("total token count does not fit in 64 bits"))?;
    Ok(())
}

/// Sorts raw heap sizes into standard form.
///
/// The returned permutation maps canonical indices to the caller's indices:
/// `canonical.heaps()[i] == raw[perm[i]]`. The sort is stable, so equal
/// heaps keep their original relative order.
pub fn normalize(raw: &[u64]) -> Result<(Position, Vec<usize>)> {
    check_heaps(raw, DEFAULT_MAX_HEAPS)?;
    let mut perm: Vec<usize> = (0..raw.len()).collect();
    perm.sort_by_key(|&i| raw[i]);
    let heaps = perm.iter().map(|&i| raw[i]).collect();
    Ok((Position::from_sorted_unchecked(heaps), perm))
}

/// `(k-1)·T_n + n`, the sum of the non-minimal parts of every member of `P_n`.
pub(crate) fn class_rest_sum(n: u64, k: usize) -> u128 {
    (k as u128 - 1) * triangular_wide(n) + n as u128
}

/// Whether `p` is a P-position: the smallest heap is some `T_n` and the
/// remaining heaps sum to `(k-1)T_n + n`.
pub fn is_p_position(p: &Position) -> bool {
    p_class_index(p).is_some()
}

/// The `n` with `p` in `P_n`, if any.
pub fn p_class_index(p: &Position) -> Option<u64> {
    let n = triangular_floor_index(p.smallest());
    (triangular_wide(n) == p.smallest() as u128 && p.rest_sum() as u128 == class_rest_sum(n, p.k()))
        .then_some(n)
}

/// The positions of one class `P_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PClass {
    pub n: u64,
    pub k: usize,
    /// Members in lexicographic order.
    pub members: Vec<Position>,
}

impl PClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Lists `P_n` for `k` heaps in lexicographic order.
///
/// Writing each part as `T_n + x`, the offsets `x` are nondecreasing, lie in
/// `[0, n]`, and sum to `n`; the enumeration walks those offset vectors.
pub fn enumerate_p_class(n: u64, k: usize) -> Result<PClass> {
    if !(MIN_HEAPS..=DEFAULT_MAX_HEAPS).contains(&k) {
        return Err(Error::domain(format!(
            "k must be in {MIN_HEAPS}..={DEFAULT_MAX_HEAPS}, got {k}"
        )));
    }
    let base = triangular(n)?;
    let total = u64::try_from(class_rest_sum(n, k) + base as u128)
        .map_err(|_| Error::range(format!("members of P_{n} overflow 64 bits")))?;
    debug_assert!(total >= base);

    let mut members = Vec::new();
    let mut offsets = Vec::with_capacity(k - 1);
    fill_offsets(n, k - 1, 0, &mut offsets, &mut |offs| {
        let mut heaps = Vec::with_capacity(k);
        heaps.push(base);
        heaps.extend(offs.iter().map(|&x| base + x));
        members.push(Position::from_sorted_unchecked(heaps));
    });
    Ok(PClass { n, k, members })
}

/// Emits nondecreasing vectors of length `slots` with entries `>= floor`
/// summing to `remaining`, in lexicographic order.
fn fill_offsets(
    remaining: u64,
    slots: usize,
    floor: u64,
    acc: &mut Vec<u64>,
    emit: &mut impl FnMut(&[u64]),
) {
    if slots == 1 {
        acc.push(remaining);
        emit(acc);
        acc.pop();
        return;
    }
    // The current entry x needs x * slots <= remaining so later entries can be >= x.
    let mut x = floor;
    while x.saturating_mul(slots as u64) <= remaining {
        acc.push(x);
        fill_offsets(remaining - x, slots - 1, x, acc, emit);
        acc.pop();
        x += 1;
    }
}

/// A member of `P_n` containing `t` as a component, where `n` is the class
/// whose interval `[T_n, T_{n+1})` contains `t`.
///
/// Its parts are `T_n` repeated `k-3` times, `T_n + n - j` and `T_n + j`,
/// where `j = t - T_n`.
pub fn class_member_containing(t: u64, k: usize) -> Result<Position> {
    if !(MIN_HEAPS..=DEFAULT_MAX_HEAPS).contains(&k) {
        return Err(Error::domain(format!(
            "k must be in {MIN_HEAPS}..={DEFAULT_MAX_HEAPS}, got {k}"
        )));
    }
    let n = triangular_floor_index(t);
    let base = triangular(n)?;
    let j = t - base;
    let mut heaps = vec![base; k - 2];
    heaps.push(base + n - j);
    heaps.push(t);
    Position::new(heaps)
}
