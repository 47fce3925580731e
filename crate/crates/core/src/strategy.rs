//! Move rules, follower generation and the winning-move construction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, IllegalMove, Result};
use crate::position::{class_rest_sum, p_class_index, Position};
use crate::triangular::{triangular_floor_index, triangular_wide};

/// Default cap on generated follower states.
pub const DEFAULT_FOLLOWER_CAP: u128 = 2_000_000;

/// A move. Subset amounts are indexed like the heaps they apply to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    /// Remove `amounts[i]` from heap `i`; at most `k-1` amounts are nonzero.
    Subset { amounts: Vec<u64> },
    /// Remove `t` tokens from every heap.
    Diagonal { t: u64 },
}

impl Move {
    /// Subset reduction taking `amount` from a single heap.
    pub fn take(k: usize, heap: usize, amount: u64) -> Self {
        let mut amounts = vec![0; k];
        amounts[heap] = amount;
        Move::Subset { amounts }
    }

    /// Re-indexes a move expressed against canonical heaps into the caller's
    /// labeling, where `perm[i]` is the caller index of canonical heap `i`.
    pub fn to_labeled(&self, perm: &[usize]) -> Move {
        match self {
            Move::Subset { amounts } => {
                let mut out = vec![0; amounts.len()];
                for (i, &a) in amounts.iter().enumerate() {
                    out[perm[i]] = a;
                }
                Move::Subset { amounts: out }
            }
            Move::Diagonal { t } => Move::Diagonal { t: *t },
        }
    }

    /// Inverse of [`Move::to_labeled`].
    pub fn to_canonical(&self, perm: &[usize]) -> Move {
        match self {
            Move::Subset { amounts } => Move::Subset {
                amounts: perm.iter().map(|&src| amounts[src]).collect(),
            },
            Move::Diagonal { t } => Move::Diagonal { t: *t },
        }
    }
}

/// Checks a move against heap sizes in any order.
pub fn check_move(heaps: &[u64], mv: &Move) -> Result<(), IllegalMove> {
    match mv {
        Move::Subset { amounts } => {
            if amounts.len() != heaps.len() {
                return Err(IllegalMove::Arity {
                    expected: heaps.len(),
                    got: amounts.len(),
                });
            }
            let touched = amounts.iter().filter(|&&a| a > 0).count();
            if touched == 0 {
                return Err(IllegalMove::Empty);
            }
            if touched >= heaps.len() {
                return Err(IllegalMove::TooManyHeaps {
                    touched,
                    k: heaps.len(),
                });
            }
            for (heap, (&amount, &available)) in amounts.iter().zip(heaps).enumerate() {
                if amount > available {
                    return Err(IllegalMove::Exceeds {
                        heap,
                        amount,
                        available,
                    });
                }
            }
            Ok(())
        }
        Move::Diagonal { t } => {
            let smallest = heaps.iter().copied().min().unwrap_or(0);
            if *t == 0 {
                Err(IllegalMove::ZeroDiagonal)
            } else if *t > smallest {
                Err(IllegalMove::DiagonalTooLarge { t: *t, smallest })
            } else {
                Ok(())
            }
        }
    }
}

pub fn is_legal(p: &Position, mv: &Move) -> bool {
    check_move(p.heaps(), mv).is_ok()
}

/// Applies a move to heap sizes in the caller's order, without re-sorting.
pub fn apply_labeled(heaps: &[u64], mv: &Move) -> Result<Vec<u64>> {
    check_move(heaps, mv)?;
    Ok(match mv {
        Move::Subset { amounts } => heaps.iter().zip(amounts).map(|(h, a)| h - a).collect(),
        Move::Diagonal { t } => heaps.iter().map(|h| h - t).collect(),
    })
}

/// Applies a canonically indexed move and returns the re-normalized position.
pub fn apply(p: &Position, mv: &Move) -> Result<Position> {
    let mut heaps = apply_labeled(p.heaps(), mv)?;
    heaps.sort_unstable();
    Ok(Position::from_sorted_unchecked(heaps))
}

/// Number of raw states follower generation visits for these heaps.
pub(crate) fn follower_work(heaps: &[u64]) -> u128 {
    heaps
        .iter()
        .fold(1u128, |acc, &h| acc.saturating_mul(h as u128 + 1))
        .saturating_add(heaps.iter().copied().min().unwrap_or(0) as u128)
}

fn check_cap(heaps: &[u64], cap: u128) -> Result<()> {
    let needed = follower_work(heaps);
    if needed > cap {
        return Err(Error::ResourceLimit {
            what: "follower generation",
            needed,
            limit: cap,
        });
    }
    Ok(())
}

/// Calls `f` with every heap vector reachable in one move, unsorted and with
/// repetitions. `buf` is scratch space.
pub(crate) fn for_each_follower_raw(heaps: &[u64], buf: &mut Vec<u64>, mut f: impl FnMut(&[u64])) {
    let k = heaps.len();
    buf.clear();
    buf.extend_from_slice(heaps);
    // Odometer over all vectors `buf <= heaps`, counting down from `heaps`.
    loop {
        let mut i = 0;
        while i < k && buf[i] == 0 {
            buf[i] = heaps[i];
            i += 1;
        }
        if i == k {
            break;
        }
        buf[i] -= 1;
        let changed = buf.iter().zip(heaps).filter(|(b, h)| b != h).count();
        if changed < k {
            f(buf);
        }
    }
    let smallest = heaps.iter().copied().min().unwrap_or(0);
    for t in 1..=smallest {
        buf.clear();
        buf.extend(heaps.iter().map(|h| h - t));
        f(buf);
    }
}

/// The distinct positions reachable from `p` in one move.
pub fn followers(p: &Position, cap: u128) -> Result<BTreeSet<Position>> {
    check_cap(p.heaps(), cap)?;
    let mut out = BTreeSet::new();
    let mut buf = Vec::with_capacity(p.k());
    for_each_follower_raw(p.heaps(), &mut buf, |q| {
        let mut q = q.to_vec();
        q.sort_unstable();
        out.insert(Position::from_sorted_unchecked(q));
    });
    Ok(out)
}

/// Every legal move from `p` that lands on a P-position, canonically indexed.
/// Moves are listed subset reductions first, then diagonals by increasing `t`.
pub fn all_winning_moves(p: &Position, cap: u128) -> Result<Vec<Move>> {
    check_cap(p.heaps(), cap)?;
    let heaps = p.heaps();
    let mut moves = Vec::new();
    let mut buf = Vec::with_capacity(p.k());
    let mut sorted = Vec::with_capacity(p.k());
    for_each_follower_raw(heaps, &mut buf, |q| {
        sorted.clear();
        sorted.extend_from_slice(q);
        sorted.sort_unstable();
        let target = Position::from_sorted_unchecked(sorted.clone());
        if p_class_index(&target).is_none() {
            return;
        }
        let diff: Vec<u64> = heaps.iter().zip(q).map(|(h, r)| h - r).collect();
        let diagonal = diff.iter().all(|&d| d == diff[0] && d > 0);
        moves.push(if diagonal {
            Move::Diagonal { t: diff[0] }
        } else {
            Move::Subset { amounts: diff }
        });
    });
    // Variant order puts subset reductions before diagonals.
    moves.sort();
    Ok(moves)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    P,
    N,
}

/// Which branch of the winning-move construction produced the move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// Smallest heap is `T_n`, the rest is too large: trim the rest.
    TriangularTrimRest,
    /// Smallest heap is `T_n`, the rest is too small: diagonal down to `P_m`.
    TriangularDiagonal,
    /// Smallest heap above `T_n`, second heap below `T_{n+1}`: cut the smallest
    /// heap to `T_n` and trim the heaps above the second.
    CutSmallest,
    /// Smallest heap above `T_n`, second heap at least `T_{n+1}`: cut the
    /// second heap to `T_n` and trim the heaps above it.
    CutSecond,
    /// Smallest heap above `T_n`, rest small enough: diagonal down to `P_m`.
    Diagonal,
}

/// Intermediate values of the winning-move construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    /// Class index with `T_n <= smallest heap < T_{n+1}`.
    pub n: u64,
    /// Smallest heap minus `T_n`.
    pub j: u64,
    /// Sum of all heaps but the smallest.
    #[serde(rename = "L")]
    pub rest_sum: u64,
    pub case: CaseTag,
    /// Target class of a diagonal move.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Tokens removed from every heap by a diagonal move.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winning_move: Option<Move>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
}

impl Analysis {
    /// Same analysis with the move re-indexed into the caller's labeling.
    pub fn to_labeled(&self, perm: &[usize]) -> Analysis {
        Analysis {
            winning_move: self.winning_move.as_ref().map(|m| m.to_labeled(perm)),
            ..self.clone()
        }
    }
}

/// Removes `excess` tokens from `heaps[lo..]`, largest heap first, never
/// taking a heap below `floor`. Records removals in `amounts`.
fn trim_largest_first(heaps: &[u64], lo: usize, floor: u64, excess: u128, amounts: &mut [u64]) {
    let mut left = excess;
    for i in (lo..heaps.len()).rev() {
        if left == 0 {
            break;
        }
        let room = (heaps[i] - floor) as u128;
        let take = room.min(left);
        amounts[i] = take as u64;
        left -= take;
    }
    debug_assert_eq!(left, 0, "trim capacity must cover the excess");
}

/// Classifies `p` and, for an N-position, constructs a winning move.
///
/// Runs in time polynomial in the bit length of the heap sizes: a square
/// root and a handful of sums.
pub fn analyze(p: &Position) -> Analysis {
    let heaps = p.heaps();
    let k = heaps.len();
    let m0 = heaps[0];
    let n = triangular_floor_index(m0);
    let tn = triangular_wide(n) as u64;
    let j = m0 - tn;
    let rest = p.rest_sum();
    let rest_w = rest as u128;
    let target = class_rest_sum(n, k);

    if j == 0 && rest_w == target {
        return Analysis {
            verdict: Verdict::P,
            class_index: Some(n),
            winning_move: None,
            derivation: None,
        };
    }

    let mut amounts = vec![0u64; k];
    let diagonal = |m: u64, t: u64, case| {
        (
            Move::Diagonal { t },
            Derivation {
                n,
                j,
                rest_sum: rest,
                case,
                m: Some(m),
                t: Some(t),
            },
        )
    };
    let (mv, derivation) = if j == 0 {
        if rest_w > target {
            trim_largest_first(heaps, 1, tn, rest_w - target, &mut amounts);
            subset(amounts, n, j, rest, CaseTag::TriangularTrimRest)
        } else {
            // rest = (k-1)T_n + m with 0 <= m < n.
            let m = (rest_w - (k as u128 - 1) * tn as u128) as u64;
            let t = tn - triangular_wide(m) as u64;
            diagonal(m, t, CaseTag::TriangularDiagonal)
        }
    } else if rest_w > target + j as u128 {
        if (heaps[1] as u128) < triangular_wide(n + 1) {
            amounts[0] = j;
            trim_largest_first(heaps, 2, tn, rest_w - target, &mut amounts);
            subset(amounts, n, j, rest, CaseTag::CutSmallest)
        } else {
            amounts[1] = heaps[1] - tn;
            let kept = rest_w - heaps[1] as u128 + m0 as u128;
            trim_largest_first(heaps, 2, tn, kept - target, &mut amounts);
            subset(amounts, n, j, rest, CaseTag::CutSecond)
        }
    } else {
        let m = (rest_w - (k as u128 - 1) * m0 as u128) as u64;
        let t = m0 - triangular_wide(m) as u64;
        diagonal(m, t, CaseTag::Diagonal)
    };

    debug_assert!(is_legal(p, &mv));
    Analysis {
        verdict: Verdict::N,
        class_index: None,
        winning_move: Some(mv),
        derivation: Some(derivation),
    }
}

fn subset(amounts: Vec<u64>, n: u64, j: u64, rest: u64, case: CaseTag) -> (Move, Derivation) {
    (
        Move::Subset { amounts },
        Derivation {
            n,
            j,
            rest_sum: rest,
            case,
            m: None,
            t: None,
        },
    )
}

/// The move the engine plays: a winning move when one exists, otherwise one
/// token from the largest heap. `None` at the terminal position.
pub fn engine_move(p: &Position) -> Option<Move> {
    if p.is_terminal() {
        return None;
    }
    analyze(p)
        .winning_move
        .or_else(|| Some(Move::take(p.k(), p.k() - 1, 1)))
}
