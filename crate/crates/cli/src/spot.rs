//! Randomized checks on positions far beyond any oracle table.
//!
//! N-side: random positions, whose constructed move must be legal and land on
//! a P-position. P-side: random members of random classes, which must have no
//! constructed move and whose sampled followers must all be N-positions.

use std::fmt;

use heapgame_core::strategy::{analyze, apply, is_legal, Move};
use heapgame_core::{is_p_position, triangular, Position, Result, Verdict};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Heaps are drawn below this.
const MAX_HEAP: u64 = 1 << 40;
/// Classes are drawn below this.
const MAX_CLASS: u64 = 1 << 20;
const FOLLOWERS_PER_P: usize = 16;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpotReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for SpotReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "spot-checked {} random positions, {} failures",
            self.checked,
            self.failures.len()
        )
    }
}

/// Checks `samples` random positions and `samples` random P-positions.
pub fn spot_check(k: usize, samples: usize, seed: u64) -> Result<SpotReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = SpotReport::default();
    for _ in 0..samples {
        let heaps: Vec<u64> = (0..k).map(|_| rng.gen_range(0..MAX_HEAP)).collect();
        check_position(&Position::new(heaps)?, &mut report);
        let p = random_p_position(k, &mut rng)?;
        check_position(&p, &mut report);
        for _ in 0..FOLLOWERS_PER_P {
            let mv = random_move(&p, &mut rng);
            if let Ok(f) = apply(&p, &mv) {
                if is_p_position(&f) {
                    report
                        .failures
                        .push(format!("{p}: P-position has P follower {f}"));
                }
            }
        }
    }
    Ok(report)
}

fn check_position(p: &Position, report: &mut SpotReport) {
    report.checked += 1;
    let a = analyze(p);
    let p_class = is_p_position(p);
    match (&a.winning_move, p_class) {
        (None, true) if a.verdict == Verdict::P => {}
        (Some(mv), false) if a.verdict == Verdict::N => {
            if !is_legal(p, mv) {
                report.failures.push(format!("{p}: illegal move {mv:?}"));
            } else if !apply(p, mv).is_ok_and(|q| is_p_position(&q)) {
                report
                    .failures
                    .push(format!("{p}: move {mv:?} misses the P-positions"));
            }
        }
        _ => report.failures.push(format!(
            "{p}: verdict {:?} but classifier says P={p_class}",
            a.verdict
        )),
    }
}

/// A uniform-ish member of a random class: `T_n` plus offsets forming a
/// partition of `n` into `k-1` parts.
fn random_p_position(k: usize, rng: &mut StdRng) -> Result<Position> {
    let n = rng.gen_range(0..MAX_CLASS);
    let base = triangular(n)?;
    let mut cuts: Vec<u64> = (0..k - 2).map(|_| rng.gen_range(0..=n)).collect();
    cuts.sort_unstable();
    let mut heaps = vec![base];
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        heaps.push(base + c - prev);
        prev = c;
    }
    Position::new(heaps)
}

fn random_move(p: &Position, rng: &mut StdRng) -> Move {
    let k = p.k();
    let h = p.heaps();
    if rng.gen_bool(0.25) && p.smallest() > 0 {
        return Move::Diagonal {
            t: rng.gen_range(1..=p.smallest()),
        };
    }
    // Up to k-1 heaps, each reduced by a random positive amount when possible.
    let touch = rng.gen_range(1..k);
    let mut amounts = vec![0; k];
    for _ in 0..touch {
        let i = rng.gen_range(0..k);
        if h[i] > 0 {
            amounts[i] = rng.gen_range(1..=h[i]);
        }
    }
    if amounts.iter().all(|&a| a == 0) {
        let i = k - 1;
        amounts[i] = 1.min(h[i]);
    }
    Move::Subset { amounts }
}
