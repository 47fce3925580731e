//! Brute-force ground truth: P/N outcomes from the defining recursion (a
//! position is P exactly when none of its followers is P) and Sprague-Grundy
//! values, memoized over canonical positions with every heap `<= bound`.
//!
//! Nothing here uses the closed form; the outcome and the Grundy value are
//! computed separately so each can check the other.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::position::{p_class_index, Position, DEFAULT_MAX_HEAPS, MIN_HEAPS};
use crate::strategy::{self, for_each_follower_raw, Move, Verdict, DEFAULT_FOLLOWER_CAP};

/// Largest number of table slots (`(bound+1)^k`) a table may allocate.
pub const MAX_TABLE_SLOTS: u128 = 1 << 26;

/// Largest follower-generation work a table fill may take, estimated as
/// canonical positions times the followers of the largest one.
pub const MAX_TABLE_WORK: u128 = 1 << 30;

/// Number of canonical positions with `k` heaps `<= bound`: `C(bound+k, k)`.
pub fn canonical_count(k: usize, bound: u64) -> u128 {
    (1..=k as u128).fold(1u128, |acc, i| acc.saturating_mul(bound as u128 + i) / i)
}

/// Default exploration bound for `k` heaps.
pub fn default_bound(k: usize) -> u64 {
    match k {
        0..=3 => 15,
        4 => 10,
        5 => 6,
        _ => 4,
    }
}

/// Least nonnegative integer not in `values`.
pub fn mex(values: impl IntoIterator<Item = u64>) -> u64 {
    let values: Vec<u64> = values.into_iter().collect();
    let mut seen = vec![false; values.len() + 1];
    for v in values {
        if let Some(slot) = usize::try_from(v).ok().and_then(|i| seen.get_mut(i)) {
            *slot = true;
        }
    }
    seen.iter().position(|&s| !s).unwrap_or(seen.len()) as u64
}

const UNKNOWN: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Unknown,
    P,
    N,
}

/// Memoized outcomes and Grundy values, indexed densely by canonical tuple.
#[derive(Clone)]
pub struct GrundyTable {
    k: usize,
    bound: u64,
    grundy: Vec<u64>,
    outcome: Vec<Outcome>,
}

impl fmt::Debug for GrundyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrundyTable")
            .field("k", &self.k)
            .field("bound", &self.bound)
            .field("known", &self.known_count())
            .finish()
    }
}

impl GrundyTable {
    /// An empty table for `k` heaps of at most `bound` tokens each.
    pub fn new(k: usize, bound: u64) -> Result<Self> {
        Self::with_cap(k, bound, DEFAULT_FOLLOWER_CAP)
    }

    /// As [`GrundyTable::new`], refusing tables whose largest position has
    /// more than `cap` followers.
    pub fn with_cap(k: usize, bound: u64, cap: u128) -> Result<Self> {
        if !(MIN_HEAPS..=DEFAULT_MAX_HEAPS).contains(&k) {
            return Err(Error::Domain(format!(
                "k must be in {MIN_HEAPS}..={DEFAULT_MAX_HEAPS}, got {k}"
            )));
        }
        let slots = (bound as u128 + 1)
            .checked_pow(k as u32)
            .unwrap_or(u128::MAX);
        if slots > MAX_TABLE_SLOTS {
            return Err(Error::ResourceLimit {
                what: "oracle table slots",
                needed: slots,
                limit: MAX_TABLE_SLOTS,
            });
        }
        let work = strategy::follower_work(&vec![bound; k]);
        if work > cap {
            return Err(Error::ResourceLimit {
                what: "follower generation",
                needed: work,
                limit: cap,
            });
        }
        let total = canonical_count(k, bound).saturating_mul(work);
        if total > MAX_TABLE_WORK {
            return Err(Error::ResourceLimit {
                what: "oracle table work",
                needed: total,
                limit: MAX_TABLE_WORK,
            });
        }
        Ok(Self {
            k,
            bound,
            grundy: vec![UNKNOWN; slots as usize],
            outcome: vec![Outcome::Unknown; slots as usize],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Number of canonical positions evaluated so far.
    pub fn known_count(&self) -> usize {
        self.outcome
            .iter()
            .filter(|o| **o != Outcome::Unknown)
            .count()
    }

    fn index(&self, sorted: &[u64]) -> usize {
        let radix = self.bound as usize + 1;
        sorted
            .iter()
            .rev()
            .fold(0usize, |acc, &h| acc * radix + h as usize)
    }

    fn check(&self, p: &Position) -> Result<usize> {
        if p.k() != self.k {
            return Err(Error::Domain(format!(
                "table is for {} heaps, position has {}",
                self.k,
                p.k()
            )));
        }
        let largest = p.heaps()[p.k() - 1];
        if largest > self.bound {
            return Err(Error::ResourceLimit {
                what: "oracle heap bound",
                needed: largest as u128,
                limit: self.bound as u128,
            });
        }
        Ok(self.index(p.heaps()))
    }

    /// Outcome of `p` by the defining recursion.
    pub fn classify(&mut self, p: &Position) -> Result<Verdict> {
        let idx = self.check(p)?;
        self.ensure(p.heaps().to_vec(), idx);
        Ok(match self.outcome[idx] {
            Outcome::P => Verdict::P,
            Outcome::N => Verdict::N,
            Outcome::Unknown => unreachable!("ensure evaluates the position"),
        })
    }

    /// Sprague-Grundy value of `p`.
    pub fn grundy(&mut self, p: &Position) -> Result<u64> {
        let idx = self.check(p)?;
        self.ensure(p.heaps().to_vec(), idx);
        Ok(self.grundy[idx])
    }

    /// Evaluates every position in bound, by increasing token total.
    pub fn fill(&mut self) {
        let mut all = canonical_positions(self.k, self.bound);
        all.sort_by_key(|h| h.iter().sum::<u64>());
        let mut buf = Vec::with_capacity(self.k);
        let mut sorted = Vec::with_capacity(self.k);
        let mut children = Vec::new();
        for heaps in all {
            let idx = self.index(&heaps);
            let complete = self.collect_children(&heaps, &mut buf, &mut sorted, &mut children);
            debug_assert!(complete, "followers have smaller totals");
            self.settle(idx, &children);
        }
    }

    /// Depth-first evaluation with an explicit stack.
    fn ensure(&mut self, heaps: Vec<u64>, idx: usize) {
        if self.outcome[idx] != Outcome::Unknown {
            return;
        }
        let mut stack = vec![(heaps, idx)];
        let mut buf = Vec::with_capacity(self.k);
        let mut sorted = Vec::with_capacity(self.k);
        let mut children = Vec::new();
        while let Some((heaps, idx)) = stack.last().cloned() {
            if self.outcome[idx] != Outcome::Unknown {
                stack.pop();
                continue;
            }
            if self.collect_children(&heaps, &mut buf, &mut sorted, &mut children) {
                self.settle(idx, &children);
                stack.pop();
            } else {
                for &(child, _) in &children {
                    if self.outcome[child] == Outcome::Unknown {
                        stack.push((self.decode(child), child));
                    }
                }
            }
        }
    }

    /// Fills `children` with `(index, known)` for every follower. Returns
    /// whether all of them are already evaluated.
    fn collect_children(
        &self,
        heaps: &[u64],
        buf: &mut Vec<u64>,
        sorted: &mut Vec<u64>,
        children: &mut Vec<(usize, bool)>,
    ) -> bool {
        children.clear();
        let mut complete = true;
        for_each_follower_raw(heaps, buf, |q| {
            sorted.clear();
            sorted.extend_from_slice(q);
            sorted.sort_unstable();
            let idx = self.index(sorted);
            let known = self.outcome[idx] != Outcome::Unknown;
            complete &= known;
            children.push((idx, known));
        });
        children.sort_unstable();
        children.dedup();
        complete
    }

    fn settle(&mut self, idx: usize, children: &[(usize, bool)]) {
        let any_p = children.iter().any(|&(c, _)| self.outcome[c] == Outcome::P);
        self.outcome[idx] = if any_p { Outcome::N } else { Outcome::P };
        self.grundy[idx] = mex(children.iter().map(|&(c, _)| self.grundy[c]));
    }

    fn decode(&self, mut idx: usize) -> Vec<u64> {
        let radix = self.bound as usize + 1;
        (0..self.k)
            .map(|_| {
                let d = idx % radix;
                idx /= radix;
                d as u64
            })
            .collect()
    }

    /// Writes the filled table as CSV: a `k,bound` header line and its values,
    /// a column header, then one row per canonical position in lexicographic
    /// order.
    pub fn write_csv(&mut self, mut w: impl Write) -> std::io::Result<()> {
        self.fill();
        writeln!(w, "k,bound")?;
        writeln!(w, "{},{}", self.k, self.bound)?;
        let cols: Vec<String> = (0..self.k).map(|i| format!("h{i}")).collect();
        writeln!(w, "{},g", cols.join(","))?;
        for heaps in canonical_positions(self.k, self.bound) {
            let g = self.grundy[self.index(&heaps)];
            for h in &heaps {
                write!(w, "{h},")?;
            }
            writeln!(w, "{g}")?;
        }
        Ok(())
    }

    /// Loads a table written by [`GrundyTable::write_csv`]. Outcomes are
    /// restored from the Grundy values (P exactly where `g = 0`).
    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()
                .map_err(|e| Error::Parse(e.to_string()))?
                .ok_or_else(|| Error::Parse(format!("missing {what}")))
        };
        if next("header")?.trim() != "k,bound" {
            return Err(Error::Parse("first line must be `k,bound`".into()));
        }
        let dims = next("k,bound values")?;
        let (k, bound) = dims
            .trim()
            .split_once(',')
            .and_then(|(k, b)| Some((k.parse::<usize>().ok()?, b.parse::<u64>().ok()?)))
            .ok_or_else(|| Error::Parse(format!("bad k,bound line `{dims}`")))?;
        let mut table = Self::new(k, bound)?;
        next("column header")?;
        let mut rows = 0usize;
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<u64> = line
                .trim()
                .split(',')
                .map(|f| f.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 1)))?;
            if fields.len() != k + 1 {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 1,
                    fields.len(),
                    k + 1
                )));
            }
            let heaps = &fields[..k];
            if heaps.windows(2).any(|w| w[0] > w[1]) || heaps[k - 1] > bound {
                return Err(Error::Parse(format!(
                    "row {} is not a canonical position within bound",
                    lineno + 1
                )));
            }
            let idx = table.index(heaps);
            table.grundy[idx] = fields[k];
            table.outcome[idx] = if fields[k] == 0 {
                Outcome::P
            } else {
                Outcome::N
            };
            rows += 1;
        }
        let expected = canonical_positions(k, bound).len();
        if rows != expected {
            return Err(Error::Parse(format!(
                "table has {rows} rows, expected {expected}"
            )));
        }
        Ok(table)
    }
}

/// Every nondecreasing `k`-tuple with entries in `0..=bound`, lexicographically.
pub fn canonical_positions(k: usize, bound: u64) -> Vec<Vec<u64>> {
    fn go(k: usize, bound: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        let lo = acc.last().copied().unwrap_or(0);
        for h in lo..=bound {
            acc.push(h);
            go(k, bound, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(k, bound, &mut Vec::with_capacity(k), &mut out);
    out
}

/// One failed check found by [`exhaustive_agreement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disagreement {
    /// Oracle and closed-form classifier disagree.
    Classification { position: Position, oracle: Verdict },
    /// The constructed move is illegal or does not reach a P-position.
    BadWinningMove { position: Position, detail: String },
    /// A follower of a P-position is itself P.
    PFollower {
        position: Position,
        follower: Position,
    },
    /// Grundy value zero does not coincide with the oracle outcome P.
    Grundy {
        position: Position,
        grundy: u64,
        oracle: Verdict,
    },
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Disagreement::Classification { position, oracle } => {
                write!(
                    f,
                    "{position}: oracle says {oracle:?}, classifier disagrees"
                )
            }
            Disagreement::BadWinningMove { position, detail } => {
                write!(f, "{position}: winning move failed: {detail}")
            }
            Disagreement::PFollower { position, follower } => {
                write!(f, "{position}: P-position has P follower {follower}")
            }
            Disagreement::Grundy {
                position,
                grundy,
                oracle,
            } => write!(f, "{position}: g = {grundy} but oracle says {oracle:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub k: usize,
    pub bound: u64,
    pub checked: usize,
    pub p_positions: usize,
    pub n_positions: usize,
    /// Followers of P-positions examined.
    pub p_followers_checked: usize,
    pub disagreements: Vec<Disagreement>,
}

impl AgreementReport {
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

impl fmt::Display for AgreementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} bound={}: checked {} positions ({} P, {} N, {} P-followers), {} disagreements",
            self.k,
            self.bound,
            self.checked,
            self.p_positions,
            self.n_positions,
            self.p_followers_checked,
            self.disagreements.len()
        )
    }
}

/// Compares the closed-form classifier and the constructed winning moves with
/// the oracle on every canonical position with heaps `<= bound`.
pub fn exhaustive_agreement(k: usize, bound: u64) -> Result<AgreementReport> {
    let mut table = GrundyTable::new(k, bound)?;
    table.fill();
    exhaustive_agreement_with(&mut table)
}

/// As [`exhaustive_agreement`], against an existing (possibly loaded) table.
pub fn exhaustive_agreement_with(table: &mut GrundyTable) -> Result<AgreementReport> {
    let mut report = AgreementReport {
        k: table.k(),
        bound: table.bound(),
        ..Default::default()
    };
    for heaps in canonical_positions(table.k(), table.bound()) {
        let p = Position::from_sorted_unchecked(heaps);
        let oracle = table.classify(&p)?;
        let g = table.grundy(&p)?;
        let closed = p_class_index(&p).is_some();
        report.checked += 1;

        if closed != (oracle == Verdict::P) {
            report.disagreements.push(Disagreement::Classification {
                position: p.clone(),
                oracle,
            });
        }
        if (g == 0) != (oracle == Verdict::P) {
            report.disagreements.push(Disagreement::Grundy {
                position: p.clone(),
                grundy: g,
                oracle,
            });
        }

        if closed {
            report.p_positions += 1;
            for q in strategy::followers(&p, DEFAULT_FOLLOWER_CAP)? {
                report.p_followers_checked += 1;
                if p_class_index(&q).is_some() {
                    report.disagreements.push(Disagreement::PFollower {
                        position: p.clone(),
                        follower: q,
                    });
                }
            }
        } else {
            report.n_positions += 1;
            if let Some(detail) = check_winning_move(&p) {
                report.disagreements.push(Disagreement::BadWinningMove {
                    position: p,
                    detail,
                });
            }
        }
    }
    Ok(report)
}

fn check_winning_move(p: &Position) -> Option<String> {
    let analysis = strategy::analyze(p);
    let Some(mv) = analysis.winning_move else {
        return Some("no move produced".into());
    };
    if let Move::Subset { amounts } = &mv {
        if amounts.iter().filter(|&&a| a > 0).count() > p.k() - 1 {
            return Some(format!("{mv:?} touches every heap"));
        }
    }
    match strategy::apply(p, &mv) {
        Err(e) => Some(format!("{mv:?}: {e}")),
        Ok(q) if p_class_index(&q).is_none() => Some(format!("{mv:?} reaches N-position {q}")),
        Ok(_) => None,
    }
}
