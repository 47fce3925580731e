//! JSON message shapes shared by the HTTP service and the CLI's
//! `json-lines` output. Heap vectors are always in the caller's order;
//! `canonical` is the sorted form.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::position::normalize;
use crate::strategy::{analyze, apply_labeled, Derivation, Move, Verdict};
use crate::wythoff::wythoff_pair_index;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeRequest {
    pub k: usize,
    pub heaps: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeResponse {
    pub verdict: Verdict,
    pub heaps: Vec<u64>,
    pub canonical: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_index: Option<u64>,
    /// Indexed like `heaps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winning_move: Option<Move>,
    /// `heaps` after the winning move.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
}

impl AnalyzeResponse {
    /// Analyzes heaps given in the caller's order.
    pub fn for_heaps(heaps: &[u64]) -> Result<Self> {
        let (canonical, perm) = normalize(heaps)?;
        let analysis = analyze(&canonical).to_labeled(&perm);
        let result = match &analysis.winning_move {
            Some(mv) => Some(apply_labeled(heaps, mv)?),
            None => None,
        };
        Ok(Self {
            verdict: analysis.verdict,
            heaps: heaps.to_vec(),
            canonical: canonical.into_heaps(),
            class_index: analysis.class_index,
            winning_move: analysis.winning_move,
            result,
            derivation: analysis.derivation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WythoffRequest {
    pub heaps: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WythoffResponse {
    pub verdict: Verdict,
    pub heaps: Vec<u64>,
    /// `n` with the heaps equal to `{A_n, B_n}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_index: Option<u64>,
}

impl WythoffResponse {
    pub fn for_heaps(x: u64, y: u64) -> Self {
        let pair_index = wythoff_pair_index(x, y);
        Self {
            verdict: if pair_index.is_some() {
                Verdict::P
            } else {
                Verdict::N
            },
            heaps: vec![x, y],
            pair_index,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_response() {
        let r = AnalyzeResponse::for_heaps(&[8, 7, 7, 7]).unwrap();
        assert_eq!(r.verdict, Verdict::N);
        assert_eq!(r.canonical, vec![7, 7, 7, 8]);
        assert_eq!(r.winning_move, Some(Move::Diagonal { t: 6 }));
        assert_eq!(r.result, Some(vec![2, 1, 1, 1]));

        let r = AnalyzeResponse::for_heaps(&[4, 3, 4, 3]).unwrap();
        assert_eq!(r.verdict, Verdict::P);
        assert_eq!(r.class_index, Some(2));
        assert!(r.winning_move.is_none() && r.result.is_none());
    }
}
