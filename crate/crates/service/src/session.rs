//! Play sessions: a human against the engine, one shared position.

use std::time::Instant;

use heapgame_core::strategy::{apply_labeled, check_move, engine_move};
use heapgame_core::{normalize, IllegalMove, Move};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Human,
    Engine,
}

impl Player {
    fn other(self) -> Player {
        match self {
            Player::Human => Player::Engine,
            Player::Engine => Player::Human,
        }
    }
}

/// Whether the engine makes the first move of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSide {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub ply: usize,
    pub mover: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Heaps after the move, in the session's labeling.
    pub heaps: Vec<u64>,
}

/// Wire form of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: Uuid,
    pub k: usize,
    pub initial: Vec<u64>,
    pub heaps: Vec<u64>,
    pub canonical: Vec<u64>,
    pub engine_side: EngineSide,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_move: Option<Player>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<Player>,
    /// Number of moves played; a move request may quote it to guard against
    /// stale submissions.
    pub ply: usize,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug)]
pub enum MoveRejection {
    Finished,
    StalePly { expected: usize, got: usize },
    Illegal(IllegalMove),
}

#[derive(Debug)]
pub struct Session {
    id: Uuid,
    initial: Vec<u64>,
    heaps: Vec<u64>,
    engine_side: EngineSide,
    to_move: Player,
    winner: Option<Player>,
    history: Vec<HistoryEntry>,
    pub(crate) touched: Instant,
}

impl Session {
    /// Starts a game; if the engine moves first it plays immediately.
    pub fn start(heaps: Vec<u64>, engine_side: EngineSide) -> Self {
        let to_move = match engine_side {
            EngineSide::First => Player::Engine,
            EngineSide::Second => Player::Human,
        };
        let mut session = Session {
            id: Uuid::new_v4(),
            initial: heaps.clone(),
            heaps,
            engine_side,
            to_move,
            winner: None,
            history: Vec::new(),
            touched: Instant::now(),
        };
        session.settle();
        session
    }

    pub fn id(&self) -> Uuid {
        self.id
    }

    pub fn is_finished(&self) -> bool {
        self.winner.is_some()
    }

    /// Applies a human move, then the engine's reply if the game goes on.
    pub fn play(&mut self, mv: &Move, ply: Option<usize>) -> Result<(), MoveRejection> {
        if self.is_finished() {
            return Err(MoveRejection::Finished);
        }
        if let Some(got) = ply {
            if got != self.history.len() {
                return Err(MoveRejection::StalePly {
                    expected: self.history.len(),
                    got,
                });
            }
        }
        debug_assert_eq!(self.to_move, Player::Human);
        check_move(&self.heaps, mv).map_err(MoveRejection::Illegal)?;
        self.push(Player::Human, mv.clone());
        self.settle();
        Ok(())
    }

    /// Lets the engine move while it is its turn, and records a winner once
    /// no move is left.
    fn settle(&mut self) {
        if self.heaps.iter().all(|&h| h == 0) {
            // The player to move has no move and loses.
            self.winner = Some(self.to_move.other());
            return;
        }
        if self.to_move == Player::Engine {
            let (canonical, perm) = normalize(&self.heaps).expect("session heaps were validated");
            let mv = engine_move(&canonical)
                .expect("non-terminal position has a move")
                .to_labeled(&perm);
            self.push(Player::Engine, mv);
            if self.heaps.iter().all(|&h| h == 0) {
                self.winner = Some(Player::Engine);
            }
        }
    }

    fn push(&mut self, mover: Player, mv: Move) {
        self.heaps = apply_labeled(&self.heaps, &mv).expect("move was checked");
        self.history.push(HistoryEntry {
            ply: self.history.len() + 1,
            mover,
            mv,
            heaps: self.heaps.clone(),
        });
        self.to_move = mover.other();
    }

    pub fn view(&self) -> SessionView {
        let mut canonical = self.heaps.clone();
        canonical.sort_unstable();
        SessionView {
            id: self.id,
            k: self.heaps.len(),
            initial: self.initial.clone(),
            heaps: self.heaps.clone(),
            canonical,
            engine_side: self.engine_side,
            status: if self.is_finished() {
                Status::Finished
            } else {
                Status::InProgress
            },
            to_move: (!self.is_finished()).then_some(self.to_move),
            winner: self.winner,
            ply: self.history.len(),
            history: self.history.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use heapgame_core::is_p_position;
    use heapgame_core::Position;

    #[test]
    fn engine_first_wins_from_unit_heaps() {
        let s = Session::start(vec![1, 1, 1, 1], EngineSide::First);
        let v = s.view();
        assert_eq!(v.heaps, vec![0, 0, 0, 0]);
        assert_eq!(v.status, Status::Finished);
        assert_eq!(v.winner, Some(Player::Engine));
        assert_eq!(v.history.len(), 1);
        assert_eq!(v.history[0].mv, Move::Diagonal { t: 1 });
    }

    #[test]
    fn terminal_start() {
        let s = Session::start(vec![0, 0, 0], EngineSide::Second);
        assert_eq!(s.view().winner, Some(Player::Engine));
        let s = Session::start(vec![0, 0, 0], EngineSide::First);
        assert_eq!(s.view().winner, Some(Player::Human));
    }

    #[test]
    fn engine_replies_into_p_positions() {
        let mut s = Session::start(vec![9, 4, 13, 2], EngineSide::Second);
        while !s.is_finished() {
            // Human takes one token from the first nonempty heap.
            let heap = s.heaps.iter().position(|&h| h > 0).unwrap();
            s.play(&Move::take(4, heap, 1), None).unwrap();
            assert!(s.history.len() < 200);
        }
        let p = |h: &Vec<u64>| is_p_position(&Position::new(h.clone()).unwrap());
        for pair in s.history.windows(2) {
            if pair[1].mover == Player::Engine && !p(&pair[0].heaps) {
                assert!(p(&pair[1].heaps), "engine left {:?}", pair[1].heaps);
            }
        }
        assert_eq!(s.view().winner, Some(Player::Engine));
    }

    #[test]
    fn rejections() {
        let mut s = Session::start(vec![2, 3, 4], EngineSide::Second);
        assert!(matches!(
            s.play(
                &Move::Subset {
                    amounts: vec![1, 1, 1]
                },
                None
            ),
            Err(MoveRejection::Illegal(IllegalMove::TooManyHeaps { .. }))
        ));
        assert!(matches!(
            s.play(&Move::Diagonal { t: 1 }, Some(3)),
            Err(MoveRejection::StalePly {
                expected: 0,
                got: 3
            })
        ));
        s.play(&Move::Diagonal { t: 2 }, Some(0)).unwrap();
        let mut done = Session::start(vec![1, 1, 1, 1], EngineSide::First);
        assert!(matches!(
            done.play(&Move::Diagonal { t: 1 }, None),
            Err(MoveRejection::Finished)
        ));
    }
}
