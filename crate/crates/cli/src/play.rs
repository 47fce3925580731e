//! Text-mode play against the engine.
//!
//! Input lines, with 1-based heap numbers:
//!
//! ```text
//! take 3 from heap 2
//! diagonal 4
//! 0 2 0 1          (amount per heap)
//! quit
//! ```

use std::io::{BufRead, Write};

use heapgame_core::position::format_tuple;
use heapgame_core::strategy::Move;
use heapgame_core::{normalize, IllegalMove};
use heapgame_service::session::{EngineSide, MoveRejection, Player, Session};

use crate::{describe_move, CliResult, Format};

/// How a text game ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Won(Player),
    Quit,
    EndOfInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Move(Move),
    Quit,
    Help,
}

const HELP: &str =
    "moves: `take A from heap I`, `diagonal T`, or one amount per heap; `quit` to stop";

/// Parses one line of input for a game with `k` heaps.
pub fn parse_command(line: &str, k: usize) -> Result<Command, String> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let num = |w: &str| {
        w.parse::<u64>()
            .map_err(|_| format!("`{w}` is not a nonnegative number"))
    };
    match words[..] {
        ["quit"] | ["q"] | ["exit"] => Ok(Command::Quit),
        ["help"] | ["?"] => Ok(Command::Help),
        ["take", a, "from", "heap", i] => {
            let amount = num(a)?;
            let heap = num(i)?;
            if heap == 0 || heap > k as u64 {
                return Err(format!("heaps are numbered 1 to {k}"));
            }
            Ok(Command::Move(Move::take(k, heap as usize - 1, amount)))
        }
        ["diagonal", t] => Ok(Command::Move(Move::Diagonal { t: num(t)? })),
        _ if !words.is_empty() && words.iter().all(|w| w.parse::<u64>().is_ok()) => {
            if words.len() != k {
                return Err(format!("give one amount per heap ({k} numbers)"));
            }
            let amounts = words.iter().map(|w| num(w)).collect::<Result<_, _>>()?;
            Ok(Command::Move(Move::Subset { amounts }))
        }
        _ => Err(format!("unrecognized input `{}`; {HELP}", line.trim())),
    }
}

/// The rejection message with 1-based heap numbers.
pub fn describe_rejection(rule: &IllegalMove) -> String {
    match rule {
        IllegalMove::Exceeds {
            heap,
            amount,
            available,
        } => format!(
            "cannot take {amount} from heap {}, it only holds {available}",
            heap + 1
        ),
        other => other.to_string(),
    }
}

/// Runs a game on `input`/`out` until someone wins, the human quits, or
/// input ends.
pub fn play_text(
    heaps: Vec<u64>,
    side: EngineSide,
    format: Format,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CliResult<Outcome> {
    normalize(&heaps)?;
    let k = heaps.len();
    let mut session = Session::start(heaps, side);
    let mut shown = 0;
    let mut line = String::new();
    loop {
        let view = session.view();
        if format == Format::JsonLines {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&view).expect("view serializes")
            )?;
        } else {
            for entry in &view.history[shown..] {
                let who = match entry.mover {
                    Player::Human => "you",
                    Player::Engine => "engine",
                };
                writeln!(
                    out,
                    "{who}: {} -> {}",
                    describe_move(&entry.mv),
                    format_tuple(&entry.heaps)
                )?;
            }
        }
        shown = view.history.len();
        if let Some(winner) = view.winner {
            if format == Format::Human {
                match winner {
                    Player::Human => writeln!(out, "you win")?,
                    Player::Engine => writeln!(out, "engine wins")?,
                }
            }
            return Ok(Outcome::Won(winner));
        }
        loop {
            if format == Format::Human {
                write!(out, "{} your move> ", format_tuple(&view.heaps))?;
                out.flush()?;
            }
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                writeln!(out, "input ended; game abandoned")?;
                return Ok(Outcome::EndOfInput);
            }
            if line.trim().is_empty() {
                continue;
            }
            let mv = match parse_command(&line, k) {
                Ok(Command::Move(mv)) => mv,
                Ok(Command::Quit) => {
                    writeln!(out, "game abandoned")?;
                    return Ok(Outcome::Quit);
                }
                Ok(Command::Help) => {
                    writeln!(out, "{HELP}")?;
                    continue;
                }
                Err(msg) => {
                    writeln!(out, "{msg}")?;
                    continue;
                }
            };
            match session.play(&mv, None) {
                Ok(()) => break,
                Err(MoveRejection::Illegal(rule)) => {
                    writeln!(
                        out,
                        "illegal move: {}; try again",
                        describe_rejection(&rule)
                    )?;
                }
                Err(MoveRejection::Finished | MoveRejection::StalePly { .. }) => {
                    unreachable!("a single player cannot act out of turn")
                }
            }
        }
    }
}

pub(crate) fn run(
    heaps: Vec<u64>,
    side: EngineSide,
    format: Format,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CliResult {
    play_text(heaps, side, format, input, out).map(|_| ())
}
