use std::io::{Cursor, Write};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use heapgame_cli::play::{parse_command, play_text, Command as PlayCommand, Outcome};
use heapgame_cli::Format;
use heapgame_core::strategy::Move;
use heapgame_core::wire::AnalyzeResponse;
use heapgame_service::session::{EngineSide, Player};

fn heapgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heapgame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn heapgame_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_heapgame"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("heapgame-{}-{name}", std::process::id()))
}

#[test]
fn analyze_reports() {
    let o = heapgame(&["analyze", "3", "3", "4", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P (n=2)\n");

    let o = heapgame(&["analyze", "1", "1", "1", "1"]);
    assert!(stdout(&o).starts_with("N; move: diagonal -1 -> (0,0,0,0)\n"));
    assert!(stdout(&o).contains("case=triangular_diagonal"));

    let o = heapgame(&["analyze", "7", "8", "7", "7"]);
    assert!(stdout(&o).starts_with("N; move: diagonal -6 -> (1,2,1,1)\n"));
    assert!(stdout(&o).contains("n=3 j=1 L=22 case=diagonal m=1 t=6"));
}

#[test]
fn analyze_json_lines_uses_wire_shape() {
    let o = heapgame(&["--format", "json-lines", "analyze", "5", "2", "4", "3"]);
    let r: AnalyzeResponse = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r.heaps, vec![5, 2, 4, 3]);
    assert_eq!(
        r.winning_move,
        Some(Move::Subset {
            amounts: vec![4, 0, 3, 2]
        })
    );
    assert_eq!(r.result, Some(vec![1, 2, 1, 1]));
    // Stable across runs.
    assert_eq!(
        heapgame(&["--format", "json-lines", "analyze", "5", "2", "4", "3"]).stdout,
        o.stdout
    );
}

#[test]
fn exit_codes() {
    let o = heapgame(&["analyze", "1", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wythoff"));

    assert_eq!(
        heapgame(&["analyze", "1", "2", "3", "--k", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(heapgame(&["analyze", "x", "2", "3"]).status.code(), Some(1));
    assert_eq!(heapgame(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(heapgame(&["--help"]).status.code(), Some(0));
    assert_eq!(
        heapgame(&["verify", "--k", "3", "--bound", "99"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        heapgame(&["analyze", "18446744073709551615", "1", "0"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        heapgame(&["enumerate", "--n", "6074001000", "--k", "3"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn enumerate_lists_a_class() {
    let o = heapgame(&["enumerate", "--n", "2", "--k", "4"]);
    assert_eq!(stdout(&o), "(3,3,3,5)\n(3,3,4,4)\n");
    let o = heapgame(&[
        "--format",
        "json-lines",
        "enumerate",
        "--n",
        "1",
        "--k",
        "3",
    ]);
    assert_eq!(stdout(&o), "{\"n\":1,\"k\":3,\"heaps\":[1,1,2]}\n");
}

#[test]
fn verify_passes_and_reports() {
    let o = heapgame(&[
        "verify",
        "--k",
        "3",
        "--bound",
        "12",
        "--samples",
        "50",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("checked 455 positions"), "{text}");
    assert!(text.contains(", 0 disagreements"));
    assert!(text.contains("0 failures"));
}

#[test]
fn saved_table_round_trip_and_tampering() {
    let path = scratch("g3.csv");
    let o = heapgame(&[
        "grundy",
        "--k",
        "3",
        "--bound",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("k,bound\n3,6\nh0,h1,h2,g\n0,0,0,0\n"));

    let o = heapgame(&["verify", "--table", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // Mark the P-position (1,1,2) as N: verification must fail.
    let tampered = csv.replace("\n1,1,2,0\n", "\n1,1,2,5\n");
    assert_ne!(tampered, csv);
    std::fs::write(&path, tampered).unwrap();
    let o = heapgame(&["verify", "--table", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("(1,1,2)"));

    std::fs::write(&path, "not a table\n").unwrap();
    assert_eq!(
        heapgame(&["verify", "--table", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn density_csv() {
    let o = heapgame(&["density", "--k", "3", "--n-max", "4"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "N,pi_exact,nu_exact,pi_lower,pi_upper,nu_lower,nu_upper,ratio"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,"));
    assert!(lines[4].starts_with("4,"));
}

#[test]
fn wythoff_table_and_pair() {
    let o = heapgame(&["wythoff", "--pairs", "11"]);
    let text = stdout(&o);
    let rows: Vec<Vec<u64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|w| w.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10], vec![10, 16, 26]);
    assert_eq!(stdout(&heapgame(&["wythoff", "20", "12"])), "P (n=8)\n");
    assert_eq!(stdout(&heapgame(&["wythoff", "20", "13"])), "N\n");
    assert_eq!(heapgame(&["wythoff", "1", "2", "3"]).status.code(), Some(1));
}

#[test]
fn play_binary_engine_first() {
    let o = heapgame_with_input(&["play", "1", "1", "1", "1", "--engine", "first"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "engine: diagonal -1 -> (0,0,0,0)\nengine wins\n"
    );
}

#[test]
fn play_rejects_then_continues() {
    let o = heapgame_with_input(
        &["play", "2", "3", "4", "5"],
        "take 5 from heap 2\n1 1 1 1\ntake 1 from heap 4\nquit\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("illegal move: cannot take 5 from heap 2, it only holds 3"));
    assert!(text.contains("at most k-1 heaps"));
    assert!(text.contains("you: take 1 from heap 4 -> (2,3,4,4)"));
    assert!(text.contains("game abandoned"));
}

#[test]
fn parse_commands() {
    assert_eq!(
        parse_command("take 5 from heap 2", 4),
        Ok(PlayCommand::Move(Move::Subset {
            amounts: vec![0, 5, 0, 0]
        }))
    );
    assert_eq!(
        parse_command("diagonal 3", 4),
        Ok(PlayCommand::Move(Move::Diagonal { t: 3 }))
    );
    assert_eq!(
        parse_command(" 0 1 2 ", 3),
        Ok(PlayCommand::Move(Move::Subset {
            amounts: vec![0, 1, 2]
        }))
    );
    assert_eq!(parse_command("quit", 3), Ok(PlayCommand::Quit));
    assert!(parse_command("take 1 from heap 0", 3).is_err());
    assert!(parse_command("take 1 from heap 4", 3).is_err());
    assert!(parse_command("1 2", 3).is_err());
    assert!(parse_command("diagonal -1", 3).is_err());
}

#[test]
fn engine_wins_from_unit_heaps_whatever_the_reply() {
    // Engine diagonal from (1,1,1,1) ends the game at once; from an N-position
    // no fixed human reply wins either.
    let mut out = Vec::new();
    let outcome = play_text(
        vec![1, 1, 1, 1],
        EngineSide::First,
        Format::Human,
        &mut Cursor::new(""),
        &mut out,
    )
    .unwrap();
    assert_eq!(outcome, Outcome::Won(Player::Engine));

    for reply in [
        "take 1 from heap 1",
        "take 1 from heap 4",
        "diagonal 1",
        "0 1 1 1",
    ] {
        let mut out = Vec::new();
        let script = format!("{reply}\n").repeat(200);
        let outcome = play_text(
            vec![3, 4, 2, 9],
            EngineSide::First,
            Format::Human,
            &mut Cursor::new(script),
            &mut out,
        )
        .unwrap();
        assert_ne!(
            outcome,
            Outcome::Won(Player::Human),
            "{}",
            String::from_utf8_lossy(&out)
        );
    }
}

#[test]
fn engine_stalls_from_p_position() {
    let mut out = Vec::new();
    play_text(
        vec![1, 1, 1, 2],
        EngineSide::First,
        Format::Human,
        &mut Cursor::new("quit\n"),
        &mut out,
    )
    .unwrap();
    assert!(String::from_utf8(out)
        .unwrap()
        .starts_with("engine: take 1 from heap 4 -> (1,1,1,1)\n"));
}

#[test]
fn play_json_lines_emits_session_views() {
    let mut out = Vec::new();
    play_text(
        vec![1, 1, 1, 1],
        EngineSide::First,
        Format::JsonLines,
        &mut Cursor::new(""),
        &mut out,
    )
    .unwrap();
    let text = String::from_utf8(out).unwrap();
    let view: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(view["status"], "finished");
    assert_eq!(view["winner"], "engine");
}
