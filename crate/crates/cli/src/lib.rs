//! The `heapgame` command line: analysis, enumeration, verification against
//! the retrograde oracle, density tables, Wythoff pairs, text play and the
//! HTTP service.

pub mod play;
pub mod spot;

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use heapgame_core::density::{ratio_scan, to_f64, write_csv as write_density_csv};
use heapgame_core::oracle::{
    canonical_positions, default_bound, exhaustive_agreement_with, GrundyTable,
};
use heapgame_core::position::{format_tuple, DEFAULT_MAX_HEAPS, MIN_HEAPS};
use heapgame_core::strategy::{Derivation, Move, DEFAULT_FOLLOWER_CAP};
use heapgame_core::wire::{AnalyzeResponse, WythoffResponse};
use heapgame_core::wythoff::wythoff_pairs_mex;
use heapgame_core::{enumerate_p_class, Error as CoreError, Position, Verdict};
use heapgame_service::session::EngineSide;
use serde::Serialize;
use serde_json::json;

pub const DEFAULT_K: usize = 4;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_RANGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "heapgame",
    version,
    about = "Analyze and play the k-heap extension of Wythoff's game"
)]
pub struct Cli {
    /// Number of heaps, at least 3. Inferred from the heaps when given.
    #[arg(long, global = true)]
    pub k: Option<usize>,

    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,

    /// Largest heap size for oracle and Grundy tables.
    #[arg(long, global = true)]
    pub bound: Option<u64>,

    /// Most followers a single position may generate.
    #[arg(long, global = true, default_value_t = DEFAULT_FOLLOWER_CAP)]
    pub cap: u128,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    First,
    Second,
}

impl From<Side> for EngineSide {
    fn from(side: Side) -> Self {
        match side {
            Side::First => EngineSide::First,
            Side::Second => EngineSide::Second,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verdict with class index, or a winning move with its derivation.
    Analyze {
        #[arg(required = true)]
        heaps: Vec<u64>,
    },
    /// List the P-positions of class n, or of every class from n to --to.
    Enumerate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Check the classifier and winning moves against the retrograde oracle.
    Verify {
        /// Load the oracle table from a CSV written by `grundy`.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
        /// Extra random positions with large heaps to spot-check.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact P-position counts against the closed-form bounds, as CSV.
    Density {
        #[arg(long)]
        n_max: u64,
    },
    /// Export the Grundy table as CSV.
    Grundy,
    /// Wythoff pairs, or the verdict for two heaps X Y.
    Wythoff {
        #[arg(long, conflicts_with = "heaps")]
        pairs: Option<usize>,
        heaps: Vec<u64>,
    },
    /// Play against the engine on the terminal.
    Play {
        #[arg(required = true)]
        heaps: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Side::Second)]
        engine: Side,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Idle seconds before a session is dropped.
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
        /// Built web UI assets to serve at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Core(CoreError),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Core(CoreError::ResourceLimit { .. }) => EXIT_RESOURCE,
            CliError::Core(CoreError::ArithmeticRange(_)) => EXIT_RANGE,
            CliError::Core(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn too_few_heaps(got: usize) -> CliError {
    CliError::Usage(format!(
        "the game needs at least {MIN_HEAPS} heaps, got {got}; for two heaps run `heapgame wythoff X Y`"
    ))
}

impl Cli {
    /// Heap count for commands that take no heaps.
    fn k(&self) -> CliResult<usize> {
        let k = self.k.unwrap_or(DEFAULT_K);
        if k < MIN_HEAPS {
            return Err(too_few_heaps(k));
        }
        if k > DEFAULT_MAX_HEAPS {
            return Err(CliError::Usage(format!(
                "--k {k} exceeds the limit of {DEFAULT_MAX_HEAPS}"
            )));
        }
        Ok(k)
    }

    /// Checks heaps given on the command line against `--k`.
    fn check_heaps(&self, heaps: &[u64]) -> CliResult<()> {
        if heaps.len() < MIN_HEAPS {
            return Err(too_few_heaps(heaps.len()));
        }
        match self.k {
            Some(k) if k != heaps.len() => Err(CliError::Usage(format!(
                "--k {k} but {} heaps were given",
                heaps.len()
            ))),
            _ => Ok(()),
        }
    }

    fn bound(&self, k: usize) -> u64 {
        self.bound.unwrap_or_else(|| default_bound(k))
    }
}

/// Emits human text or one JSON record per line.
struct Output<'a> {
    w: &'a mut dyn Write,
    format: Format,
}

impl Output<'_> {
    fn line(&mut self, text: impl fmt::Display) -> CliResult {
        writeln!(self.w, "{text}")?;
        Ok(())
    }

    fn record(&mut self, value: &impl Serialize) -> CliResult {
        let s = serde_json::to_string(value).expect("wire types serialize");
        self.line(s)
    }

    fn human(&self) -> bool {
        self.format == Format::Human
    }
}

/// Human description of a move; heap numbers are 1-based.
pub fn describe_move(mv: &Move) -> String {
    match mv {
        Move::Diagonal { t } => format!("diagonal -{t}"),
        Move::Subset { amounts } => {
            let touched: Vec<(usize, u64)> = amounts
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| (i, a))
                .collect();
            match touched[..] {
                [(i, a)] => format!("take {a} from heap {}", i + 1),
                _ => format!("subtract {}", format_tuple(amounts)),
            }
        }
    }
}

fn describe_derivation(d: &Derivation) -> String {
    let case = serde_json::to_value(d.case).expect("case tag serializes");
    let mut s = format!(
        "n={} j={} L={} case={}",
        d.n,
        d.j,
        d.rest_sum,
        case.as_str().unwrap_or_default()
    );
    if let Some(m) = d.m {
        s.push_str(&format!(" m={m}"));
    }
    if let Some(t) = d.t {
        s.push_str(&format!(" t={t}"));
    }
    s
}

/// Human report for `analyze`.
pub fn format_analysis(r: &AnalyzeResponse) -> String {
    match (r.verdict, &r.winning_move, &r.result) {
        (Verdict::P, _, _) => match r.class_index {
            Some(n) => format!("P (n={n})"),
            None => "P".to_string(),
        },
        (Verdict::N, Some(mv), Some(result)) => {
            let mut s = format!("N; move: {} -> {}", describe_move(mv), format_tuple(result));
            if let Some(d) = &r.derivation {
                s.push_str("\n  ");
                s.push_str(&describe_derivation(d));
            }
            s
        }
        (Verdict::N, _, _) => "N".to_string(),
    }
}

/// Runs one command. `input` feeds `play`; everything else writes to
/// `stdout` unless `--out` names a file.
pub fn run(cli: &Cli, input: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Play { heaps, engine } => {
            cli.check_heaps(heaps)?;
            return play::run(heaps.clone(), (*engine).into(), cli.format, input, stdout);
        }
        Command::Serve {
            bind,
            port,
            ttl,
            static_dir,
        } => {
            return serve(SocketAddr::new(*bind, *port), *ttl, static_dir.clone());
        }
        _ => {}
    }
    match &cli.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            dispatch(cli, &mut file)?;
            file.flush()?;
            Ok(())
        }
        None => dispatch(cli, stdout),
    }
}

fn dispatch(cli: &Cli, w: &mut dyn Write) -> CliResult {
    let mut out = Output {
        w,
        format: cli.format,
    };
    match &cli.command {
        Command::Analyze { heaps } => analyze(cli, heaps, &mut out),
        Command::Enumerate { n, to } => enumerate(cli, *n, to.unwrap_or(*n), &mut out),
        Command::Verify {
            table,
            samples,
            seed,
        } => verify(cli, table.as_ref(), *samples, *seed, &mut out),
        Command::Density { n_max } => density(cli, *n_max, &mut out),
        Command::Grundy => grundy(cli, &mut out),
        Command::Wythoff { pairs, heaps } => wythoff(*pairs, heaps, &mut out),
        Command::Play { .. } | Command::Serve { .. } => unreachable!("handled in run"),
    }
}

fn analyze(cli: &Cli, heaps: &[u64], out: &mut Output) -> CliResult {
    cli.check_heaps(heaps)?;
    let report = AnalyzeResponse::for_heaps(heaps)?;
    if out.human() {
        out.line(format_analysis(&report))
    } else {
        out.record(&report)
    }
}

#[derive(Serialize)]
struct ClassMember<'a> {
    n: u64,
    k: usize,
    heaps: &'a [u64],
}

fn enumerate(cli: &Cli, from: u64, to: u64, out: &mut Output) -> CliResult {
    let k = cli.k()?;
    if to < from {
        return Err(CliError::Usage(format!("--to {to} is below --n {from}")));
    }
    for n in from..=to {
        let class = enumerate_p_class(n, k)?;
        for p in &class.members {
            if out.human() {
                out.line(p)?;
            } else {
                out.record(&ClassMember {
                    n,
                    k,
                    heaps: p.heaps(),
                })?;
            }
        }
    }
    Ok(())
}

fn verify(
    cli: &Cli,
    table_path: Option<&PathBuf>,
    samples: usize,
    seed: u64,
    out: &mut Output,
) -> CliResult {
    let mut table = match table_path {
        Some(path) => {
            let table = GrundyTable::read_csv(BufReader::new(File::open(path)?))?;
            if cli.k.is_some_and(|k| k != table.k()) {
                return Err(CliError::Usage(format!(
                    "table {} is for k={}",
                    path.display(),
                    table.k()
                )));
            }
            table
        }
        None => {
            let k = cli.k()?;
            let mut table = GrundyTable::with_cap(k, cli.bound(k), cli.cap)?;
            table.fill();
            table
        }
    };
    let report = exhaustive_agreement_with(&mut table)?;
    let spot = spot::spot_check(table.k(), samples, seed)?;
    let failures = report.disagreements.len() + spot.failures.len();

    if out.human() {
        for d in &report.disagreements {
            out.line(d)?;
        }
        for f in &spot.failures {
            out.line(f)?;
        }
        out.line(&report)?;
        if samples > 0 {
            out.line(&spot)?;
        }
    } else {
        out.record(&json!({
            "k": report.k,
            "bound": report.bound,
            "checked": report.checked,
            "p_positions": report.p_positions,
            "n_positions": report.n_positions,
            "p_followers_checked": report.p_followers_checked,
            "disagreements": report.disagreements.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "spot_checked": spot.checked,
            "spot_failures": spot.failures,
        }))?;
    }
    if failures > 0 {
        return Err(CliError::Verification(format!("{failures} disagreements")));
    }
    Ok(())
}

fn density(cli: &Cli, n_max: u64, out: &mut Output) -> CliResult {
    let k = cli.k()?;
    let reports = ratio_scan(k, n_max)?;
    if out.human() {
        write_density_csv(&reports, &mut *out.w)?;
        return Ok(());
    }
    for r in &reports {
        // Exact counts as strings; they outgrow JSON numbers quickly.
        out.record(&json!({
            "k": r.k,
            "N": r.n,
            "pi_exact": r.pi_exact.to_string(),
            "nu_exact": r.nu_exact.to_string(),
            "pi_lower": to_f64(&r.bounds.pi_lower),
            "pi_upper": to_f64(&r.bounds.pi_upper),
            "nu_lower": to_f64(&r.bounds.nu_lower),
            "nu_upper": to_f64(&r.bounds.nu_upper),
            "ratio": r.ratio_f64(),
        }))?;
    }
    Ok(())
}

fn grundy(cli: &Cli, out: &mut Output) -> CliResult {
    let k = cli.k()?;
    let mut table = GrundyTable::with_cap(k, cli.bound(k), cli.cap)?;
    if out.human() {
        table.write_csv(&mut *out.w)?;
        return Ok(());
    }
    table.fill();
    for heaps in canonical_positions(k, table.bound()) {
        let g = table.grundy(&Position::new(heaps.clone())?)?;
        out.record(&json!({ "heaps": heaps, "g": g }))?;
    }
    Ok(())
}

fn wythoff(pairs: Option<usize>, heaps: &[u64], out: &mut Output) -> CliResult {
    match (pairs, heaps) {
        (Some(count), []) => {
            if out.human() {
                out.line(format!("{:>4} {:>6} {:>6}", "n", "A_n", "B_n"))?;
            }
            for pair in wythoff_pairs_mex(count) {
                if out.human() {
                    out.line(format!("{:>4} {:>6} {:>6}", pair.n, pair.a, pair.b))?;
                } else {
                    out.record(&pair)?;
                }
            }
            Ok(())
        }
        (None, &[x, y]) => {
            let r = WythoffResponse::for_heaps(x, y);
            if !out.human() {
                return out.record(&r);
            }
            match r.pair_index {
                Some(n) => out.line(format!("P (n={n})")),
                None => out.line("N"),
            }
        }
        _ => Err(CliError::Usage(
            "wythoff takes --pairs N or exactly two heaps X Y".into(),
        )),
    }
}

fn serve(addr: SocketAddr, ttl: u64, static_dir: Option<PathBuf>) -> CliResult {
    let _ = tracing_subscriber::fmt().with_writer(io::stderr).try_init();
    let config = heapgame_service::Config {
        bind: addr,
        session_ttl: Duration::from_secs(ttl),
        static_dir,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(heapgame_service::serve(config))?;
    Ok(())
}
