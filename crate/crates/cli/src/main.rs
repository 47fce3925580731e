use std::io;
use std::process::ExitCode;

use clap::Parser;
use heapgame_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let mut input = io::stdin().lock();
    let mut out = io::stdout().lock();
    match run(&cli, &mut input, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heapgame: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
