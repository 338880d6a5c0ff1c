use std::io;
use std::process::ExitCode;

use clap::Parser;
use tabviz_server::commands::{run_parse, run_replay, run_serve, run_validate, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr());
    let result = match &cli.command {
        Command::Serve(args) => run_serve(args, &mut err).map(|_| true),
        Command::Replay(args) => run_replay(args, &mut out, &mut err),
        Command::Parse(args) => run_parse(args, &mut io::stdin().lock(), &mut out).map(|_| true),
        Command::ValidatePatterns(args) => run_validate(args, &mut out, &mut err),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
