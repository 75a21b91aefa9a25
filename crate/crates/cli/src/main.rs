use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pind::{
    resolve_depth_limit, run_repl, run_script, ExitStatus, OutputMode, SessionConfig, SessionIo,
};

/// Proves goals against a logic program, then plays them out: you choose values
/// for universal variables and the interpreter prints existential witnesses.
#[derive(Parser)]
#[command(name = "pind", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Proves one goal and executes its proof.
    Prove {
        /// Program file.
        file: PathBuf,
        /// Goal to prove, e.g. "forall X. nat(X) => exists Y. fact(X,Y)".
        #[arg(long)]
        goal: String,
        /// Answers to the universal choices, in order; without it they are read
        /// from standard input.
        #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
        choices: Option<Vec<u64>>,
        /// Emit JSON-lines protocol events.
        #[arg(long, conflicts_with = "trace")]
        json: bool,
        /// Print the proof tree and every execution event.
        #[arg(long)]
        trace: bool,
        /// Maximum number of proof-search nodes (overrides PIND_DEPTH_LIMIT).
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(usize))]
        depth_limit: Option<usize>,
    },
    /// Loads a program and answers goals interactively.
    Repl {
        /// Program file.
        file: PathBuf,
        /// Maximum number of proof-search nodes (overrides PIND_DEPTH_LIMIT).
        #[arg(long, value_name = "N")]
        depth_limit: Option<usize>,
    },
}

fn depth_limit(flag: Option<usize>, err: &mut dyn Write) -> Result<usize, ExitStatus> {
    let env = std::env::var("PIND_DEPTH_LIMIT").ok();
    resolve_depth_limit(flag, env.as_deref()).map_err(|e| {
        let _ = writeln!(err, "{e}");
        ExitStatus::Usage
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let status = match cli.command {
        Command::Prove {
            file,
            goal,
            choices,
            json,
            trace,
            depth_limit: flag,
        } => match depth_limit(flag, &mut err) {
            Err(status) => status,
            Ok(limit) => {
                let output_mode = match (json, trace) {
                    (true, _) => OutputMode::Json,
                    (_, true) => OutputMode::Trace,
                    _ => OutputMode::Human,
                };
                let config = SessionConfig {
                    program_path: file,
                    goal_text: goal,
                    choices,
                    depth_limit: limit,
                    output_mode,
                };
                let io = SessionIo {
                    input: &mut input as &mut dyn BufRead,
                    out: &mut out,
                    err: &mut err,
                };
                run_script(&config, io).exit
            }
        },
        Command::Repl {
            file,
            depth_limit: flag,
        } => match depth_limit(flag, &mut err) {
            Err(status) => status,
            Ok(limit) => run_repl(&file, limit, &mut input, &mut out),
        },
    };
    ExitCode::from(status.code() as u8)
}
