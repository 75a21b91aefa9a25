//! The interactive loop: read goals, prove them, then play each game at the
//! terminal.

use std::io::{BufRead, Write};
use std::path::Path;

use pind_core::{execute, ProofTree, Status};

use crate::session::{
    load_program, prepare_goal, prove_goal, Answers, ExitStatus, OutputMode, SessionSource,
};

pub const PROMPT: &str = "?- ";

const HELP: &str = "enter a goal, or :tree to show the last proof tree, :help, :quit";

/// Runs the loop until `:quit` or end of input. Goal errors are reported and
/// the loop continues; only an unreadable program ends it early.
pub fn run_repl(
    path: &Path,
    depth_limit: usize,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> ExitStatus {
    let loaded = match load_program(path) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(out, "{e}");
            return ExitStatus::Usage;
        }
    };
    let mut last_tree: Option<ProofTree> = None;
    loop {
        let _ = write!(out, "{PROMPT}");
        let _ = out.flush();
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => {
                let _ = writeln!(out);
                return ExitStatus::Success;
            }
            Ok(_) => {}
        }
        let line = line.trim();
        match line {
            "" => continue,
            ":quit" | ":q" => return ExitStatus::Success,
            ":help" => {
                let _ = writeln!(out, "{HELP}");
                continue;
            }
            ":tree" => {
                let _ = match &last_tree {
                    Some(t) => write!(out, "{}", t.dump()),
                    None => writeln!(out, "no proof tree yet"),
                };
                continue;
            }
            cmd if cmd.starts_with(':') => {
                let _ = writeln!(out, "unknown command {cmd}; {HELP}");
                continue;
            }
            _ => {}
        }
        let tree = prepare_goal(&loaded, line).and_then(|g| prove_goal(&loaded, &g, depth_limit));
        let tree = match tree {
            Ok(t) => last_tree.insert(t),
            Err(e) => {
                let _ = writeln!(out, "{e}");
                continue;
            }
        };
        let mut source = SessionSource::new(Answers::Console(&mut *input), out, OutputMode::Human);
        let transcript = execute(tree, &mut source);
        let _ = match transcript.status() {
            Some(Status::Success) => writeln!(out, "yes"),
            Some(Status::Error(detail)) => writeln!(out, "execution error: {detail}"),
            Some(Status::Failed) | None => writeln!(out, "proof failed"),
        };
    }
}
