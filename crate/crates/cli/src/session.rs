//! Scripted and interactive runs of a single goal: parse, check levels, prove,
//! then play the game against a choice source while streaming its events.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use pind_core::{
    check_goal, check_levels, execute, parse_choice, parse_goal, parse_program, prove_with,
    ChoiceError, ChoiceRequest, ChoiceSource, Event, Formula, LevelError, Levels, ProofTree,
    ProveError, ProveOptions, ScriptedChoices, Status, SyntaxError, Term, Transcript,
};
use thiserror::Error;

use crate::protocol::{decode_event, encode_event, from_event, ProtocolEvent};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ProofFailure = 1,
    Usage = 2,
    Execution = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The exit status a finished execution maps to.
    pub fn of(status: &Status) -> ExitStatus {
        match status {
            Status::Success => ExitStatus::Success,
            Status::Failed => ExitStatus::ProofFailure,
            Status::Error(_) => ExitStatus::Execution,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    /// Witness lines such as `Y = 120`.
    Human,
    /// JSON-lines protocol events.
    Json,
    /// The proof tree dump followed by every transcript event.
    Trace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub program_path: PathBuf,
    pub goal_text: String,
    /// Scripted answers; `None` reads them from the input stream.
    pub choices: Option<Vec<u64>>,
    pub depth_limit: usize,
    pub output_mode: OutputMode,
}

/// Anything that stops a session before execution starts.
#[derive(Debug, Error)]
pub enum SessionError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("syntax error: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("level error: {0}")]
    Level(#[from] LevelError),
    #[error("{0}")]
    Prove(#[from] ProveError),
    #[error("invalid depth limit {0:?}: expected a positive integer")]
    DepthLimit(String),
}

impl SessionError {
    /// Short machine-readable code used in `error` events.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Io { .. } => "io",
            SessionError::Syntax(_) => "syntax",
            SessionError::Level(_) => "level",
            SessionError::Prove(ProveError::ProofFailure) => "proof_failed",
            SessionError::Prove(ProveError::SearchLimitExceeded(_) | ProveError::TermTooLarge) => {
                "search_limit"
            }
            SessionError::Prove(ProveError::InductionGoal(_)) => "unsupported_goal",
            SessionError::DepthLimit(_) => "usage",
        }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            SessionError::Prove(ProveError::ProofFailure)
            | SessionError::Prove(ProveError::SearchLimitExceeded(_))
            | SessionError::Prove(ProveError::TermTooLarge) => ExitStatus::ProofFailure,
            _ => ExitStatus::Usage,
        }
    }

    /// The transcript status reported for this error.
    pub fn status(&self) -> Status {
        match self.exit_status() {
            ExitStatus::ProofFailure => Status::Failed,
            _ => Status::Error(self.to_string()),
        }
    }
}

/// The node budget: an explicit flag wins over the environment, which wins
/// over the prover default.
pub fn resolve_depth_limit(flag: Option<usize>, env: Option<&str>) -> Result<usize, SessionError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match env {
        None => Ok(pind_core::DEFAULT_BUDGET),
        Some(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(SessionError::DepthLimit(text.to_string())),
        },
    }
}

/// A parsed and level-checked program.
pub struct Loaded {
    pub program: pind_core::Program,
    pub levels: Levels,
}

pub fn load_program(path: &Path) -> Result<Loaded, SessionError> {
    let text = std::fs::read_to_string(path).map_err(|source| SessionError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let program = parse_program(&text)?;
    let levels = check_levels(&program)?;
    Ok(Loaded { program, levels })
}

pub fn prepare_goal(loaded: &Loaded, text: &str) -> Result<Formula, SessionError> {
    let goal = parse_goal(text)?;
    check_goal(&goal, &loaded.levels)?;
    Ok(goal)
}

pub fn prove_goal(
    loaded: &Loaded,
    goal: &Formula,
    budget: usize,
) -> Result<ProofTree, SessionError> {
    Ok(prove_with(&loaded.program, goal, ProveOptions { budget })?)
}

/// Where answers to choice requests come from.
pub enum Answers<'a> {
    Scripted(ScriptedChoices),
    /// Terminal prompts `choose X:`; blank or invalid lines re-prompt.
    Console(&'a mut dyn BufRead),
    /// `input_response` lines; a bad line gets an `error` event and a repeated request.
    Protocol(&'a mut dyn BufRead),
}

/// A choice source that also streams the events of the game to `out`.
pub struct SessionSource<'a> {
    pub answers: Answers<'a>,
    pub out: &'a mut dyn Write,
    pub mode: OutputMode,
    /// First write failure, reported once the game is over.
    pub write_error: Option<io::Error>,
}

impl<'a> SessionSource<'a> {
    pub fn new(answers: Answers<'a>, out: &'a mut dyn Write, mode: OutputMode) -> Self {
        SessionSource {
            answers,
            out,
            mode,
            write_error: None,
        }
    }

    fn line(&mut self, text: &str) {
        let result = writeln!(self.out, "{text}").and_then(|()| self.out.flush());
        if let Err(e) = result {
            self.write_error.get_or_insert(e);
        }
    }

    fn send(&mut self, event: &ProtocolEvent) {
        self.line(&encode_event(event));
    }

    fn is_interactive(&self) -> bool {
        !matches!(self.answers, Answers::Scripted(_))
    }
}

fn read_line(input: &mut dyn BufRead) -> Option<String> {
    let mut buf = String::new();
    match input.read_line(&mut buf) {
        Ok(0) | Err(_) => None,
        Ok(_) => Some(buf.trim_end_matches(['\n', '\r']).to_string()),
    }
}

impl ChoiceSource for SessionSource<'_> {
    fn choose(&mut self, request: &ChoiceRequest) -> Result<Term, ChoiceError> {
        let exhausted = || ChoiceError::Exhausted(request.var.clone());
        match &mut self.answers {
            Answers::Scripted(s) => s.choose(request),
            Answers::Console(_) => loop {
                let prompt = format!("{}: ", request.prompt);
                let result = write!(self.out, "{prompt}").and_then(|()| self.out.flush());
                if let Err(e) = result {
                    self.write_error.get_or_insert(e);
                }
                let Answers::Console(input) = &mut self.answers else {
                    unreachable!()
                };
                let text = read_line(*input).ok_or_else(exhausted)?;
                if text.trim().is_empty() {
                    continue;
                }
                match parse_choice(&text, request.nat_only) {
                    Ok(t) => return Ok(t),
                    Err(reason) => {
                        self.line(&format!("invalid choice {:?}: {reason}", text.trim()))
                    }
                }
            },
            Answers::Protocol(_) => loop {
                let Answers::Protocol(input) = &mut self.answers else {
                    unreachable!()
                };
                let text = read_line(*input).ok_or_else(exhausted)?;
                if text.trim().is_empty() {
                    continue;
                }
                let problem = match decode_event(&text) {
                    Ok(ProtocolEvent::InputResponse { value }) => {
                        match parse_choice(&value, request.nat_only) {
                            Ok(t) => return Ok(t),
                            Err(reason) => ("invalid_input", format!("{value:?}: {reason}")),
                        }
                    }
                    Ok(other) => (
                        "protocol",
                        format!("expected input_response, got {}", encode_event(&other)),
                    ),
                    Err(e) => ("protocol", e.to_string()),
                };
                self.send(&ProtocolEvent::Error {
                    code: problem.0.into(),
                    message: problem.1,
                });
                self.send(&ProtocolEvent::InputRequest {
                    var: request.var.clone(),
                    prompt: request.prompt.clone(),
                });
            },
        }
    }

    fn observe(&mut self, event: &Event) {
        match (self.mode, event) {
            // The session reports the final status itself.
            (_, Event::Status(_)) => {}
            (OutputMode::Json, e) => self.send(&from_event(e)),
            (OutputMode::Human, Event::WitnessPrinted { .. }) => self.line(&event.to_string()),
            (OutputMode::Human, _) => {}
            // Interactive prompts are already on screen.
            (OutputMode::Trace, Event::ChoiceRequested { .. }) if self.is_interactive() => {}
            (OutputMode::Trace, e) => self.line(&e.to_string()),
        }
    }
}

/// What a session produced.
#[derive(Debug)]
pub struct SessionReport {
    pub exit: ExitStatus,
    /// Present once execution started.
    pub transcript: Option<Transcript>,
}

/// Streams for a session: answers come from `input`, results go to `out`,
/// diagnostics to `err`.
pub struct SessionIo<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs one goal end to end.
pub fn run_script(config: &SessionConfig, io: SessionIo<'_>) -> SessionReport {
    let SessionIo { input, out, err } = io;
    let tree = load_program(&config.program_path).and_then(|loaded| {
        let goal = prepare_goal(&loaded, &config.goal_text)?;
        prove_goal(&loaded, &goal, config.depth_limit)
    });
    let tree = match tree {
        Ok(tree) => tree,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            if config.output_mode == OutputMode::Json {
                let _ = writeln!(
                    out,
                    "{}",
                    encode_event(&ProtocolEvent::Error {
                        code: e.code().into(),
                        message: e.to_string(),
                    })
                );
                let _ = writeln!(
                    out,
                    "{}",
                    encode_event(&from_event(&Event::Status(e.status())))
                );
            }
            let _ = out.flush();
            return SessionReport {
                exit: e.exit_status(),
                transcript: None,
            };
        }
    };
    match config.output_mode {
        OutputMode::Json => {
            let done = ProtocolEvent::ProofDone {
                nodes: tree.len().to_string(),
            };
            let _ = writeln!(out, "{}", encode_event(&done));
        }
        OutputMode::Trace => {
            let _ = write!(out, "{}", tree.dump());
        }
        OutputMode::Human => {}
    }
    let answers = match &config.choices {
        Some(values) => Answers::Scripted(ScriptedChoices::new(values)),
        None if config.output_mode == OutputMode::Json => Answers::Protocol(input),
        None => Answers::Console(input),
    };
    let mut source = SessionSource::new(answers, out, config.output_mode);
    let transcript = execute(&tree, &mut source);
    let status = transcript.status().cloned().unwrap_or(Status::Failed);
    let write_error = source.write_error.take();
    if let Status::Error(detail) = &status {
        let _ = writeln!(err, "execution error: {detail}");
        if config.output_mode == OutputMode::Json {
            let _ = writeln!(
                out,
                "{}",
                encode_event(&ProtocolEvent::Error {
                    code: "execution".into(),
                    message: detail.clone(),
                })
            );
        }
    }
    match config.output_mode {
        OutputMode::Json => {
            let _ = writeln!(
                out,
                "{}",
                encode_event(&from_event(&Event::Status(status.clone())))
            );
        }
        OutputMode::Trace => {
            let _ = writeln!(out, "{status}");
        }
        OutputMode::Human => {}
    }
    let _ = out.flush();
    let mut exit = ExitStatus::of(&status);
    if let Some(e) = write_error {
        let _ = writeln!(err, "cannot write output: {e}");
        exit = ExitStatus::Execution;
    }
    SessionReport {
        exit,
        transcript: Some(transcript),
    }
}
