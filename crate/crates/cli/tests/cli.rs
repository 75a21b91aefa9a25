//! The `pind` binary, scripted sessions and the REPL.

use std::io::{Cursor, Write};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use pind::{run_repl, run_script, ExitStatus, OutputMode, SessionConfig, SessionIo};
use pind_core::Status;

const FACT_GOAL: &str = "forall X. nat(X) => exists Y. fact(X,Y)";

fn program(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs")).join(name)
}

fn pind(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pind"));
    cmd.args(args)
        .env_remove("PIND_DEPTH_LIMIT")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn fact_args<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let path = Box::leak(program("fact.pig").display().to_string().into_boxed_str());
    let mut args = vec!["prove", path, "--goal", FACT_GOAL];
    args.extend_from_slice(extra);
    args
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn scripted_factorial_of_five() {
    let o = pind(&fact_args(&["--choices", "5"]), "", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "Y = 120\n");
}

#[test]
fn json_stream_for_choice_three() {
    let o = pind(&fact_args(&["--choices", "3", "--json"]), "", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        concat!(
            r#"{"type":"proof_done","nodes":"10"}"#,
            "\n",
            r#"{"type":"input_request","var":"X","prompt":"choose X"}"#,
            "\n",
            r#"{"type":"input_response","value":"3"}"#,
            "\n",
            r#"{"type":"output","var":"Y","value":"6"}"#,
            "\n",
            r#"{"type":"result","status":"success"}"#,
            "\n",
        )
    );
}

#[test]
fn trace_prints_tree_then_transcript() {
    let o = pind(&fact_args(&["--choices", "3", "--trace"]), "", &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 14);
    assert!(lines[9].ends_with("% ∀-R"));
    assert_eq!(&lines[10..], ["choose X:", "X := 3", "Y = 6", "success"]);
}

#[test]
fn undefined_predicate_is_a_proof_failure() {
    let path = program("fact.pig").display().to_string();
    let o = pind(&["prove", &path, "--goal", "p(a)"], "", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("proof failed"));
    let o = pind(&["prove", &path, "--goal", "p(a)", "--json"], "", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("{\"type\":\"result\",\"status\":\"failed\"}\n"));
    assert!(stdout(&o).contains("\"code\":\"proof_failed\""));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let path = program("fact.pig").display().to_string();
    for args in [
        vec!["prove", &path, "--goal", "fact(X"],
        vec!["prove", "/nonexistent/file.pig", "--goal", "true"],
        vec!["prove", &path],
        vec!["prove", &path, "--goal", "true", "--choices", "x"],
        vec!["prove", &path, "--goal", "true", "--json", "--trace"],
        vec!["frobnicate"],
    ] {
        let o = pind(&args, "", &[]);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn missing_choice_is_an_execution_error() {
    let o = pind(&fact_args(&[]), "", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no choice left for X"));
}

#[test]
fn depth_limit_from_flag_and_environment() {
    let o = pind(
        &fact_args(&["--choices", "2"]),
        "",
        &[("PIND_DEPTH_LIMIT", "3")],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("search limit of 3 nodes"));
    let o = pind(
        &fact_args(&["--choices", "2", "--depth-limit", "50"]),
        "",
        &[("PIND_DEPTH_LIMIT", "3")],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = pind(
        &fact_args(&["--choices", "2"]),
        "",
        &[("PIND_DEPTH_LIMIT", "lots")],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn interactive_console_reprompts() {
    let o = pind(&fact_args(&[]), "\nfive\n4\n", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "choose X: choose X: invalid choice \"five\": expected a natural number\nchoose X: Y = 24\n"
    );
}

#[test]
fn interactive_protocol_answers_requests() {
    let input = concat!(
        r#"{"type":"mystery"}"#,
        "\n",
        r#"{"type":"input_response","value":"-1"}"#,
        "\n",
        r#"{"type":"input_response","value":"4"}"#,
        "\n",
    );
    let o = pind(&fact_args(&["--json"]), input, &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let types: Vec<String> = out
        .lines()
        .map(|l| pind::decode_event(l).unwrap())
        .map(|e| format!("{e:?}").split(' ').next().unwrap().to_string())
        .collect();
    assert_eq!(
        types,
        [
            "ProofDone",
            "InputRequest",
            "Error",
            "InputRequest",
            "Error",
            "InputRequest",
            "InputResponse",
            "Output",
            "Result"
        ]
    );
    assert!(out.contains(r#""value":"24""#));
}

#[test]
fn plus_program_adds_two() {
    let path = program("plus.pig").display().to_string();
    let goal = "forall x. nat(x) => exists y. plus(x,2,y)";
    let o = pind(&["prove", &path, "--goal", goal, "--choices", "7"], "", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "y = 9\n");
}

#[test]
fn repeated_runs_are_byte_identical() {
    for extra in [
        &["--choices", "6"][..],
        &["--choices", "6", "--json"],
        &["--choices", "6", "--trace"],
    ] {
        let first = pind(&fact_args(extra), "", &[]);
        let second = pind(&fact_args(extra), "", &[]);
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.status.code(), second.status.code());
    }
}

fn session(
    goal: &str,
    choices: Option<Vec<u64>>,
    mode: OutputMode,
    input: &str,
) -> (ExitStatus, String, String) {
    let config = SessionConfig {
        program_path: program("fact.pig"),
        goal_text: goal.into(),
        choices,
        depth_limit: 1000,
        output_mode: mode,
    };
    let mut input = Cursor::new(input.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let report = run_script(
        &config,
        SessionIo {
            input: &mut input,
            out: &mut out,
            err: &mut err,
        },
    );
    if let Some(t) = &report.transcript {
        assert_eq!(ExitStatus::of(t.status().unwrap()), report.exit);
    }
    (
        report.exit,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn in_process_session() {
    let (exit, out, err) = session(FACT_GOAL, Some(vec![5]), OutputMode::Human, "");
    assert_eq!(
        (exit, out.as_str(), err.as_str()),
        (ExitStatus::Success, "Y = 120\n", "")
    );
    let (exit, out, _) = session("exists y. fact(4,y)", None, OutputMode::Human, "");
    assert_eq!((exit, out.as_str()), (ExitStatus::Success, "y = 24\n"));
    let (exit, _, err) = session("forall X. fact(X,1)", Some(vec![0]), OutputMode::Human, "");
    assert_eq!(exit, ExitStatus::ProofFailure, "{err}");
}

#[test]
fn exit_status_is_a_function_of_status() {
    assert_eq!(ExitStatus::of(&Status::Success).code(), 0);
    assert_eq!(ExitStatus::of(&Status::Failed).code(), 1);
    assert_eq!(ExitStatus::of(&Status::Error("x".into())).code(), 3);
    assert_eq!(ExitStatus::Usage.code(), 2);
}

fn repl(input: &str) -> (ExitStatus, String) {
    let mut input = Cursor::new(input.as_bytes().to_vec());
    let mut out = Vec::new();
    let exit = run_repl(&program("fact.pig"), 1000, &mut input, &mut out);
    (exit, String::from_utf8(out).unwrap())
}

#[test]
fn repl_plays_the_factorial_game() {
    let (exit, out) = repl(&format!("{FACT_GOAL}\n5\n:quit\n"));
    assert_eq!(exit, ExitStatus::Success);
    assert_eq!(out, "?- choose X: Y = 120\nyes\n?- ");
}

#[test]
fn repl_tree_dumps_last_proof() {
    let (_, out) = repl(&format!(":tree\n{FACT_GOAL}\n3\n:tree\n"));
    assert!(out.starts_with("?- no proof tree yet\n"));
    let after = out.split("yes\n?- ").nth(1).unwrap();
    let dump: Vec<&str> = after.lines().take_while(|l| !l.starts_with("?-")).collect();
    assert_eq!(dump.len(), 10);
    let program = pind_core::parse_program(include_str!("../../../programs/fact.pig")).unwrap();
    let tree = pind_core::prove(&program, &pind_core::parse_goal(FACT_GOAL).unwrap()).unwrap();
    assert_eq!(format!("{}\n", dump.join("\n")), tree.dump());
}

#[test]
fn repl_blank_lines_and_errors_keep_the_session() {
    let (exit, out) = repl("\n\nfact(X\n:what\nfact(0,1)\n");
    assert_eq!(exit, ExitStatus::Success);
    let prompts = out.matches("?- ").count();
    assert_eq!(prompts, 6);
    assert!(out.contains("syntax error"));
    assert!(out.contains("unknown command :what"));
    assert!(out.contains("yes\n"));
}

#[test]
fn repl_with_missing_program() {
    let mut input = Cursor::new(Vec::new());
    let mut out = Vec::new();
    let exit = run_repl(&PathBuf::from("/nonexistent.pig"), 10, &mut input, &mut out);
    assert_eq!(exit, ExitStatus::Usage);
}
