//! Core of the interpreter: terms, runs, unification, syntax, proof search and execution.

pub mod executor;
pub mod formula;
pub mod levels;
pub mod parser;
pub mod prover;
pub mod run;
pub mod term;
pub mod tree;
pub mod unify;

pub use executor::{
    build_delta_total, exec_induction, execute, parse_choice, select_branch, ChoiceError,
    ChoiceRequest, ChoiceSource, Event, ExecError, ScriptedChoices, Status, Transcript,
};
pub use formula::{Clause, Formula};
pub use levels::{check_goal, check_levels, LevelError, Levels};
pub use parser::{parse_goal, parse_program, parse_term, Program, SyntaxError};
pub use prover::{
    enumerate_definitions, prove, prove_with, ProveError, ProveOptions, DEFAULT_BUDGET,
    MAX_TERM_DEPTH, MAX_TERM_SIZE,
};
pub use run::{compose, shift, unshift, BindingKey, LocKey, Run, RunError};
pub use term::{eval_arith, Term};
pub use tree::{Mode, NodeResult, ProofNode, ProofTree, Rule, Sequent, TreeError};
pub use unify::{mgu, unify_into, UnifyOutcome};
