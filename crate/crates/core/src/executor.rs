//! Executes a proof tree as a game: the environment picks values for universal
//! quantifiers, and the machine answers with witnesses for existential ones.
//! Induction nodes are executed by stitching the generic step run together for
//! the chosen bound.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::run::{compose, is_witness_key, shift, unshift, BindingKey, Run, RunError};
use crate::term::{eval_arith, Term};
use crate::tree::{NodeResult, ProofNode, ProofTree, Rule};
use crate::unify::mgu;

/// What the executor asks the environment for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceRequest {
    pub var: String,
    pub prompt: String,
    /// Only natural-number literals are acceptable.
    pub nat_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("no choice left for {0}")]
    Exhausted(String),
    #[error("invalid choice {value:?} for {var}: {reason}")]
    Invalid {
        var: String,
        value: String,
        reason: String,
    },
}

/// A provider of values for universally quantified variables.
pub trait ChoiceSource {
    fn choose(&mut self, request: &ChoiceRequest) -> Result<Term, ChoiceError>;

    /// Called for every event as it happens, before it is recorded.
    fn observe(&mut self, _event: &Event) {}
}

/// Parses a user-supplied value: a natural-number literal, or a lower-case
/// constant when `nat_only` is false.
pub fn parse_choice(text: &str, nat_only: bool) -> Result<Term, String> {
    let text = text.trim();
    if !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()) {
        return text
            .parse()
            .map(Term::Nat)
            .map_err(|_| "number is too large".to_string());
    }
    let is_constant = text.starts_with(|c: char| c.is_ascii_lowercase())
        && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    match (nat_only, is_constant) {
        (false, true) => Ok(Term::constant(text)),
        (true, _) => Err("expected a natural number".to_string()),
        (false, false) => Err("expected a natural number or a constant".to_string()),
    }
}

/// A fixed queue of answers; invalid or missing answers are errors.
#[derive(Clone, Debug, Default)]
pub struct ScriptedChoices {
    values: VecDeque<String>,
}

impl ScriptedChoices {
    pub fn new<S: ToString>(values: impl IntoIterator<Item = S>) -> ScriptedChoices {
        ScriptedChoices {
            values: values.into_iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.values.len()
    }
}

impl ChoiceSource for ScriptedChoices {
    fn choose(&mut self, request: &ChoiceRequest) -> Result<Term, ChoiceError> {
        let value = self
            .values
            .pop_front()
            .ok_or_else(|| ChoiceError::Exhausted(request.var.clone()))?;
        parse_choice(&value, request.nat_only).map_err(|reason| ChoiceError::Invalid {
            var: request.var.clone(),
            value,
            reason,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error("no branch of node {node} agrees with the choices made")]
    NoConsistentBranch { node: usize },
    #[error("{count} branches of node {node} agree with the choices made")]
    AmbiguousBranch { node: usize, count: usize },
    #[error("witness for {var} is not ground: {value}")]
    NonGroundWitness { var: String, value: String },
    #[error("induction variable {var} has no natural-number value")]
    MissingInductionBound { var: String },
    #[error("induction node {node} lacks a run for its base case or step")]
    MissingRun { node: usize },
    #[error(transparent)]
    Run(#[from] RunError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// No proof was found, so nothing was executed.
    Failed,
    Error(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Success => write!(f, "success"),
            Status::Failed => write!(f, "failed"),
            Status::Error(detail) => write!(f, "error: {detail}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    ChoiceRequested { var: String, prompt: String },
    ChoiceMade { var: String, value: Term },
    WitnessPrinted { var: String, value: Term },
    Status(Status),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::ChoiceRequested { prompt, .. } => write!(f, "{prompt}:"),
            Event::ChoiceMade { var, value } => write!(f, "{var} := {value}"),
            Event::WitnessPrinted { var, value } => write!(f, "{var} = {value}"),
            Event::Status(s) => write!(f, "{s}"),
        }
    }
}

/// Everything observable about one execution, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn status(&self) -> Option<&Status> {
        self.events.iter().rev().find_map(|e| match e {
            Event::Status(s) => Some(s),
            _ => None,
        })
    }

    /// Printed witnesses as `(variable, value)` pairs.
    pub fn witnesses(&self) -> Vec<(&str, &Term)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::WitnessPrinted { var, value } => Some((var.as_str(), value)),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// The child (as a position in `node.children`) whose unifier agrees with `f`:
/// for every variable `f` binds, the unifier's value and `f`'s value unify.
pub fn select_branch(node: &ProofNode, f: &Run, index: usize) -> Result<usize, ExecError> {
    let Rule::DefLeft { unifiers, .. } = &node.rule else {
        return Ok(0);
    };
    let agrees = |theta: &Run| {
        f.iter().all(|(key, value)| match key {
            BindingKey::Var(v) => mgu(&theta.apply(v), value).unifier().is_some(),
            BindingKey::Loc(_) => true,
        })
    };
    let consistent: Vec<usize> = (0..unifiers.len())
        .filter(|&k| agrees(&unifiers[k]))
        .collect();
    match consistent.as_slice() {
        [k] => Ok(*k),
        [] => Err(ExecError::NoConsistentBranch { node: index }),
        many => Err(ExecError::AmbiguousBranch {
            node: index,
            count: many.len(),
        }),
    }
}

/// The total run for `k` induction steps: the step run shifted to steps
/// `k-1, ..., 0`, composed with the base run, then shifted back so that the
/// last step's witnesses carry their generic names.
pub fn build_delta_total(
    psi_b: &Run,
    delta: &Run,
    j: &Term,
    k: u32,
    m: u32,
) -> Result<Run, RunError> {
    if k == 0 {
        return Ok(psi_b.clone());
    }
    let d = delta.restrict(|key| is_witness_key(key) || matches!(key, BindingKey::Loc(_)));
    let mut acc = shift(&d, j, k - 1, m);
    for i in (0..k - 1).rev() {
        acc = compose(&shift(&d, j, i, m), &acc)?;
    }
    acc = compose(psi_b, &acc)?;
    Ok(unshift(&acc, k, m))
}

/// Executes an induction goal against its total run, printing each existential
/// witness as found at its location (or, with no steps, in the base run).
pub fn exec_induction(
    sigma: &Run,
    delta_total: &Run,
    goal: &Formula,
    f: &Run,
    emit: &mut dyn FnMut(Event),
) -> Result<(), ExecError> {
    let sites = goal.existential_sites();
    let mut work = vec![(goal.clone(), Vec::<u32>::new())];
    while let Some((g, path)) = work.pop() {
        match g {
            Formula::And(a, b) => {
                let (mut left, mut right) = (path.clone(), path);
                left.push(0);
                right.push(1);
                work.push((*b, right));
                work.push((*a, left));
            }
            Formula::Exists(x, body) => {
                let site = sites.iter().position(|(p, _)| *p == path).unwrap_or(0);
                let t = delta_total
                    .get_loc(&path, None)
                    .or_else(|| delta_total.get_var(&Term::witness(site as u32)))
                    .cloned()
                    .unwrap_or_else(|| Term::var(x.clone()));
                let value = eval_arith(&f.apply(&sigma.apply(&delta_total.apply(&t))));
                if !value.is_ground() {
                    return Err(ExecError::NonGroundWitness {
                        var: x,
                        value: value.to_string(),
                    });
                }
                emit(Event::WitnessPrinted {
                    var: x.clone(),
                    value: value.clone(),
                });
                let mut inner = path;
                inner.push(0);
                work.push((body.subst(&x, &value), inner));
            }
            _ => {}
        }
    }
    Ok(())
}

struct Game<'a> {
    tree: &'a ProofTree,
    source: &'a mut dyn ChoiceSource,
    transcript: Transcript,
    f: Run,
}

impl Game<'_> {
    fn emit(&mut self, event: Event) {
        self.source.observe(&event);
        self.transcript.events.push(event);
    }

    fn play(&mut self) -> Result<(), ExecError> {
        let tree = self.tree;
        let mut stack = vec![tree.root()];
        while let Some(i) = stack.pop() {
            let node = &tree.nodes[i];
            let children: Vec<usize> = tree.children(i).collect();
            match &node.rule {
                Rule::ForallRight { bound, eigen } => {
                    let nat_only = children.first().is_some_and(|&c| {
                        matches!(&tree.nodes[c].sequent.goal,
                            Formula::NatImplies(t, _) if t == eigen)
                    });
                    let request = ChoiceRequest {
                        var: bound.clone(),
                        prompt: format!("choose {bound}"),
                        nat_only,
                    };
                    self.emit(Event::ChoiceRequested {
                        var: request.var.clone(),
                        prompt: request.prompt.clone(),
                    });
                    let value = self.source.choose(&request)?;
                    self.emit(Event::ChoiceMade {
                        var: bound.clone(),
                        value: value.clone(),
                    });
                    self.f.insert(BindingKey::Var(eigen.clone()), value)?;
                }
                Rule::DefLeft { .. } if !children.is_empty() => {
                    let k = select_branch(node, &self.f, i)?;
                    stack.push(children[k]);
                    continue;
                }
                Rule::Induction {
                    var,
                    step_var,
                    goal,
                    existentials,
                } => {
                    let k = match self.f.apply(var) {
                        Term::Nat(k) => {
                            u32::try_from(k).map_err(|_| ExecError::MissingInductionBound {
                                var: var.to_string(),
                            })?
                        }
                        _ => {
                            return Err(ExecError::MissingInductionBound {
                                var: var.to_string(),
                            })
                        }
                    };
                    let run_of = |c: Option<&usize>| match c.map(|&c| &tree.nodes[c].result) {
                        Some(NodeResult::Run(r)) => Ok(r.clone()),
                        _ => Err(ExecError::MissingRun { node: i }),
                    };
                    let psi_b = run_of(children.first())?;
                    let delta = run_of(children.get(1))?;
                    let total = build_delta_total(&psi_b, &delta, step_var, k, *existentials)?;
                    let sigma = node.sequent.sigma.clone();
                    let (goal, f) = (goal.clone(), self.f.clone());
                    let mut events = Vec::new();
                    exec_induction(&sigma, &total, &goal, &f, &mut |e| events.push(e))?;
                    for e in events {
                        self.emit(e);
                    }
                    continue;
                }
                Rule::ExistsRight { bound, witness } if node.sequent.delta.is_none() => {
                    let sigma = children
                        .first()
                        .map_or(&node.sequent.sigma, |&c| &tree.nodes[c].sequent.sigma);
                    let value = eval_arith(&self.f.apply(&sigma.apply(witness)));
                    if !value.is_ground() {
                        return Err(ExecError::NonGroundWitness {
                            var: bound.clone(),
                            value: value.to_string(),
                        });
                    }
                    self.emit(Event::WitnessPrinted {
                        var: bound.clone(),
                        value,
                    });
                }
                _ => {}
            }
            stack.extend(children.iter().rev());
        }
        Ok(())
    }
}

/// Plays the game on `tree` from its root. The transcript always ends with a status.
pub fn execute(tree: &ProofTree, source: &mut dyn ChoiceSource) -> Transcript {
    let mut game = Game {
        tree,
        source,
        transcript: Transcript::default(),
        f: Run::new(),
    };
    let status = match game.play() {
        Ok(()) => Status::Success,
        Err(e) => Status::Error(e.to_string()),
    };
    game.emit(Event::Status(status));
    game.transcript
}
