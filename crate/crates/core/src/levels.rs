//! Predicate levels.
//!
//! A predicate is level 1 when one of its clause bodies uses `forall`, `=>` or
//! `nat(x) =>`, or calls a level-1 predicate. Everything else is level 0.
//! Antecedents of `=>` and bodies of `nat(x) =>` may only call level-0 predicates.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::Formula;
use crate::parser::Program;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("predicate {predicate} is annotated level 0 but its definition is level 1")]
    Annotation { predicate: String },
    #[error("level-1 predicate {predicate} is called inside a level-0 position of {context}")]
    Position { predicate: String, context: String },
}

pub type Levels = BTreeMap<String, u8>;

fn predicate_of(t: &Term) -> Option<&str> {
    match t {
        Term::Compound { functor, .. } => Some(functor),
        _ => None,
    }
}

fn calls(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Atom(t) => out.extend(predicate_of(t).map(str::to_string)),
        Formula::And(a, b) | Formula::Implies(a, b) => {
            calls(a, out);
            calls(b, out);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::NatImplies(_, b) => calls(b, out),
        Formula::Top | Formula::Bot | Formula::Nat(_) => {}
    }
}

/// Level of a formula given predicate levels.
pub fn formula_level(f: &Formula, levels: &Levels) -> u8 {
    if !f.is_goal() {
        return 1;
    }
    let mut cs = Vec::new();
    calls(f, &mut cs);
    cs.iter()
        .map(|p| levels.get(p).copied().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Computes predicate levels as a least fixpoint and checks annotations and
/// level-0 positions.
pub fn check_levels(program: &Program) -> Result<Levels, LevelError> {
    let mut levels: Levels = BTreeMap::new();
    for c in &program.clauses {
        levels.entry(c.predicate().to_string()).or_insert(0);
    }
    for (p, &l) in &program.annotations {
        if l == 1 {
            levels.insert(p.clone(), 1);
        }
    }
    loop {
        let mut changed = false;
        for c in &program.clauses {
            if formula_level(&c.body, &levels) == 1 {
                let slot = levels.entry(c.predicate().to_string()).or_insert(0);
                if *slot == 0 {
                    *slot = 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (p, &l) in &program.annotations {
        if l == 0 && levels.get(p) == Some(&1) {
            return Err(LevelError::Annotation {
                predicate: p.clone(),
            });
        }
    }
    for c in &program.clauses {
        check_positions(&c.body, &levels, &c.to_string())?;
    }
    Ok(levels)
}

/// Checks that a goal only calls level-0 predicates in level-0 positions.
pub fn check_goal(goal: &Formula, levels: &Levels) -> Result<(), LevelError> {
    check_positions(goal, levels, &goal.to_string())
}

fn check_positions(f: &Formula, levels: &Levels, context: &str) -> Result<(), LevelError> {
    let level_zero = |g: &Formula| -> Result<(), LevelError> {
        let mut cs = Vec::new();
        calls(g, &mut cs);
        match cs.into_iter().find(|p| levels.get(p) == Some(&1)) {
            Some(predicate) => Err(LevelError::Position {
                predicate,
                context: context.into(),
            }),
            None => Ok(()),
        }
    };
    match f {
        Formula::Implies(a, b) => {
            level_zero(a)?;
            check_positions(b, levels, context)
        }
        Formula::NatImplies(_, b) => level_zero(b),
        Formula::And(a, b) => {
            check_positions(a, levels, context)?;
            check_positions(b, levels, context)
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => check_positions(b, levels, context),
        Formula::Top | Formula::Bot | Formula::Nat(_) | Formula::Atom(_) => Ok(()),
    }
}
