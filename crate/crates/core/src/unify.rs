//! Syntactic unification with occurs check, modulo ground arithmetic folding.

use crate::run::{BindingKey, Run};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyOutcome {
    Unifier(Run),
    NoUnifier,
}

impl UnifyOutcome {
    pub fn unifier(self) -> Option<Run> {
        match self {
            UnifyOutcome::Unifier(run) => Some(run),
            UnifyOutcome::NoUnifier => None,
        }
    }
}

/// Most general unifier of two terms. The returned run is idempotent.
///
/// When both sides are variables the left one is bound.
pub fn mgu(t1: &Term, t2: &Term) -> UnifyOutcome {
    let mut run = Run::new();
    if unify_into(&mut run, t1, t2, &|_| false) {
        UnifyOutcome::Unifier(run.solved())
    } else {
        UnifyOutcome::NoUnifier
    }
}

/// Extends `store` so that `a` and `b` become equal. Variables for which `rigid`
/// holds are never bound. On failure the store is left as it was.
pub fn unify_into(store: &mut Run, a: &Term, b: &Term, rigid: &dyn Fn(&Term) -> bool) -> bool {
    let mark = store.len();
    if unify_step(store, a, b, rigid) {
        true
    } else {
        store.truncate(mark);
        false
    }
}

fn bind(store: &mut Run, var: &Term, value: &Term) -> bool {
    if value.occurs(var) {
        return false;
    }
    store.push(BindingKey::Var(var.clone()), value.clone());
    true
}

fn unify_step(store: &mut Run, a: &Term, b: &Term, rigid: &dyn Fn(&Term) -> bool) -> bool {
    let a = store.apply(a);
    let b = store.apply(b);
    if a == b {
        return true;
    }
    let flexible = |t: &Term| t.is_var() && !rigid(t);
    if flexible(&a) {
        return bind(store, &a, &b);
    }
    if flexible(&b) {
        return bind(store, &b, &a);
    }
    match (&a, &b) {
        (Term::Nat(n), Term::Succ(x)) | (Term::Succ(x), Term::Nat(n)) => {
            *n > 0 && unify_step(store, &Term::Nat(n - 1), x, rigid)
        }
        (Term::Succ(x), Term::Succ(y)) => unify_step(store, x, y, rigid),
        (Term::Add(x1, x2), Term::Add(y1, y2)) | (Term::Mul(x1, x2), Term::Mul(y1, y2)) => {
            unify_step(store, x1, y1, rigid) && unify_step(store, x2, y2, rigid)
        }
        (
            Term::Compound {
                functor: f,
                args: xs,
            },
            Term::Compound {
                functor: g,
                args: ys,
            },
        ) => {
            f == g
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| unify_step(store, x, y, rigid))
        }
        _ => false,
    }
}
