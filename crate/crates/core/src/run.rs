//! Runs: ordered answer substitutions, and the shift algebra used to stitch
//! induction steps together.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{eval_arith, Term, WITNESS_FAMILY};

/// The syntactic position of an existential quantifier inside an induction goal.
///
/// `path` lists child positions from the goal's root (`0`/`1` below a conjunction,
/// `0` below a quantifier). `step` is set once the location has been shifted to a
/// concrete induction step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocKey {
    pub path: Vec<u32>,
    pub name: String,
    pub step: Option<u32>,
}

impl LocKey {
    pub fn new(path: Vec<u32>, name: impl Into<String>) -> LocKey {
        LocKey {
            path,
            name: name.into(),
            step: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BindingKey {
    Var(Term),
    Loc(LocKey),
}

impl BindingKey {
    pub fn as_var(&self) -> Option<&Term> {
        match self {
            BindingKey::Var(t) => Some(t),
            BindingKey::Loc(_) => None,
        }
    }
}

impl From<Term> for BindingKey {
    fn from(t: Term) -> Self {
        BindingKey::Var(t)
    }
}

impl fmt::Display for BindingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingKey::Var(t) => write!(f, "{t}"),
            BindingKey::Loc(l) => {
                write!(f, "loc({})", l.name)?;
                if let Some(step) = l.step {
                    write!(f, "@{step}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("key {0} is already bound")]
    DuplicateKey(String),
    #[error("binding {key} to {value} would make the run cyclic")]
    Cyclic { key: String, value: String },
    #[error("composition conflict on {key}: {older} versus {newer}")]
    CompositionConflict {
        key: String,
        older: String,
        newer: String,
    },
}

/// An answer substitution. Bindings are kept in composition order, oldest first,
/// and values may mention keys bound elsewhere in the run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Run {
    entries: Vec<(BindingKey, Term)>,
    index: HashMap<BindingKey, usize>,
}

impl Run {
    pub fn new() -> Run {
        Run::default()
    }

    pub fn from_pairs<K: Into<BindingKey>>(
        pairs: impl IntoIterator<Item = (K, Term)>,
    ) -> Result<Run, RunError> {
        let mut run = Run::new();
        for (k, v) in pairs {
            run.insert(k.into(), v)?;
        }
        Ok(run)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(BindingKey, Term)> {
        self.entries.iter()
    }

    pub fn contains(&self, key: &BindingKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn get(&self, key: &BindingKey) -> Option<&Term> {
        self.index.get(key).map(|&i| &self.entries[i].1)
    }

    pub fn get_var(&self, var: &Term) -> Option<&Term> {
        self.get(&BindingKey::Var(var.clone()))
    }

    /// First location binding at `path` with the given step, whatever its display name.
    pub fn get_loc(&self, path: &[u32], step: Option<u32>) -> Option<&Term> {
        self.entries.iter().find_map(|(k, v)| match k {
            BindingKey::Loc(l) if l.path == path && l.step == step => Some(v),
            _ => None,
        })
    }

    /// Adds a binding, rejecting duplicate keys and cycles.
    pub fn insert(&mut self, key: BindingKey, value: Term) -> Result<(), RunError> {
        if self.contains(&key) {
            return Err(RunError::DuplicateKey(key.to_string()));
        }
        if let BindingKey::Var(v) = &key {
            if self.resolve(&value).occurs(v) {
                return Err(RunError::Cyclic {
                    key: key.to_string(),
                    value: value.to_string(),
                });
            }
        }
        self.push(key, value);
        Ok(())
    }

    /// Adds a binding the caller has already occurs-checked.
    pub(crate) fn push(&mut self, key: BindingKey, value: Term) {
        debug_assert!(!self.contains(&key));
        self.index.insert(key.clone(), self.entries.len());
        self.entries.push((key, value));
    }

    /// Drops every binding added after the first `len`.
    pub fn truncate(&mut self, len: usize) {
        for (k, _) in self.entries.drain(len.min(self.entries.len())..) {
            self.index.remove(&k);
        }
    }

    /// Substitutes bindings to a fixpoint, without arithmetic normalization.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_where(t, &|_| true)
    }

    /// Like [`Run::resolve`] but only follows variables accepted by `follow`.
    pub fn resolve_where(&self, t: &Term, follow: &dyn Fn(&Term) -> bool) -> Term {
        if self.is_empty() {
            return t.clone();
        }
        t.map_vars(&|v| {
            if !follow(v) {
                return None;
            }
            self.get_var(v)
                .map(|value| self.resolve_where(value, follow))
        })
    }

    /// Eager application: resolve, then fold ground arithmetic.
    pub fn apply(&self, t: &Term) -> Term {
        eval_arith(&self.resolve(t))
    }

    /// The applied value stored under `key`, if any.
    pub fn apply_key(&self, key: &BindingKey) -> Option<Term> {
        self.get(key).map(|v| self.apply(v))
    }

    /// The same run with every value fully applied.
    pub fn solved(&self) -> Run {
        let mut out = Run::new();
        for (k, v) in &self.entries {
            out.push(k.clone(), self.apply(v));
        }
        out
    }

    /// Keeps the bindings whose key satisfies `keep`; values are untouched.
    pub fn restrict(&self, keep: impl Fn(&BindingKey) -> bool) -> Run {
        let mut out = Run::new();
        for (k, v) in self.entries.iter().filter(|(k, _)| keep(k)) {
            out.push(k.clone(), v.clone());
        }
        out
    }

    /// Set union of two runs; a key bound in both must carry the same value.
    pub fn union(&self, other: &Run) -> Result<Run, RunError> {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            match out.get(k) {
                Some(existing) if existing == v => {}
                Some(existing) => {
                    return Err(RunError::CompositionConflict {
                        key: k.to_string(),
                        older: existing.to_string(),
                        newer: v.to_string(),
                    })
                }
                None => out.push(k.clone(), v.clone()),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({k},{})", v.factored())?;
        }
        write!(f, "}}")
    }
}

/// Composes two runs so that applying the result equals applying `older` and then
/// `newer`. The values of `newer` must not mention keys of `older`, which holds for
/// every composition the prover and executor perform.
pub fn compose(newer: &Run, older: &Run) -> Result<Run, RunError> {
    let mut out = Run::new();
    for (k, v) in &older.entries {
        let value = newer.apply(v);
        if k.as_var() == Some(&value) {
            continue;
        }
        out.push(k.clone(), value);
    }
    for (k, v) in &newer.entries {
        if let Some(older_value) = older.get(k) {
            let (a, b) = (newer.apply(older_value), newer.apply(v));
            if a != b {
                return Err(RunError::CompositionConflict {
                    key: k.to_string(),
                    older: a.to_string(),
                    newer: b.to_string(),
                });
            }
            continue;
        }
        if k.as_var() == Some(v) {
            continue;
        }
        out.push(k.clone(), v.clone());
    }
    Ok(out)
}

fn offset_witness(t: &Term, by: i64) -> Term {
    t.map_vars(&|v| {
        let r = v.witness_index()? as i64 + by;
        (r >= 0).then(|| Term::witness(r as u32))
    })
}

/// Instantiates a generic induction-step run as step `i`: `w_r` becomes
/// `w_{r+i*m}`, the step eigenvariable becomes the literal `i`, and locations are
/// tagged with the step.
pub fn shift(delta: &Run, step_var: &Term, i: u32, m: u32) -> Run {
    let by = i as i64 * m as i64;
    let literal = Term::Nat(i as u64);
    let mut out = Run::new();
    for (k, v) in &delta.entries {
        let key = match k {
            BindingKey::Var(t) if t == step_var => continue,
            BindingKey::Var(t) => BindingKey::Var(offset_witness(t, by)),
            BindingKey::Loc(l) => BindingKey::Loc(LocKey {
                step: Some(i),
                ..l.clone()
            }),
        };
        let value = eval_arith(&offset_witness(v, by).replace(step_var, &literal));
        out.push(key, value);
    }
    out
}

/// Undoes the shift of the last of `k` steps. Only the final step's conclusion
/// survives: witnesses landing at index `m` or above, and locations tagged `k-1`
/// (returned untagged). Everything else is deleted.
pub fn unshift(run: &Run, k: u32, m: u32) -> Run {
    assert!(k > 0, "unshift needs at least one induction step");
    let offset = (k as i64 - 1) * m as i64;
    let mut out = Run::new();
    for (key, v) in &run.entries {
        let key = match key {
            BindingKey::Var(t) => match t.witness_index() {
                Some(r) if r as i64 - offset >= m as i64 => {
                    BindingKey::Var(Term::witness((r as i64 - offset) as u32))
                }
                _ => continue,
            },
            BindingKey::Loc(l) if l.step == Some(k - 1) => BindingKey::Loc(LocKey {
                step: None,
                ..l.clone()
            }),
            BindingKey::Loc(_) => continue,
        };
        out.push(key, offset_witness(v, -offset));
    }
    out
}

/// True for keys of the form `w_r`.
pub fn is_witness_key(k: &BindingKey) -> bool {
    matches!(k, BindingKey::Var(Term::Indexed { family, .. }) if family == WITNESS_FAMILY)
}
