//! Goal formulas and definition clauses.

use std::collections::HashSet;
use std::fmt;

use crate::term::Term;

/// A goal formula. Level-0 goals (`G`) use only `Top`, `Bot`, `Nat`, `Atom`, `And`
/// and `Exists`; level-1 goals (`D`) may also use `Forall`, `Implies` and
/// `NatImplies`. A `nat(x)` antecedent always yields `NatImplies`, never `Implies`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Nat(Term),
    Atom(Term),
    And(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    NatImplies(Term, Box<Formula>),
}

impl Formula {
    pub fn atom(functor: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Term::app(functor, args))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn exists(name: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(name.into(), Box::new(body))
    }

    pub fn forall(name: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(name.into(), Box::new(body))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn nat_implies(var: Term, body: Formula) -> Formula {
        Formula::NatImplies(var, Box::new(body))
    }

    /// True when the formula belongs to the level-0 goal grammar.
    pub fn is_goal(&self) -> bool {
        match self {
            Formula::Top | Formula::Bot | Formula::Nat(_) | Formula::Atom(_) => true,
            Formula::And(a, b) => a.is_goal() && b.is_goal(),
            Formula::Exists(_, b) => b.is_goal(),
            Formula::Forall(..) | Formula::Implies(..) | Formula::NatImplies(..) => false,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::Nat(_))
    }

    /// Applies `f` to every term, leaving binders alone.
    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::Nat(t) => Formula::Nat(f(t)),
            Formula::Atom(t) => Formula::Atom(f(t)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Exists(x, b) => Formula::exists(x.clone(), b.map_terms(f)),
            Formula::Forall(x, b) => Formula::forall(x.clone(), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::NatImplies(t, b) => Formula::nat_implies(f(t), b.map_terms(f)),
        }
    }

    /// `[with/name]` for a bound or free name; occurrences under a binder of the
    /// same name are left alone.
    pub fn subst(&self, name: &str, with: &Term) -> Formula {
        let var = Term::var(name);
        let sub = |t: &Term| t.replace(&var, with);
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Nat(t) => Formula::Nat(sub(t)),
            Formula::Atom(t) => Formula::Atom(sub(t)),
            Formula::And(a, b) => Formula::and(a.subst(name, with), b.subst(name, with)),
            Formula::Exists(x, _) | Formula::Forall(x, _) if x == name => self.clone(),
            Formula::Exists(x, b) => Formula::exists(x.clone(), b.subst(name, with)),
            Formula::Forall(x, b) => Formula::forall(x.clone(), b.subst(name, with)),
            Formula::Implies(a, b) => Formula::implies(a.subst(name, with), b.subst(name, with)),
            Formula::NatImplies(t, b) => Formula::nat_implies(sub(t), b.subst(name, with)),
        }
    }

    /// Replaces a term everywhere (binders are names, so they are unaffected).
    pub fn replace(&self, var: &Term, with: &Term) -> Formula {
        self.map_terms(&|t| t.replace(var, with))
    }

    /// Renames every binder through `rename`, along with its bound occurrences.
    pub fn rename_binders(&self, rename: &mut impl FnMut(&str) -> String) -> Formula {
        match self {
            Formula::And(a, b) => Formula::and(a.rename_binders(rename), b.rename_binders(rename)),
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                let fresh = rename(x);
                let body = b.subst(x, &Term::var(fresh.clone())).rename_binders(rename);
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(fresh, body)
                } else {
                    Formula::forall(fresh, body)
                }
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_binders(rename), b.rename_binders(rename))
            }
            Formula::NatImplies(t, b) => Formula::nat_implies(t.clone(), b.rename_binders(rename)),
            _ => self.clone(),
        }
    }

    /// Binder names in preorder.
    pub fn binders(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Exists(x, _) | Formula::Forall(x, _) = f {
                out.push(x.clone());
            }
        });
        out
    }

    /// Names of free variables.
    pub fn free_vars(&self) -> HashSet<String> {
        fn term(t: &Term, bound: &[String], out: &mut HashSet<String>) {
            t.visit_vars(&mut |v| {
                if let Term::Var(n) = v {
                    if !bound.contains(n) {
                        out.insert(n.clone());
                    }
                }
            })
        }
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut HashSet<String>) {
            match f {
                Formula::Top | Formula::Bot => {}
                Formula::Nat(t) | Formula::Atom(t) => term(t, bound, out),
                Formula::And(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(x, b) | Formula::Forall(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Formula::NatImplies(t, b) => {
                    term(t, bound, out);
                    go(b, bound, out);
                }
            }
        }
        let mut out = HashSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Visits every subformula in preorder.
    pub fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Implies(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::NatImplies(_, b) => b.walk(f),
            _ => {}
        }
    }

    /// Renames binders so that no two binders share a name and no binder reuses
    /// the name of a free variable.
    pub fn uniquify_binders(&self) -> Formula {
        let mut taken = self.free_vars();
        self.rename_binders(&mut |x| {
            let mut name = x.to_string();
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            name
        })
    }

    /// Existential binders of a level-0 goal in preorder, with their positions.
    pub fn existential_sites(&self) -> Vec<(Vec<u32>, String)> {
        fn go(f: &Formula, path: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, String)>) {
            match f {
                Formula::And(a, b) => {
                    path.push(0);
                    go(a, path, out);
                    path.pop();
                    path.push(1);
                    go(b, path, out);
                    path.pop();
                }
                Formula::Exists(x, b) => {
                    out.push((path.clone(), x.clone()));
                    path.push(0);
                    go(b, path, out);
                    path.pop();
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: implication and quantifiers, 1: conjunction, 2: atomic
        let own = match self {
            Formula::Implies(..) | Formula::NatImplies(..) => 0,
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::And(..) => 1,
            _ => 2,
        };
        if own < prec {
            write!(f, "(")?;
        }
        match self {
            Formula::Top => write!(f, "true")?,
            Formula::Bot => write!(f, "false")?,
            Formula::Nat(t) => write!(f, "nat({t})")?,
            Formula::Atom(t) => write!(f, "{t}")?,
            Formula::And(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Exists(x, b) => {
                write!(f, "exists {x}. ")?;
                b.fmt_prec(f, 0)?;
            }
            Formula::Forall(x, b) => {
                write!(f, "forall {x}. ")?;
                b.fmt_prec(f, 0)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " => ")?;
                b.fmt_prec(f, 0)?;
            }
            Formula::NatImplies(t, b) => {
                write!(f, "nat({t}) => ")?;
                b.fmt_prec(f, 0)?;
            }
        }
        if own < prec {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A definition clause `head := body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Formula,
}

impl Clause {
    pub fn predicate(&self) -> &str {
        match &self.head {
            Term::Compound { functor, .. } => functor,
            _ => "",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := {}.", self.head, self.body)
    }
}
