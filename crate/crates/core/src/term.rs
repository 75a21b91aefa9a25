//! First-order terms with natural-number arithmetic.

use std::fmt;

/// Family used for the indexed existential witnesses of an induction.
pub const WITNESS_FAMILY: &str = "w";
/// Family of eigenvariables introduced by `forall` on the right.
pub const FORALL_FAMILY: &str = "h";
/// Family of the induction-step eigenvariable.
pub const STEP_FAMILY: &str = "j";
/// Family of other prover-fresh variables.
pub const FRESH_FAMILY: &str = "y";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Nat(u64),
    Var(String),
    Indexed { family: String, index: u32 },
    Eigen { family: String, serial: u32 },
    Succ(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn indexed(family: impl Into<String>, index: u32) -> Term {
        Term::Indexed {
            family: family.into(),
            index,
        }
    }

    /// The witness variable `w_index`.
    pub fn witness(index: u32) -> Term {
        Term::indexed(WITNESS_FAMILY, index)
    }

    pub fn eigen(family: impl Into<String>, serial: u32) -> Term {
        Term::Eigen {
            family: family.into(),
            serial,
        }
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: Term, r: Term) -> Term {
        Term::Mul(Box::new(l), Box::new(r))
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(
            self,
            Term::Var(_) | Term::Indexed { .. } | Term::Eigen { .. }
        )
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Term::Nat(n) => Some(*n),
            _ => None,
        }
    }

    /// Index of a `w_r` witness variable.
    pub fn witness_index(&self) -> Option<u32> {
        match self {
            Term::Indexed { family, index } if family == WITNESS_FAMILY => Some(*index),
            _ => None,
        }
    }

    /// Nesting depth; constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Succ(a) => 1 + a.depth(),
            Term::Add(a, b) | Term::Mul(a, b) => 1 + a.depth().max(b.depth()),
            Term::Compound { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Succ(a) => 1 + a.size(),
            Term::Add(a, b) | Term::Mul(a, b) => 1 + a.size() + b.size(),
            Term::Compound { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit_vars(&mut |_| ground = false);
        ground
    }

    pub fn occurs(&self, var: &Term) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v == var);
        found
    }

    /// Calls `f` on every variable occurrence, left to right.
    pub fn visit_vars(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Term::Var(_) | Term::Indexed { .. } | Term::Eigen { .. } => f(self),
            Term::Nat(_) => {}
            Term::Succ(a) => a.visit_vars(f),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Term::Compound { args, .. } => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    pub fn vars(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.push(v.clone())
            }
        });
        out
    }

    /// Replaces variables for which `f` answers `Some`. The replacement is not revisited.
    pub fn map_vars(&self, f: &impl Fn(&Term) -> Option<Term>) -> Term {
        match self {
            Term::Var(_) | Term::Indexed { .. } | Term::Eigen { .. } => {
                f(self).unwrap_or_else(|| self.clone())
            }
            Term::Nat(_) => self.clone(),
            Term::Succ(a) => Term::succ(a.map_vars(f)),
            Term::Add(a, b) => Term::add(a.map_vars(f), b.map_vars(f)),
            Term::Mul(a, b) => Term::mul(a.map_vars(f), b.map_vars(f)),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| a.map_vars(f)).collect(),
            },
        }
    }

    pub fn replace(&self, var: &Term, with: &Term) -> Term {
        self.map_vars(&|v| (v == var).then(|| with.clone()))
    }

    /// Display form with `a*b+b` folded to `(a+1)*b`. Only used for rendering.
    pub fn factored(&self) -> Term {
        match self {
            Term::Succ(a) => Term::succ(a.factored()),
            Term::Add(a, b) => {
                let (a, b) = (a.factored(), b.factored());
                match a {
                    Term::Mul(x, y) if *y == b => Term::mul(Term::succ(*x), b),
                    a => Term::add(a, b),
                }
            }
            Term::Mul(a, b) => Term::mul(a.factored(), b.factored()),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(Term::factored).collect(),
            },
            _ => self.clone(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: sum, 1: product, 2: atomic
        let (own, body): (u8, Body<'_>) = match self {
            Term::Succ(a) => (
                0,
                Box::new(move |f| {
                    a.fmt_prec(f, 0)?;
                    write!(f, "+1")
                }),
            ),
            Term::Add(a, b) => (
                0,
                Box::new(move |f| {
                    a.fmt_prec(f, 0)?;
                    write!(f, "+")?;
                    b.fmt_prec(f, 1)
                }),
            ),
            Term::Mul(a, b) => (
                1,
                Box::new(move |f| {
                    a.fmt_prec(f, 1)?;
                    write!(f, "*")?;
                    b.fmt_prec(f, 2)
                }),
            ),
            _ => return self.fmt_atomic(f),
        };
        if own < prec {
            write!(f, "(")?;
            body(f)?;
            write!(f, ")")
        } else {
            body(f)
        }
    }

    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Nat(n) => write!(f, "{n}"),
            Term::Var(name) => write!(f, "{name}"),
            Term::Indexed { family, index } => write!(f, "{family}_{index}"),
            Term::Eigen { family, serial } if family == STEP_FAMILY && *serial == 0 => {
                write!(f, "{family}")
            }
            Term::Eigen { family, serial } => write!(f, "{family}_{serial}"),
            Term::Compound { functor, args } => {
                write!(f, "{functor}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        a.fmt_prec(f, 0)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            _ => unreachable!("arithmetic handled by fmt_prec"),
        }
    }
}

/// Deferred printing of an operator node's operands.
type Body<'a> = Box<dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result + 'a>;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Folds ground arithmetic subterms to literals. Non-ground structure is kept as is,
/// and so is any operation whose result would not fit in a `u64`.
pub fn eval_arith(t: &Term) -> Term {
    match t {
        Term::Succ(a) => match eval_arith(a) {
            Term::Nat(n) if n < u64::MAX => Term::Nat(n + 1),
            a => Term::succ(a),
        },
        Term::Add(a, b) => match (eval_arith(a), eval_arith(b)) {
            (Term::Nat(x), Term::Nat(y)) if x.checked_add(y).is_some() => Term::Nat(x + y),
            (a, b) => Term::add(a, b),
        },
        Term::Mul(a, b) => match (eval_arith(a), eval_arith(b)) {
            (Term::Nat(x), Term::Nat(y)) if x.checked_mul(y).is_some() => Term::Nat(x * y),
            (a, b) => Term::mul(a, b),
        },
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(eval_arith).collect(),
        },
        _ => t.clone(),
    }
}
