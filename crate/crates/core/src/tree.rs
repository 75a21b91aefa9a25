//! Proof trees stored bottom-up: children precede their parent, the root is the
//! last node, and each node addresses its children by distance.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::run::Run;
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    L0,
    L1,
    I0,
    I1,
}

impl Mode {
    pub fn is_induction(self) -> bool {
        matches!(self, Mode::I0 | Mode::I1)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::L0 => "l0",
            Mode::L1 => "l1",
            Mode::I0 => "i0",
            Mode::I1 => "i1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub mode: Mode,
    pub sigma: Run,
    /// Present exactly in the induction modes.
    pub delta: Option<Run>,
    pub premises: Vec<Formula>,
    pub goal: Formula,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            write!(f, "{{}}")?;
        }
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " |- {}", self.goal)
    }
}

/// The inference a node performs. Executors dispatch on this.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `true` on the right.
    TopRight,
    /// `false` among the premises.
    BotLeft,
    /// A `true` premise is dropped.
    TopLeft,
    AndLeft,
    /// An existential premise opened with a fresh variable.
    ExistsLeft {
        bound: String,
        witness: Term,
    },
    /// Case analysis on a premise atom, one child per unifier (none is a success).
    DefLeft {
        atom: Term,
        unifiers: Vec<Run>,
    },
    /// Natural-number induction on `var`; children are the base case then the step.
    Induction {
        var: Term,
        step_var: Term,
        goal: Formula,
        existentials: u32,
    },
    /// Backchaining on clause `clause` (program order).
    DefRight {
        clause: usize,
    },
    /// Built-in `nat` on the right.
    NatRight,
    /// An induction-step atom closed by the hypothesis.
    Hypothesis {
        hypothesis: Term,
    },
    AndRight,
    /// `G => D` or `nat(x) => G`: the antecedent becomes a premise.
    ImpliesRight,
    ForallRight {
        bound: String,
        eigen: Term,
    },
    ExistsRight {
        bound: String,
        witness: Term,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeResult {
    Run(Run),
    Failure,
}

impl fmt::Display for NodeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeResult::Run(r) => write!(f, "{r}"),
            NodeResult::Failure => write!(f, "Failure"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub sequent: Sequent,
    pub rule: Rule,
    pub result: NodeResult,
    /// Distances to the children, in child order.
    pub children: Vec<usize>,
    /// Short rule name shown in dumps.
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("the tree has no nodes")]
    Empty,
    #[error("node {node} has a child distance {distance} out of range")]
    OutOfRange { node: usize, distance: usize },
    #[error("node {node} is the child of more than one node")]
    SharedChild { node: usize },
    #[error("node {node} is not reachable from the root")]
    Orphan { node: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofTree {
    pub nodes: Vec<ProofNode>,
}

impl ProofTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Absolute indices of the children of node `i`.
    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[i].children.iter().map(move |d| i - d)
    }

    /// Checks index ranges, single parenthood and that the root is last.
    pub fn check(&self) -> Result<(), TreeError> {
        if self.nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut parent = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &d in &node.children {
                if d == 0 || d > i {
                    return Err(TreeError::OutOfRange {
                        node: i,
                        distance: d,
                    });
                }
                if parent[i - d].replace(i).is_some() {
                    return Err(TreeError::SharedChild { node: i - d });
                }
            }
        }
        match parent.iter().position(|p| p.is_none()) {
            Some(i) if i != self.root() => Err(TreeError::Orphan { node: i }),
            _ => Ok(()),
        }
    }

    /// One line per node, bottom-up, tab-separated: index, mode, sigma, delta,
    /// sequent, result, child distances and a rule comment.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let delta = n
                .sequent
                .delta
                .as_ref()
                .map_or("-".to_string(), Run::to_string);
            let mut distances: String = n.children.iter().map(|d| format!("{d}::")).collect();
            distances.push_str("nil");
            out.push_str(&format!(
                "{i}\t{}\t{}\t{delta}\t{}\t{}\t{distances}\t% {}\n",
                n.sequent.mode, n.sequent.sigma, n.sequent, n.result, n.label
            ));
        }
        out
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
