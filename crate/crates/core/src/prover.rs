//! Proof search in four modes: `l1` proves a goal from no premises, `l0` proves a
//! goal from level-0 premises, and `i0`/`i1` prove an induction step from its
//! hypothesis.
//!
//! Search is depth first with chronological backtracking over clause choice.
//! Case analysis branches and the two halves of an induction are proved as
//! isolated sub-searches: each commits to its first proof, and variables of the
//! enclosing search are frozen while it runs.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{Clause, Formula};
use crate::parser::Program;
use crate::run::{BindingKey, LocKey, Run};
use crate::term::{Term, FORALL_FAMILY, FRESH_FAMILY, STEP_FAMILY};
use crate::tree::{Mode, NodeResult, ProofNode, ProofTree, Rule, Sequent};
use crate::unify::{mgu, unify_into};

pub const DEFAULT_BUDGET: usize = 100_000;

/// Deepest term a binding may resolve to. Deeper terms only arise from runaway
/// search and would exhaust the stack in the recursive term routines.
pub const MAX_TERM_DEPTH: usize = 256;
/// Largest term, in nodes, a binding may resolve to.
pub const MAX_TERM_SIZE: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("proof failed")]
    ProofFailure,
    #[error("search limit of {0} nodes exceeded")]
    SearchLimitExceeded(usize),
    #[error(
        "search built a term deeper than {MAX_TERM_DEPTH} or larger than {MAX_TERM_SIZE} nodes"
    )]
    TermTooLarge,
    #[error(
        "induction goal {0} mentions true, false or nat, which an induction step cannot prove"
    )]
    InductionGoal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProveOptions {
    /// Maximum number of nodes created, counting those discarded by backtracking.
    pub budget: usize,
}

impl Default for ProveOptions {
    fn default() -> Self {
        ProveOptions {
            budget: DEFAULT_BUDGET,
        }
    }
}

pub fn prove(program: &Program, goal: &Formula) -> Result<ProofTree, ProveError> {
    prove_with(program, goal, ProveOptions::default())
}

pub fn prove_with(
    program: &Program,
    goal: &Formula,
    options: ProveOptions,
) -> Result<ProofTree, ProveError> {
    let mut prover = Prover::new(program, options.budget);
    let task = Task {
        parent: None,
        mode: Mode::L1,
        premises: Vec::new(),
        goal: goal.clone(),
        sigma: View::default(),
        delta: None,
        plan: Rc::default(),
        label: None,
        switch: false,
    };
    if !prover.run(Agenda::one(task))? {
        return Err(ProveError::ProofFailure);
    }
    Ok(ProofTree {
        nodes: prover.finalize(0),
    })
}

/// Unifiers of `atom` (under `sigma`) against each clause head, in program order,
/// paired with the clause body. Clauses are renamed apart first.
pub fn enumerate_definitions(atom: &Term, sigma: &Run, program: &Program) -> Vec<(Run, Formula)> {
    let atom = sigma.apply(atom);
    program
        .clauses
        .iter()
        .enumerate()
        .filter_map(|(n, clause)| {
            let clause = rename_apart(clause, n as u32);
            let theta = mgu(&atom, &clause.head).unifier()?;
            Some((theta, clause.body))
        })
        .collect()
}

/// Variables introduced by clause renaming carry a `#` and are hidden in dumps.
fn is_hidden(t: &Term) -> bool {
    matches!(t, Term::Var(name) if name.contains('#'))
}

fn rename_apart(clause: &Clause, serial: u32) -> Clause {
    let rename = |t: &Term| {
        t.map_vars(&|v| match v {
            Term::Var(name) => Some(Term::var(format!("{name}#{serial}"))),
            _ => None,
        })
    };
    let body = clause
        .body
        .rename_binders(&mut |x| format!("{x}#{serial}"))
        .map_terms(&rename);
    Clause {
        head: rename(&clause.head),
        body,
    }
}

fn nat_clauses() -> Vec<Clause> {
    let n = Term::var("N");
    vec![
        Clause {
            head: Term::app("nat", vec![Term::Nat(0)]),
            body: Formula::Top,
        },
        Clause {
            head: Term::app("nat", vec![Term::succ(n.clone())]),
            body: Formula::Nat(n),
        },
    ]
}

/// Free term variables of a formula, leaving out bound names.
fn formula_vars(f: &Formula) -> Vec<Term> {
    let bound: HashSet<String> = f.binders().into_iter().collect();
    let mut out: Vec<Term> = Vec::new();
    f.walk(&mut |g| {
        let t = match g {
            Formula::Atom(t) | Formula::Nat(t) | Formula::NatImplies(t, _) => t,
            _ => return,
        };
        for v in t.vars() {
            let is_bound = matches!(&v, Term::Var(name) if bound.contains(name));
            if !is_bound && !out.contains(&v) {
                out.push(v);
            }
        }
    });
    out
}

/// Next name after `name` (by bumping its last letter) that is not in `taken`.
fn bump_name(name: &str, taken: &HashSet<String>) -> String {
    if let Some(last) = name.chars().last().filter(char::is_ascii_alphabetic) {
        let stem = &name[..name.len() - 1];
        let base = if last.is_ascii_lowercase() {
            b'a'
        } else {
            b'A'
        };
        for k in 1..26u8 {
            let c = (base + (last as u8 - base + k) % 26) as char;
            let candidate = format!("{stem}{c}");
            if !taken.contains(&candidate) {
                return candidate;
            }
        }
    }
    let mut candidate = format!("{name}'");
    while taken.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Bindings shown on a node, as keys paired with terms resolved at the end.
/// A persistent list of `(key, raw value)` entries, newest first, so that tasks
/// share the entries of their ancestors.
#[derive(Clone, Debug, Default)]
struct View(Option<Rc<ViewCell>>);

#[derive(Debug)]
struct ViewCell {
    key: BindingKey,
    value: Term,
    next: View,
}

impl View {
    fn iter(&self) -> impl Iterator<Item = (&BindingKey, &Term)> {
        std::iter::successors(self.0.as_deref(), |c| c.next.0.as_deref())
            .map(|c| (&c.key, &c.value))
    }

    /// Entries oldest first.
    fn entries(&self) -> Vec<(&BindingKey, &Term)> {
        let mut out: Vec<_> = self.iter().collect();
        out.reverse();
        out
    }
}

impl Drop for View {
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(cell) = next {
            next = match Rc::try_unwrap(cell) {
                Ok(mut cell) => cell.next.0.take(),
                Err(_) => None,
            };
        }
    }
}

/// Adds an entry. A repeated key is kept but shadowed by the older entry when
/// the view is resolved.
fn extend(view: &View, key: BindingKey, value: Term) -> View {
    View(Some(Rc::new(ViewCell {
        key,
        value,
        next: view.clone(),
    })))
}

/// How an existential binder of an induction goal is witnessed.
#[derive(Clone, Debug)]
enum Planned {
    Base(Term),
    Hypothesis(Term),
    Conclusion(Term, LocKey),
}

#[derive(Clone, Debug)]
struct Task {
    parent: Option<usize>,
    mode: Mode,
    premises: Vec<Formula>,
    goal: Formula,
    sigma: View,
    delta: Option<View>,
    plan: Rc<HashMap<String, Planned>>,
    label: Option<&'static str>,
    /// An `i0` sequent whose premises are all atomic: the node applies an `i1`
    /// rule but is recorded in `i0`.
    switch: bool,
}

impl Task {
    fn child(&self, parent: usize, mode: Mode, premises: Vec<Formula>, goal: Formula) -> Task {
        Task {
            parent: Some(parent),
            mode,
            premises,
            goal,
            sigma: self.sigma.clone(),
            delta: self.delta.clone(),
            plan: self.plan.clone(),
            label: None,
            switch: false,
        }
    }

    fn recorded_mode(&self) -> Mode {
        if self.switch {
            Mode::I0
        } else {
            self.mode
        }
    }
}

/// Pending tasks as a persistent stack, so choice points can share tails.
#[derive(Clone, Default)]
struct Agenda(Option<Rc<(Task, Agenda)>>);

impl Agenda {
    fn one(task: Task) -> Agenda {
        Agenda::default().push(task)
    }

    fn push(&self, task: Task) -> Agenda {
        Agenda(Some(Rc::new((task, self.clone()))))
    }
}

impl Drop for Agenda {
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(cell) = next {
            next = match Rc::try_unwrap(cell) {
                Ok((_, mut rest)) => rest.0.take(),
                Err(_) => None,
            };
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Counters {
    forall: u32,
    step: u32,
    fresh: u32,
    rename: u32,
}

#[derive(Clone, Copy, Debug)]
struct Marks {
    store: usize,
    arena: usize,
    rigid: usize,
    counters: Counters,
}

#[derive(Clone, Debug)]
enum Alt {
    Hypothesis(Term),
    Clause(usize),
}

struct ChoicePoint {
    task: Task,
    alts: Rc<Vec<Alt>>,
    next: usize,
    rest: Agenda,
    marks: Marks,
}

struct Draft {
    parent: Option<usize>,
    mode: Mode,
    premises: Vec<Formula>,
    goal: Formula,
    sigma: View,
    delta: Option<View>,
    rule: Rule,
    label: String,
    /// Finished subtrees of isolated sub-searches, in child order.
    attached: Vec<Vec<ProofNode>>,
}

struct Prover<'p> {
    program: &'p Program,
    nat: Vec<Clause>,
    store: Run,
    rigid: HashSet<Term>,
    rigid_log: Vec<Term>,
    arena: Vec<Draft>,
    choices: Vec<ChoicePoint>,
    counters: Counters,
    created: usize,
    budget: usize,
    too_large: bool,
}

type Step = Result<Option<Agenda>, ProveError>;

impl<'p> Prover<'p> {
    fn new(program: &'p Program, budget: usize) -> Prover<'p> {
        Prover {
            program,
            nat: nat_clauses(),
            store: Run::new(),
            rigid: HashSet::new(),
            rigid_log: Vec::new(),
            arena: Vec::new(),
            choices: Vec::new(),
            counters: Counters::default(),
            created: 0,
            budget,
            too_large: false,
        }
    }

    fn marks(&self) -> Marks {
        Marks {
            store: self.store.len(),
            arena: self.arena.len(),
            rigid: self.rigid_log.len(),
            counters: self.counters,
        }
    }

    fn restore(&mut self, marks: Marks) {
        self.store.truncate(marks.store);
        self.arena.truncate(marks.arena);
        for t in self.rigid_log.drain(marks.rigid..) {
            self.rigid.remove(&t);
        }
        self.counters = marks.counters;
    }

    fn make_rigid(&mut self, t: Term) {
        if self.rigid.insert(t.clone()) {
            self.rigid_log.push(t);
        }
    }

    fn is_rigid(&self, t: &Term) -> bool {
        matches!(t, Term::Eigen { .. }) || self.rigid.contains(t)
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.store.len();
        let rigid = &self.rigid;
        let ok = unify_into(&mut self.store, a, b, &|t| {
            matches!(t, Term::Eigen { .. }) || rigid.contains(t)
        });
        self.note_size(mark);
        ok
    }

    /// Flags the search when a binding made since `mark` resolves to a term
    /// that is too deep or too large.
    fn note_size(&mut self, mark: usize) {
        let store = &self.store;
        self.too_large |= store.iter().skip(mark).any(|(_, v)| {
            let t = store.resolve(v);
            t.depth() > MAX_TERM_DEPTH || t.size() > MAX_TERM_SIZE
        });
    }

    fn fresh(&mut self) -> Term {
        self.counters.fresh += 1;
        Term::indexed(FRESH_FAMILY, self.counters.fresh - 1)
    }

    fn renamed(&mut self, clause: &Clause) -> Clause {
        self.counters.rename += 1;
        rename_apart(clause, self.counters.rename - 1)
    }

    /// Visible keys bound since `mark`, as view entries.
    fn bound_since(&self, mark: usize) -> Vec<BindingKey> {
        self.store
            .iter()
            .skip(mark)
            .filter(|(k, _)| !k.as_var().is_some_and(is_hidden))
            .map(|(k, _)| k.clone())
            .collect()
    }

    fn node(&mut self, task: &Task, rule: Rule, label: &str) -> Result<usize, ProveError> {
        self.created += 1;
        if self.created > self.budget {
            return Err(ProveError::SearchLimitExceeded(self.budget));
        }
        if self.too_large {
            return Err(ProveError::TermTooLarge);
        }
        self.arena.push(Draft {
            parent: task.parent,
            mode: task.recorded_mode(),
            premises: task.premises.clone(),
            goal: task.goal.clone(),
            sigma: task.sigma.clone(),
            delta: task.delta.clone(),
            rule,
            label: task.label.unwrap_or(label).to_string(),
            attached: Vec::new(),
        });
        Ok(self.arena.len() - 1)
    }

    /// Proves the agenda, backtracking only into choice points created here.
    fn run(&mut self, mut agenda: Agenda) -> Result<bool, ProveError> {
        let base = self.choices.len();
        loop {
            let Some(cell) = agenda.0.clone() else {
                self.choices.truncate(base);
                return Ok(true);
            };
            let (task, rest) = (cell.0.clone(), cell.1.clone());
            agenda = match self.expand(task, rest)? {
                Some(next) => next,
                None => match self.backtrack(base)? {
                    Some(next) => next,
                    None => return Ok(false),
                },
            };
        }
    }

    fn backtrack(&mut self, base: usize) -> Step {
        while self.choices.len() > base {
            let cp = self.choices.pop().expect("nonempty");
            self.restore(cp.marks);
            if let Some(next) = self.try_alts(cp.task, cp.alts, cp.next, cp.rest)? {
                return Ok(Some(next));
            }
        }
        Ok(None)
    }

    fn try_alts(&mut self, task: Task, alts: Rc<Vec<Alt>>, start: usize, rest: Agenda) -> Step {
        let marks = self.marks();
        for i in start..alts.len() {
            if let Some(next) = self.try_alt(&task, &alts[i], &rest)? {
                if i + 1 < alts.len() {
                    self.choices.push(ChoicePoint {
                        task,
                        alts,
                        next: i + 1,
                        rest,
                        marks,
                    });
                }
                return Ok(Some(next));
            }
            self.restore(marks);
        }
        Ok(None)
    }

    fn try_alt(&mut self, task: &Task, alt: &Alt, rest: &Agenda) -> Step {
        let Formula::Atom(goal) = &task.goal else {
            unreachable!("alternatives are for atoms")
        };
        let mark = self.store.len();
        match alt {
            Alt::Hypothesis(h) => {
                if !self.unify(goal, h) {
                    return Ok(None);
                }
                let task = self.with_bindings(task, mark);
                self.node(
                    &task,
                    Rule::Hypothesis {
                        hypothesis: h.clone(),
                    },
                    "success",
                )?;
                Ok(Some(rest.clone()))
            }
            Alt::Clause(idx) => {
                let program = self.program;
                let clause = self.renamed(&program.clauses[*idx]);
                if !self.unify(&clause.head, goal) {
                    return Ok(None);
                }
                let task = self.with_bindings(task, mark);
                let id = self.node(&task, Rule::DefRight { clause: *idx }, "defR")?;
                let child_mode = if task.mode == Mode::I1 {
                    Mode::I1
                } else {
                    Mode::L1
                };
                let child = task.child(id, child_mode, task.premises.clone(), clause.body);
                Ok(Some(rest.push(child)))
            }
        }
    }

    /// The task with visible bindings made since `mark` added to its view.
    fn with_bindings(&self, task: &Task, mark: usize) -> Task {
        let mut task = task.clone();
        for key in self.bound_since(mark) {
            let value = key.as_var().cloned().expect("store keys are variables");
            match &mut task.delta {
                Some(delta) => *delta = extend(delta, key, value),
                None => task.sigma = extend(&task.sigma, key, value),
            }
        }
        task
    }

    fn expand(&mut self, task: Task, rest: Agenda) -> Step {
        match task.mode {
            Mode::L0 => self.expand_left(task, rest),
            Mode::I0 => self.expand_hypotheses(task, rest),
            Mode::L1 | Mode::I1 => self.expand_right(task, rest),
        }
    }

    fn expand_right(&mut self, task: Task, rest: Agenda) -> Step {
        let same = task.mode;
        match task.goal.clone() {
            Formula::Top => {
                self.node(&task, Rule::TopRight, "success")?;
                Ok(Some(rest))
            }
            Formula::Bot => Ok(None),
            Formula::Nat(t) => {
                let next = match self.store.apply(&t) {
                    Term::Nat(0) => None,
                    Term::Nat(n) => Some(Term::Nat(n - 1)),
                    Term::Succ(x) => Some(*x),
                    _ => return Ok(None),
                };
                let id = self.node(&task, Rule::NatRight, "nat-R")?;
                Ok(Some(match next {
                    None => rest,
                    Some(x) => {
                        rest.push(task.child(id, same, task.premises.clone(), Formula::Nat(x)))
                    }
                }))
            }
            Formula::Atom(a) => {
                let mut alts = Vec::new();
                if same == Mode::I1 {
                    for p in &task.premises {
                        if let Formula::Atom(h) = p {
                            alts.push(Alt::Hypothesis(h.clone()));
                        }
                    }
                }
                let predicate = match &a {
                    Term::Compound { functor, .. } => functor.as_str(),
                    _ => "",
                };
                for (i, c) in self.program.clauses.iter().enumerate() {
                    if c.predicate() == predicate {
                        alts.push(Alt::Clause(i));
                    }
                }
                self.try_alts(task, Rc::new(alts), 0, rest)
            }
            Formula::And(a, b) => {
                let id = self.node(&task, Rule::AndRight, "∧-R")?;
                let left = task.child(id, same, task.premises.clone(), *a);
                let right = task.child(id, same, task.premises.clone(), *b);
                Ok(Some(rest.push(right).push(left)))
            }
            Formula::Implies(g, d) => {
                let id = self.node(&task, Rule::ImpliesRight, "⊃-R")?;
                Ok(Some(rest.push(task.child(id, Mode::L0, vec![*g], *d))))
            }
            Formula::NatImplies(t, g) => {
                let id = self.node(&task, Rule::ImpliesRight, "⊃-R")?;
                Ok(Some(rest.push(task.child(
                    id,
                    Mode::L0,
                    vec![Formula::Nat(t)],
                    *g,
                ))))
            }
            Formula::Forall(x, d) => {
                let eigen = Term::eigen(FORALL_FAMILY, self.counters.forall);
                self.counters.forall += 1;
                let rule = Rule::ForallRight {
                    bound: x.clone(),
                    eigen: eigen.clone(),
                };
                let id = self.node(&task, rule, "∀-R")?;
                Ok(Some(rest.push(task.child(
                    id,
                    same,
                    Vec::new(),
                    d.subst(&x, &eigen),
                ))))
            }
            Formula::Exists(x, d) => {
                let planned = task.plan.get(&x).cloned();
                let witness = match &planned {
                    Some(Planned::Base(w) | Planned::Conclusion(w, _)) => w.clone(),
                    _ => self.fresh(),
                };
                let rule = Rule::ExistsRight {
                    bound: x.clone(),
                    witness: witness.clone(),
                };
                let label = if task.switch { "∃-L" } else { "∃-R" };
                let id = self.node(&task, rule, label)?;
                let next_mode = if same == Mode::L1 { Mode::L1 } else { Mode::I1 };
                let mut child =
                    task.child(id, next_mode, task.premises.clone(), d.subst(&x, &witness));
                let own = BindingKey::Var(witness.clone());
                match (&mut child.delta, planned) {
                    (Some(delta), Some(Planned::Conclusion(w, loc))) => {
                        *delta = extend(delta, BindingKey::Loc(loc), w.clone());
                        *delta = extend(delta, own, w);
                    }
                    (Some(delta), _) => *delta = extend(delta, own, witness),
                    (None, _) => child.sigma = extend(&child.sigma, own, witness),
                }
                Ok(Some(rest.push(child)))
            }
        }
    }

    fn expand_left(&mut self, task: Task, rest: Agenda) -> Step {
        if task.premises.is_empty() {
            return self.expand_right(
                Task {
                    mode: Mode::L1,
                    ..task
                },
                rest,
            );
        }
        if task.premises.contains(&Formula::Bot) {
            self.node(&task, Rule::BotLeft, "⊥-L")?;
            return Ok(Some(rest));
        }
        let without = |i: usize| {
            let mut ps = task.premises.clone();
            ps.remove(i);
            ps
        };
        let nonatomic = task
            .premises
            .iter()
            .position(|p| matches!(p, Formula::Top | Formula::And(..) | Formula::Exists(..)));
        if let Some(i) = nonatomic {
            let mut ps = without(i);
            let (rule, label, front) = match task.premises[i].clone() {
                Formula::Top => (Rule::TopLeft, "⊤-L", vec![]),
                Formula::And(a, b) => (Rule::AndLeft, "∧-L", vec![*a, *b]),
                Formula::Exists(x, g) => {
                    let y = self.fresh();
                    self.make_rigid(y.clone());
                    let front = vec![g.subst(&x, &y)];
                    (
                        Rule::ExistsLeft {
                            bound: x,
                            witness: y,
                        },
                        "∃-L",
                        front,
                    )
                }
                _ => unreachable!(),
            };
            let id = self.node(&task, rule, label)?;
            ps.splice(0..0, front);
            return Ok(Some(rest.push(task.child(
                id,
                Mode::L0,
                ps,
                task.goal.clone(),
            ))));
        }
        if let Some(i) = task
            .premises
            .iter()
            .position(|p| matches!(p, Formula::Atom(_)))
        {
            let Formula::Atom(a) = &task.premises[i] else {
                unreachable!()
            };
            let predicate = match a {
                Term::Compound { functor, .. } => functor.clone(),
                _ => String::new(),
            };
            let clauses: Vec<Clause> = self.program.clauses_for(&predicate).cloned().collect();
            return self.def_left(&task, i, a.clone(), &clauses, rest);
        }
        if let Some(i) = task
            .premises
            .iter()
            .position(|p| matches!(p, Formula::Nat(_)))
        {
            let Formula::Nat(t) = &task.premises[i] else {
                unreachable!()
            };
            let n = self.store.apply(t);
            if n.is_var() && self.is_rigid(&n) {
                return self.induction(&task, n, rest);
            }
            let clauses = self.nat.clone();
            return self.def_left(&task, i, Term::app("nat", vec![t.clone()]), &clauses, rest);
        }
        Ok(None)
    }

    /// Case analysis on premise `i`: every clause whose head unifies gives a branch,
    /// and each branch must be proved.
    fn def_left(
        &mut self,
        task: &Task,
        i: usize,
        atom: Term,
        clauses: &[Clause],
        rest: Agenda,
    ) -> Step {
        let mut others = task.premises.clone();
        others.remove(i);
        let mut unifiers = Vec::new();
        let mut subtrees = Vec::new();
        for clause in clauses {
            let clause = self.renamed(clause);
            let mark = self.store.len();
            if !unify_into(&mut self.store, &clause.head, &atom, &|_| false) {
                continue;
            }
            self.note_size(mark);
            let mut theta = Run::new();
            let mut sigma = task.sigma.clone();
            for key in self.bound_since(mark) {
                let value = self.store.get(&key).expect("just bound").clone();
                theta.push(key.clone(), self.store.resolve(&value));
                let var = key.as_var().expect("store keys are variables").clone();
                sigma = extend(&sigma, key, var);
            }
            let mut premises = vec![clause.body];
            premises.extend(others.iter().cloned());
            let branch = Task {
                parent: None,
                mode: Mode::L0,
                premises,
                goal: task.goal.clone(),
                sigma,
                delta: None,
                plan: task.plan.clone(),
                label: None,
                switch: false,
            };
            let subtree = self.isolated(branch)?;
            self.store.truncate(mark);
            match subtree {
                Some(nodes) => {
                    unifiers.push(theta);
                    subtrees.push(nodes);
                }
                None => return Ok(None),
            }
        }
        let rule = Rule::DefLeft {
            atom: self.store.resolve(&atom),
            unifiers,
        };
        let id = self.node(task, rule, "defL")?;
        self.arena[id].attached = subtrees;
        Ok(Some(rest))
    }

    fn induction(&mut self, task: &Task, n: Term, rest: Agenda) -> Step {
        let goal = &task.goal;
        if !goal.is_goal() {
            return Ok(None);
        }
        let mut unsupported = false;
        goal.walk(&mut |f| {
            unsupported |= matches!(f, Formula::Top | Formula::Bot | Formula::Nat(_))
        });
        if unsupported {
            return Err(ProveError::InductionGoal(self.show(goal).to_string()));
        }
        let sites = goal.existential_sites();
        let m = sites.len() as u32;

        let base_plan: HashMap<String, Planned> = sites
            .iter()
            .enumerate()
            .map(|(p, (_, x))| (x.clone(), Planned::Base(Term::witness(p as u32))))
            .collect();
        let base = Task {
            parent: None,
            mode: Mode::L1,
            premises: Vec::new(),
            goal: goal.clone(),
            sigma: extend(&task.sigma, BindingKey::Var(n.clone()), n.clone()),
            delta: None,
            plan: Rc::new(base_plan),
            label: Some("nat-0"),
            switch: false,
        };
        let mark = self.store.len();
        self.store.push(BindingKey::Var(n.clone()), Term::Nat(0));
        let base_tree = self.isolated(base)?;
        self.store.truncate(mark);
        let Some(base_tree) = base_tree else {
            return Ok(None);
        };

        let j = Term::eigen(STEP_FAMILY, self.counters.step);
        self.counters.step += 1;
        let mut taken: HashSet<String> = goal.free_vars();
        taken.extend(goal.binders());
        let conclusion = goal
            .replace(&n, &Term::succ(n.clone()))
            .rename_binders(&mut |x| {
                let fresh = bump_name(x, &taken);
                taken.insert(fresh.clone());
                fresh
            });
        let mut plan: HashMap<String, Planned> = HashMap::new();
        for (p, (_, x)) in sites.iter().enumerate() {
            plan.insert(x.clone(), Planned::Hypothesis(Term::witness(p as u32)));
        }
        for (p, (path, x)) in conclusion.existential_sites().into_iter().enumerate() {
            let w = Term::witness(m + p as u32);
            plan.insert(x.clone(), Planned::Conclusion(w, LocKey::new(path, x)));
        }
        let step = Task {
            parent: None,
            mode: Mode::I0,
            premises: vec![goal.clone()],
            goal: conclusion,
            sigma: extend(&task.sigma, BindingKey::Var(n.clone()), j.clone()),
            delta: Some(View::default()),
            plan: Rc::new(plan),
            label: None,
            switch: false,
        };
        let Some(step_tree) = self.isolated(step)? else {
            return Ok(None);
        };

        let rule = Rule::Induction {
            var: n,
            step_var: j,
            goal: self.show(goal),
            existentials: m,
        };
        let id = self.node(task, rule, "defL")?;
        self.arena[id].attached = vec![base_tree, step_tree];
        Ok(Some(rest))
    }

    fn expand_hypotheses(&mut self, task: Task, rest: Agenda) -> Step {
        let Some(i) = task.premises.iter().position(|p| !p.is_atomic()) else {
            return self.expand_right(
                Task {
                    mode: Mode::I1,
                    switch: true,
                    ..task
                },
                rest,
            );
        };
        let mut ps = task.premises.clone();
        ps.remove(i);
        let mut delta = task.delta.clone().unwrap_or_default();
        let (rule, label, front) = match task.premises[i].clone() {
            Formula::Top => (Rule::TopLeft, "⊤-L", vec![]),
            Formula::Bot => {
                self.node(&task, Rule::BotLeft, "⊥-L")?;
                return Ok(Some(rest));
            }
            Formula::And(a, b) => (Rule::AndLeft, "∧-L", vec![*a, *b]),
            Formula::Exists(x, g) => {
                let witness = match task.plan.get(&x) {
                    Some(Planned::Hypothesis(w)) => {
                        delta = extend(&delta, BindingKey::Var(Term::var(x.clone())), w.clone());
                        w.clone()
                    }
                    _ => self.fresh(),
                };
                self.make_rigid(witness.clone());
                let front = vec![g.subst(&x, &witness)];
                (Rule::ExistsLeft { bound: x, witness }, "∃-L", front)
            }
            _ => return Ok(None),
        };
        let id = self.node(&task, rule, label)?;
        ps.splice(0..0, front);
        let mut child = task.child(id, Mode::I0, ps, task.goal.clone());
        child.delta = Some(delta);
        Ok(Some(rest.push(child)))
    }

    /// Proves `task` on its own and returns its finished subtree. Bindings made
    /// inside are discarded afterwards; variables already free are frozen.
    fn isolated(&mut self, task: Task) -> Result<Option<Vec<ProofNode>>, ProveError> {
        stacker::maybe_grow(256 * 1024, 16 * 1024 * 1024, || self.isolated_inner(task))
    }

    fn isolated_inner(&mut self, task: Task) -> Result<Option<Vec<ProofNode>>, ProveError> {
        let marks = self.marks();
        let mut outer = Vec::new();
        for f in task.premises.iter().chain(std::iter::once(&task.goal)) {
            outer.extend(formula_vars(&f.map_terms(&|t| self.store.apply(t))));
        }
        for v in outer {
            if !self.is_rigid(&v) {
                self.make_rigid(v);
            }
        }
        let start = self.arena.len();
        if !self.run(Agenda::one(task))? {
            self.restore(marks);
            return Ok(None);
        }
        let nodes = self.finalize(start);
        let counters = self.counters;
        self.restore(marks);
        self.counters = counters;
        Ok(Some(nodes))
    }

    /// Formula with clause-renaming variables resolved, for display.
    fn show(&self, f: &Formula) -> Formula {
        f.map_terms(&|t| self.store.resolve_where(t, &is_hidden))
    }

    fn resolve_view(&self, view: &View, through: &Run) -> Run {
        let mut out = Run::new();
        for (k, raw) in view.entries() {
            let v = through.apply(&self.store.apply(raw));
            if k.as_var() == Some(&v) || out.contains(k) {
                continue;
            }
            // The oldest entry for a key wins; a cyclic entry is dropped from display.
            let _ = out.insert(k.clone(), v);
        }
        out
    }

    /// Turns the arena from `start` on into a bottom-up node list.
    fn finalize(&self, start: usize) -> Vec<ProofNode> {
        let len = self.arena.len() - start;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); len];
        let mut roots = Vec::new();
        for (i, d) in self.arena[start..].iter().enumerate() {
            match d.parent {
                Some(p) if p >= start => children[p - start].push(i),
                _ => roots.push(i),
            }
        }
        debug_assert_eq!(roots.len(), 1, "a search has exactly one root");
        let mut out: Vec<ProofNode> = Vec::new();
        let mut position = vec![0usize; len];
        let mut stack = vec![(roots[0], false)];
        while let Some((i, expanded)) = stack.pop() {
            if !expanded {
                stack.push((i, true));
                stack.extend(children[i].iter().rev().map(|&c| (c, false)));
                continue;
            }
            let draft = &self.arena[start + i];
            let mut child_positions = Vec::new();
            for subtree in &draft.attached {
                out.extend(subtree.iter().cloned());
                child_positions.push(out.len() - 1);
            }
            child_positions.extend(children[i].iter().map(|&c| position[c]));
            let node = self.finish(draft, &out, &child_positions);
            position[i] = out.len();
            out.push(node);
        }
        out
    }

    fn finish(&self, draft: &Draft, done: &[ProofNode], child_positions: &[usize]) -> ProofNode {
        let index = done.len();
        let sigma = self.resolve_view(&draft.sigma, &Run::new());
        let delta = draft.delta.as_ref().map(|d| self.resolve_view(d, &sigma));
        let child_results: Vec<&NodeResult> =
            child_positions.iter().map(|&c| &done[c].result).collect();
        let own = || NodeResult::Run(delta.clone().unwrap_or_else(|| sigma.clone()));
        let result = if matches!(draft.rule, Rule::Induction { .. })
            || child_results.contains(&&NodeResult::Failure)
        {
            NodeResult::Failure
        } else if child_results.is_empty() {
            own()
        } else {
            match draft.rule {
                Rule::AndRight => {
                    let runs = child_results.iter().map(|r| match r {
                        NodeResult::Run(run) => run.clone(),
                        NodeResult::Failure => unreachable!(),
                    });
                    NodeResult::Run(
                        runs.reduce(|a, b| a.union(&b).unwrap_or(a))
                            .unwrap_or_default(),
                    )
                }
                Rule::DefLeft { .. } if child_results.len() > 1 => own(),
                _ => child_results[0].clone(),
            }
        };
        ProofNode {
            sequent: Sequent {
                mode: draft.mode,
                sigma,
                delta,
                premises: draft.premises.iter().map(|p| self.show(p)).collect(),
                goal: self.show(&draft.goal),
            },
            rule: draft.rule.clone(),
            result,
            children: child_positions.iter().map(|&c| index - c).collect(),
            label: draft.label.clone(),
        }
    }
}
