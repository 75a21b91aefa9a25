//! Generators, oracles and checks shared by the property suites.
#![allow(dead_code)]

use pind_core::{
    compose, eval_arith, execute, mgu, parse_goal, parse_program, parse_term, prove_with, shift,
    unshift, BindingKey, LocKey, Mode, NodeResult, ProofTree, ProveError, ProveOptions, Rule, Run,
    ScriptedChoices, Status, Term,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const CASES: u32 = 1000;

pub fn config() -> Config {
    Config {
        failure_persistence: None,
        ..Config::with_cases(CASES)
    }
}

/// A runner with a fixed seed, for reports that must not vary between runs.
pub fn deterministic_runner() -> TestRunner {
    TestRunner::new_with_rng(config(), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn var(name: &str) -> Term {
    Term::var(name)
}

pub const ALL: &[&str] = &["X", "Y", "Z", "U", "V"];

/// First-order terms over the given variables, constants, numerals and
/// successors, with no `+` or `*`.
pub fn plain_term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let constant = prop_oneof![
        prop::sample::select(&["a", "b"][..]).prop_map(Term::constant),
        (0u64..4).prop_map(Term::Nat),
    ];
    let leaf = if vars.is_empty() {
        constant.boxed()
    } else {
        prop_oneof![prop::sample::select(vars).prop_map(var), constant].boxed()
    };
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (
                prop::sample::select(&["f", "g"][..]),
                prop::collection::vec(inner, 1..3)
            )
                .prop_map(|(f, args)| Term::app(f, args)),
        ]
    })
}

/// Terms that may also use `+` and `*`.
pub fn arith_term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    plain_term(vars).prop_recursive(2, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

/// A run binding a subset of `keys`, in random order, to terms over `vars`.
pub fn run_over(
    keys: &'static [&'static str],
    vars: &'static [&'static str],
) -> impl Strategy<Value = Run> {
    (
        prop::sample::subsequence(keys, 0..=keys.len()).prop_shuffle(),
        prop::collection::vec(arith_term(vars), keys.len()),
    )
        .prop_map(|(ks, vs)| Run::from_pairs(ks.into_iter().map(var).zip(vs)).unwrap())
}

/// Two terms to unify and a third to apply the unifier to.
pub fn mgu_case() -> impl Strategy<Value = (Term, Term, Term)> {
    (plain_term(ALL), plain_term(ALL), plain_term(ALL))
}

pub fn check_mgu(a: &Term, b: &Term, t: &Term) -> Result<(), TestCaseError> {
    let Some(s) = mgu(a, b).unifier() else {
        return Ok(());
    };
    prop_assert_eq!(s.apply(a), s.apply(b));
    let once = s.apply(t);
    prop_assert_eq!(s.apply(&once), once);
    for (k, _) in s.iter() {
        let BindingKey::Var(x) = k else {
            return Err(TestCaseError::fail("unifier binds a location"));
        };
        for (_, v) in s.iter() {
            prop_assert!(!v.occurs(x), "{} occurs in {}", x, v);
        }
    }
    Ok(())
}

/// An older run, a newer run whose values avoid the older run's keys, and a term.
pub fn compose_case() -> impl Strategy<Value = (Run, Run, Term)> {
    (
        run_over(&["X", "Y", "Z"], &["U", "V", "W", "P"]),
        run_over(&["U", "V", "W"], &["P", "Q"]),
        arith_term(&["X", "Y", "Z", "U", "V", "W", "P", "Q"]),
    )
}

pub fn check_compose(older: &Run, newer: &Run, t: &Term) -> Result<(), TestCaseError> {
    let c = compose(newer, older).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(c.apply(t), newer.apply(&older.apply(t)));
    Ok(())
}

/// A generic step run: witness and location keys with values over witnesses
/// and constants, but never the step variable.
pub fn step_run(m: u32) -> impl Strategy<Value = Run> {
    let value = prop_oneof![
        (0..3 * m).prop_map(Term::witness),
        (0u64..5).prop_map(Term::Nat),
        Just(Term::constant("a")),
    ];
    let value = value.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    });
    (
        prop::sample::subsequence((0..2 * m).collect::<Vec<_>>(), 0..=(2 * m) as usize),
        prop::collection::vec(value, 3 * m as usize),
    )
        .prop_map(move |(ks, vs)| {
            let mut run = Run::new();
            let mut vs = vs.into_iter();
            for r in ks {
                let _ = run.insert(BindingKey::Var(Term::witness(r)), vs.next().unwrap());
            }
            for p in 0..m {
                let key = BindingKey::Loc(LocKey::new(vec![p], format!("y{p}")));
                run.insert(key, vs.next().unwrap()).unwrap();
            }
            run
        })
}

/// Existential count `m`, a step run and a step count `k`.
pub fn section_case() -> impl Strategy<Value = (u32, Run, u32)> {
    (1u32..4).prop_flat_map(|m| (Just(m), step_run(m), 1u32..6))
}

/// Shifting to the last of `k` steps and back restores every surviving key.
pub fn check_section(m: u32, d: &Run, k: u32) -> Result<(), TestCaseError> {
    let j = Term::eigen("j", 0);
    let back = unshift(&shift(d, &j, k - 1, m), k, m);
    let expected: Vec<_> = d
        .iter()
        .filter(|(key, _)| match key {
            BindingKey::Var(t) => t.witness_index().is_some_and(|r| r >= m),
            BindingKey::Loc(l) => l.step.is_none(),
        })
        .map(|(key, v)| (key.clone(), eval_arith(v)))
        .collect();
    let actual: Vec<_> = back.iter().cloned().collect();
    prop_assert_eq!(actual, expected);
    Ok(())
}

/// Ground arithmetic of depth at most six.
pub fn ground_arith() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0u64..50).prop_map(Term::Nat),
        (0u64..u64::MAX).prop_map(Term::Nat)
    ]
    .prop_recursive(6, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

/// Independent evaluator in 128-bit arithmetic; `None` once any subterm leaves
/// the 64-bit range.
pub fn arith_oracle(t: &Term) -> Option<u64> {
    let fit = |v: u128| u64::try_from(v).ok();
    match t {
        Term::Nat(n) => Some(*n),
        Term::Succ(a) => fit(arith_oracle(a)? as u128 + 1),
        Term::Add(a, b) => fit(arith_oracle(a)? as u128 + arith_oracle(b)? as u128),
        Term::Mul(a, b) => fit(arith_oracle(a)? as u128 * arith_oracle(b)? as u128),
        _ => None,
    }
}

fn arith_depth(t: &Term) -> usize {
    match t {
        Term::Succ(a) => 1 + arith_depth(a),
        Term::Add(a, b) | Term::Mul(a, b) => 1 + arith_depth(a).max(arith_depth(b)),
        _ => 0,
    }
}

pub fn check_eval(t: &Term) -> Result<(), TestCaseError> {
    prop_assert!(arith_depth(t) <= 6);
    match arith_oracle(t) {
        Some(v) => prop_assert_eq!(eval_arith(t), Term::Nat(v)),
        None => prop_assert!(!matches!(eval_arith(t), Term::Nat(_))),
    }
    Ok(())
}

/// Terms whose printed form reads back unchanged: `t+1` always means a
/// successor, so no sum has a right operand printed with a leading `1`.
pub fn printable_term() -> impl Strategy<Value = Term> {
    plain_term(ALL).prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_filter("sum ending in 1", |(_, b)| !starts_with_one(b))
                .prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

fn starts_with_one(t: &Term) -> bool {
    match t {
        Term::Nat(1) => true,
        Term::Mul(a, _) => starts_with_one(a),
        _ => false,
    }
}

pub fn check_print_parse(t: &Term) -> Result<(), TestCaseError> {
    let text = t.to_string();
    prop_assert_eq!(&parse_term(&text).unwrap(), t, "{}", text);
    Ok(())
}

fn arg() -> impl Strategy<Value = String> {
    prop::sample::select(&["0", "a", "X", "Y", "X+1", "Y+1", "X*Y"][..]).prop_map(String::from)
}

fn atom(preds: &'static [&'static str]) -> impl Strategy<Value = String> {
    (prop::sample::select(preds), arg(), arg()).prop_map(|(p, a, b)| format!("{p}({a},{b})"))
}

fn body() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("true".to_string()),
        atom(&["p", "q"]),
        (atom(&["p", "q"]), atom(&["p", "q"])).prop_map(|(a, b)| format!("{a} & {b}")),
        atom(&["p", "q"]).prop_map(|a| format!("exists Z. {a}")),
    ]
}

fn ground() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&["0", "1", "2", "a"][..])
}

fn predicate() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&["p", "q"][..])
}

fn ground_fact() -> impl Strategy<Value = String> {
    (predicate(), ground(), ground()).prop_map(|(p, a, b)| format!("{p}({a},{b}) := true.\n"))
}

/// Up to two ground facts followed by one to four rules over `p` and `q`.
pub fn program() -> impl Strategy<Value = String> {
    (
        prop::collection::vec(ground_fact(), 0..3),
        prop::collection::vec((atom(&["p", "q"]), body()), 1..5),
    )
        .prop_map(|(facts, clauses)| {
            let rules = clauses.into_iter().map(|(h, b)| format!("{h} := {b}.\n"));
            facts.into_iter().chain(rules).collect()
        })
}

pub fn goal() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("true".to_string()),
        (predicate(), ground(), ground()).prop_map(|(p, a, b)| format!("{p}({a},{b})")),
        (predicate(), ground()).prop_map(|(p, a)| format!("exists y. {p}({a},y)")),
        predicate().prop_map(|p| format!("forall x. nat(x) => exists y. {p}(x,y)")),
        predicate().prop_map(|p| format!("forall x. exists y. {p}(x,y)")),
    ]
}

/// Index ranges, single parenthood, root last, plus per-rule arity and mode
/// consistency.
pub fn check_well_formed(tree: &ProofTree) -> Result<(), TestCaseError> {
    prop_assert!(tree.check().is_ok(), "{:?}", tree.check());
    prop_assert_eq!(tree.nodes[tree.root()].sequent.mode, Mode::L1);
    for (i, node) in tree.nodes.iter().enumerate() {
        let s = &node.sequent;
        prop_assert_eq!(s.delta.is_some(), s.mode.is_induction(), "node {}", i);
        match &node.rule {
            Rule::Induction { .. } => {
                prop_assert_eq!(node.children.len(), 2);
                prop_assert_eq!(&node.result, &NodeResult::Failure);
                let base = i - node.children[0];
                let step = i - node.children[1];
                prop_assert!(!tree.nodes[base].sequent.mode.is_induction());
                prop_assert!(tree.nodes[step].sequent.mode.is_induction());
            }
            Rule::AndRight => prop_assert_eq!(node.children.len(), 2),
            Rule::DefLeft { unifiers, .. } => {
                prop_assert_eq!(node.children.len(), unifiers.len())
            }
            Rule::TopRight | Rule::BotLeft | Rule::Hypothesis { .. } => {
                prop_assert!(node.children.is_empty())
            }
            _ => prop_assert!(node.children.len() <= 1, "node {}", i),
        }
        prop_assert!(!node.label.is_empty());
    }
    let dump = tree.dump();
    prop_assert_eq!(dump.lines().count(), tree.len());
    for line in dump.lines() {
        prop_assert_eq!(line.split('\t').count(), 8, "{}", line);
    }
    Ok(())
}

/// Proves a generated goal; any tree must be well formed, reproducible and
/// executable.
pub fn check_corpus_case(source: &str, goal_text: &str) -> Result<(), TestCaseError> {
    let program = parse_program(source).unwrap();
    let goal = parse_goal(goal_text).unwrap();
    let options = ProveOptions { budget: 5_000 };
    match prove_with(&program, &goal, options) {
        Ok(tree) => {
            check_well_formed(&tree)?;
            let again = prove_with(&program, &goal, options).unwrap();
            prop_assert_eq!(again.dump(), tree.dump());
            let transcript = execute(&tree, &mut ScriptedChoices::new([2]));
            prop_assert!(transcript.status().is_some());
            if !goal_text.starts_with("forall") {
                prop_assert_ne!(transcript.status(), Some(&Status::Failed));
            }
            Ok(())
        }
        Err(ProveError::ProofFailure)
        | Err(ProveError::SearchLimitExceeded(_))
        | Err(ProveError::TermTooLarge) => Ok(()),
        Err(e) => Err(TestCaseError::fail(format!("unexpected error {e}"))),
    }
}

/// Step functions `y' = e(x, y)` for primitive-recursive programs, with their
/// arithmetic written in program syntax.
pub type Step = fn(u64, u64) -> u64;

pub const STEPS: &[(&str, Step)] = &[
    ("Y", |_, y| y),
    ("Y+1", |_, y| y + 1),
    ("X*Y+Y", |x, y| (x + 1) * y),
    ("Y+Y", |_, y| 2 * y),
    ("Y*2+1", |_, y| 2 * y + 1),
    ("X+Y", |x, y| x + y),
    ("Y+X+1", |x, y| y + x + 1),
    ("X*X+Y", |x, y| x * x + y),
];

pub fn recurrence_case() -> impl Strategy<Value = (u64, usize, u64)> {
    (0u64..3, 0..STEPS.len(), 0u64..9)
}

/// `r(0,b)` and `r(X+1,e) := r(X,Y)` compute the recurrence `y_k` for choice `k`.
pub fn check_recurrence(base: u64, step: usize, k: u64) -> Result<(), TestCaseError> {
    let (expr, f) = STEPS[step];
    let source = format!("r(0, {base}) := true.\nr(X+1, {expr}) := r(X, Y).\n");
    let program = parse_program(&source).unwrap();
    let goal = parse_goal("forall x. nat(x) => exists y. r(x,y)").unwrap();
    let tree = prove_with(&program, &goal, ProveOptions::default())
        .map_err(|e| TestCaseError::fail(format!("{source}: {e}")))?;
    check_well_formed(&tree)?;
    let mut expected = base;
    for x in 0..k {
        expected = f(x, expected);
    }
    let transcript = execute(&tree, &mut ScriptedChoices::new([k]));
    prop_assert_eq!(transcript.status(), Some(&Status::Success));
    let witnesses = transcript.witnesses();
    prop_assert_eq!(witnesses.len(), 1);
    prop_assert_eq!(witnesses[0].1, &Term::Nat(expected), "{}", source);
    Ok(())
}
