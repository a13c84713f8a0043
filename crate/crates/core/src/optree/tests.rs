use proptest::prelude::*;

use super::*;
use crate::syntax::{parse, typecheck, Type};

fn p(s: &str) -> Term {
    parse(s).unwrap()
}

fn inf(s: &str, fuel: u64) -> Outcome {
    eval_op(&p(s), &Model::Infinite, &OracleTable::with_builtins(), fuel).outcome
}

fn fin(s: &str, n: u32, fuel: u64) -> EvalReport {
    eval_op(&p(s), &Model::Finite(FinModel::new(n)), &OracleTable::with_builtins(), fuel)
}

const ADD: &str = "fix add:0 -> 0 -> 0. \\a:0. \\b:0. case b a (suc (add a (pred b)))";

#[test]
fn base_steps() {
    assert_eq!(inf("case 0 (suc 0) 0", 100), Outcome::Value(1));
    assert_eq!(inf("pred 0", 100), Outcome::Value(0));
    assert_eq!(inf("pred (suc (suc 0))", 100), Outcome::Value(1));
    assert_eq!(inf("case (suc 0) 5 7", 100), Outcome::Value(7));
}

#[test]
fn beta_has_one_child() {
    let t = build_tree(&p("(\\x:0. suc x) 0"), &Model::Infinite, &OracleTable::with_builtins(), Limits::fuel(100));
    assert_eq!(t.outcome, Outcome::Value(1));
    let root = t.root().unwrap();
    assert_eq!(root.kind, NodeKind::BetaStep);
    assert_eq!(root.children.len(), 1);
    assert_eq!(t.nodes[root.children[0]].kind, NodeKind::BaseStep);
}

#[test]
fn divergence_uses_all_fuel() {
    assert_eq!(inf("fix x:0. x", 100), Outcome::NoValueWithinFuel(100));
    let r = fin("fix x:0. x", 1, 100);
    assert_eq!(r.steps, 100);
}

#[test]
fn addition_by_recursion() {
    for a in 0..4 {
        for b in 0..4 {
            let s = format!("({ADD}) {a} {b}");
            assert_eq!(inf(&s, 10_000), Outcome::Value(a + b));
        }
    }
}

#[test]
fn mu_finds_least_zero() {
    // zero exactly from 3 on
    let s = "#mu (\\n:0. case n 1 (case (pred n) 1 (case (pred (pred n)) 1 0)))";
    assert_eq!(inf(s, 10_000), Outcome::Value(3));
    assert_eq!(fin(s, 3, 10_000).outcome, Outcome::Value(3));
}

#[test]
fn exists2_root_is_oracle_with_queries() {
    let t = build_tree(
        &p("#exists2 (\\n:0. case n 1 0)"),
        &Model::Infinite,
        &OracleTable::with_builtins(),
        Limits::fuel(1000),
    );
    assert_eq!(t.outcome, Outcome::Value(0));
    let root = t.root().unwrap();
    assert_eq!(root.kind, NodeKind::OracleApp);
    assert_eq!(root.notes.oracle.as_deref(), Some("exists2"));
    assert_eq!(root.notes.queries.len(), 2);
    assert_eq!(root.children.len(), 2);
}

#[test]
fn infinite_search_without_witness_is_approximate() {
    let mut o = OracleTable::with_builtins();
    o.set_config("exists2", "searchBound", "5").unwrap();
    let r = eval_op(&p("#exists2 (\\n:0. 1)"), &Model::Infinite, &o, 10_000);
    assert_eq!(r.outcome, Outcome::Value(1));
    assert!(r.approximate);
    assert_eq!(r.oracle_queries, 6);
}

#[test]
fn blocked_query_blocks_application() {
    let r = inf("#exists2 (\\n:0. case n (fix x:0. x) 0)", 500);
    assert_eq!(r, Outcome::NoValueWithinFuel(500));
}

#[test]
fn truncation_marker() {
    let t = build_tree(
        &p("(\\x:0. suc x) 0"),
        &Model::Infinite,
        &OracleTable::with_builtins(),
        Limits { fuel: 100, max_nodes: 1, max_depth: usize::MAX },
    );
    assert!(t.truncated);
    assert_eq!(t.outcome, Outcome::Value(1));
    assert_eq!(t.nodes.len(), 2);
    assert_eq!(t.nodes[1].kind, NodeKind::Truncated);
    assert_eq!(t.nodes[0].children, vec![1]);
}

#[test]
fn finite_branching_factor() {
    let oracles = OracleTable::with_builtins();
    for n in 0..3u32 {
        let m = FinModel::new(n);
        let t = build_tree(&p("#exists2 (\\n:0. n)"), &Model::Finite(m.clone()), &oracles, Limits::fuel(10_000));
        let root = t.root().unwrap();
        let expected = m.total_space(&Type::Base).unwrap().len();
        assert_eq!(root.children.len(), expected);
        assert_eq!(root.notes.predecessors, Some(expected));
    }
    // second-order argument: one predecessor per total 0 -> 0
    let m = FinModel::new(1);
    let t = build_tree(
        &p("#exists2 (\\n:0. #exists2 (\\k:0. 1))"),
        &Model::Finite(m.clone()),
        &oracles,
        Limits::fuel(10_000),
    );
    assert_eq!(t.outcome, Outcome::Value(1));
}

#[test]
fn finite_overflow_has_no_value() {
    assert_eq!(fin("suc (suc 0)", 1, 100).outcome, Outcome::Overflow);
    assert_eq!(fin("suc 0", 1, 100).outcome, Outcome::Value(1));
}

#[test]
fn ill_typed_is_stuck() {
    assert!(matches!(inf("\\x:0. x", 100), Outcome::StuckIllTyped(_)));
    assert!(matches!(inf("y", 100), Outcome::StuckIllTyped(_)));
}

#[test]
fn equivalence_examples() {
    let m = FinModel::new(1);
    let o = OracleTable::with_builtins();
    let r = check_equiv(&p("suc 0"), &m, &o, 1000).unwrap();
    assert_eq!((r.verdict, r.denotation), (Verdict::Agree, Some(1)));
    let r = check_equiv(&p("fix x:0. x"), &m, &o, 1000).unwrap();
    assert_eq!((r.verdict, r.denotation), (Verdict::Agree, None));
    let r = check_equiv(&p("#mu (\\n:0. case n 1 0)"), &m, &o, 1000).unwrap();
    assert_eq!((r.verdict, r.denotation), (Verdict::Agree, Some(1)));
}

#[test]
fn fuel_shortfall_is_inconclusive() {
    let m = FinModel::new(3);
    let o = OracleTable::with_builtins();
    let t = p(&format!("({ADD}) 1 2"));
    let full = eval_op(&t, &Model::Finite(m.clone()), &o, 10_000);
    assert_eq!(full.outcome, Outcome::Value(3));
    let r = check_equiv(&t, &m, &o, full.steps - 1).unwrap();
    assert_eq!(r.verdict, Verdict::InconclusiveFuel);
}

#[test]
fn export_formats() {
    let t = build_tree(&p("(\\x:0. suc x) 0"), &Model::Infinite, &OracleTable::with_builtins(), Limits::fuel(100));
    let text = to_text(&t);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id\tkind\toutcome\tparent\tannotation\tterm");
    assert_eq!(lines[1], "0\tbeta\tvalue:1\t-\t-\t(\\x:0. suc x) 0");
    assert_eq!(lines[2], "1\tbase\tvalue:1\t0\t-\tsuc 0");
    assert_eq!(lines[3], "2\tleaf\tvalue:0\t1\t-\t0");
    let dot = to_dot(&t);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("n0 -> n1;"));
}

/// Small closed programs of type 0 used by the property tests.
fn programs() -> Vec<&'static str> {
    vec![
        "suc (suc 0)",
        "case (pred 1) 2 3",
        "(\\f:0 -> 0. f (f 0)) (\\x:0. suc x)",
        "#mu (\\n:0. case n 1 (case (pred n) 1 0))",
        "#exists2 (\\n:0. case n 1 1)",
        "(fix f:0 -> 0. \\n:0. case n 0 (f (pred n))) 2",
        "fix x:0. x",
        "(fix f:0 -> 0. \\n:0. f (suc n)) 0",
    ]
}

proptest! {
    #[test]
    fn fuel_monotone(i in 0usize..8, fuel in 1u64..400, extra in 0u64..400) {
        let t = p(programs()[i]);
        let o = OracleTable::with_builtins();
        for model in [Model::Infinite, Model::Finite(FinModel::new(2))] {
            let a = eval_op(&t, &model, &o, fuel);
            if let Outcome::Value(v) = a.outcome {
                prop_assert_eq!(eval_op(&t, &model, &o, fuel + extra).outcome, Outcome::Value(v));
            }
        }
    }

    #[test]
    fn deterministic_reports(i in 0usize..8, fuel in 1u64..400) {
        let t = p(programs()[i]);
        let o = OracleTable::with_builtins();
        let a = eval_with_tree(&t, &Model::Infinite, &o, Limits::fuel(fuel));
        let b = eval_with_tree(&t, &Model::Infinite, &o, Limits::fuel(fuel));
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn every_predecessor_is_closed_of_type_0(i in 0usize..8) {
        let t = p(programs()[i]);
        let o = OracleTable::with_builtins();
        let ctx = o.typing_context();
        for model in [Model::Infinite, Model::Finite(FinModel::new(1))] {
            let tree = build_tree(&t, &model, &o, Limits::fuel(300));
            for n in tree.nodes.iter().filter(|n| n.kind != NodeKind::Truncated) {
                prop_assert!(n.term.is_closed());
                prop_assert_eq!(typecheck(&n.term, &ctx).unwrap(), Type::Base);
            }
        }
    }

    #[test]
    fn recording_limits_do_not_change_outcomes(i in 0usize..8, nodes in 1usize..20, depth in 0usize..6) {
        let t = p(programs()[i]);
        let o = OracleTable::with_builtins();
        let plain = eval_op(&t, &Model::Infinite, &o, 300);
        let tree = build_tree(&t, &Model::Infinite, &o, Limits { fuel: 300, max_nodes: nodes, max_depth: depth });
        prop_assert_eq!(plain.outcome, tree.outcome);
    }
}
