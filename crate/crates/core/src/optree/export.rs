//! Tree export.
//!
//! Text: a header line, then one tab-separated record per node in id order:
//!
//! ```text
//! id  kind  outcome  parent  annotation  term
//! ```
//!
//! `kind` is one of `base oracle beta fix leaf truncated`. `outcome` is
//! `value:N`, `nofuel:N`, `refused`, `overflow`, `stuck` or `-` for a node
//! that never settled. `parent` is `-` for the root. `annotation` is a
//! `;`-separated list of `oracle=NAME`, `preds=K`, `approx` and `q=RECORD`
//! items, or `-`. The term is the pretty-printed snapshot.
//!
//! DOT: a `digraph` with one box per node, labelled `kind | outcome | term`,
//! and an edge from each node to each of its children.

use std::fmt::Write;

use super::{CompNode, CompTree, Outcome};

pub const TEXT_HEADER: &str = "id\tkind\toutcome\tparent\tannotation\tterm";

fn outcome_token(o: Option<&Outcome>) -> String {
    match o {
        None => "-".into(),
        Some(Outcome::Value(v)) => format!("value:{v}"),
        Some(Outcome::NoValueWithinFuel(n)) => format!("nofuel:{n}"),
        Some(Outcome::OracleRefusal { .. }) => "refused".into(),
        Some(Outcome::Overflow) => "overflow".into(),
        Some(Outcome::StuckIllTyped(_)) => "stuck".into(),
    }
}

fn annotation(n: &CompNode) -> String {
    let mut items = Vec::new();
    if let Some(o) = &n.notes.oracle {
        items.push(format!("oracle={o}"));
    }
    if let Some(k) = n.notes.predecessors {
        items.push(format!("preds={k}"));
    }
    if n.notes.approximate {
        items.push("approx".into());
    }
    items.extend(n.notes.queries.iter().map(|q| format!("q={q}")));
    if items.is_empty() {
        "-".into()
    } else {
        items.join(";")
    }
}

pub fn to_text(tree: &CompTree) -> String {
    let mut out = String::from(TEXT_HEADER);
    out.push('\n');
    for n in &tree.nodes {
        let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            n.id,
            n.kind.as_str(),
            outcome_token(n.outcome.as_ref()),
            parent,
            annotation(n),
            n.term_text
        );
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(tree: &CompTree) -> String {
    let mut out = String::from("digraph computation {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &tree.nodes {
        let _ = writeln!(
            out,
            "  n{} [label=\"{} | {} | {}\"];",
            n.id,
            n.kind.as_str(),
            outcome_token(n.outcome.as_ref()),
            escape(&n.term_text)
        );
    }
    for n in &tree.nodes {
        for c in &n.children {
            let _ = writeln!(out, "  n{} -> n{};", n.id, c);
        }
    }
    out.push_str("}\n");
    out
}
