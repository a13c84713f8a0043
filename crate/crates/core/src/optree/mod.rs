//! Computation trees: the operational semantics by head decomposition.
//!
//! A closed term of type `0` is a computation. Its head decides the node:
//! numbers are leaves; `suc`, `pred` and `case` evaluate their arguments
//! first; an abstraction or `fix` in head position has a single predecessor
//! obtained by substitution; an oracle applied to `s1 s2 ... sn` consults
//! `s1` at total arguments, applies the oracle to the resulting functional
//! and continues with the remaining arguments.
//!
//! In a finite model the oracle case takes every tuple of total arguments as
//! a predecessor, as the definition prescribes. In the infinite model the
//! plugin chooses where to query. Every node costs one unit of fuel.

mod equiv;
mod export;
mod machine;

use serde::Serialize;

use crate::domains::FinModel;
use crate::oracles::{OracleTable, QueryRecord};
use crate::syntax::Term;

pub use equiv::{check_equiv, AgreementReport, Verdict};
pub use export::{to_dot, to_text};

#[derive(Clone, Debug)]
pub enum Model {
    Finite(FinModel),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Value(u64),
    NoValueWithinFuel(u64),
    OracleRefusal { oracle: String, reason: String },
    /// A successor left the base window of a finite model.
    Overflow,
    StuckIllTyped(String),
}

impl Outcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            Outcome::Value(v) => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "value {v}"),
            Outcome::NoValueWithinFuel(n) => write!(f, "no value within fuel {n}"),
            Outcome::OracleRefusal { oracle, reason } => write!(f, "#{oracle} refused: {reason}"),
            Outcome::Overflow => write!(f, "no value: outside the finite model"),
            Outcome::StuckIllTyped(d) => write!(f, "stuck: {d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    BaseStep,
    OracleApp,
    BetaStep,
    FixStep,
    Leaf,
    /// Marks where recording stopped because of a node or depth limit.
    Truncated,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::BaseStep => "base",
            NodeKind::OracleApp => "oracle",
            NodeKind::BetaStep => "beta",
            NodeKind::FixStep => "fix",
            NodeKind::Leaf => "leaf",
            NodeKind::Truncated => "truncated",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct NodeNotes {
    pub oracle: Option<String>,
    #[serde(serialize_with = "records")]
    pub queries: Vec<QueryRecord>,
    /// Number of all-totals predecessors (finite model).
    pub predecessors: Option<usize>,
    pub approximate: bool,
}

fn records<S: serde::Serializer>(q: &[QueryRecord], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(q.iter().map(|r| r.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub kind: NodeKind,
    pub depth: usize,
    #[serde(skip)]
    pub term: Term,
    #[serde(rename = "term")]
    pub term_text: String,
    pub outcome: Option<Outcome>,
    pub children: Vec<usize>,
    pub notes: NodeNotes,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompTree {
    pub nodes: Vec<CompNode>,
    pub outcome: Outcome,
    pub truncated: bool,
}

impl CompTree {
    pub fn root(&self) -> Option<&CompNode> {
        self.nodes.first()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub outcome: Outcome,
    /// Fuel consumed, one unit per node.
    pub steps: u64,
    pub max_depth: usize,
    pub oracle_queries: u64,
    /// Some oracle answered from a bounded search without a witness.
    pub approximate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<CompTree>,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub fuel: u64,
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Limits {
    pub fn fuel(fuel: u64) -> Self {
        Limits { fuel, max_nodes: usize::MAX, max_depth: usize::MAX }
    }
}

/// Evaluates a closed term of type `0` with the given fuel.
pub fn eval_op(t: &Term, model: &Model, oracles: &OracleTable, fuel: u64) -> EvalReport {
    machine::evaluate(t, model, oracles, Limits::fuel(fuel), false)
}

/// As [`eval_op`], also recording the tree up to the node and depth limits.
/// The outcome does not depend on the recording limits.
pub fn build_tree(t: &Term, model: &Model, oracles: &OracleTable, limits: Limits) -> CompTree {
    let r = machine::evaluate(t, model, oracles, limits, true);
    r.tree.expect("recording was requested")
}

/// Evaluates and returns the report together with the recorded tree.
pub fn eval_with_tree(t: &Term, model: &Model, oracles: &OracleTable, limits: Limits) -> EvalReport {
    machine::evaluate(t, model, oracles, limits, true)
}

#[cfg(test)]
mod tests;
