//! The oracle plugin protocol and registry.
//!
//! An oracle is a partial functional on total arguments. It never sees its
//! arguments directly: it receives a [`QueryHandle`] and asks for argument
//! values at total points of its choosing. In the finite model the handle
//! reads an already assembled table; in the infinite model every query runs
//! a sub-computation, and a query without a value blocks the application.

mod builtin;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::domains::{FinModel, TotalElement};
use crate::syntax::{Constant, Term, Type, TypingContext};

pub use builtin::{Exists2, Mu, OmegaB, OmegaC};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    Finite { bound: u32 },
    Infinite,
}

/// A total argument an oracle may query at.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QueryArg {
    Nat(u64),
    /// The eventually-zero sequence `prefix ++ 0 0 0 ...`.
    Seq(Vec<u64>),
    /// An arbitrary total functional of the finite model.
    Total(TotalElement),
}

impl QueryArg {
    /// A closed term denoting this argument, for the infinite model.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            QueryArg::Nat(n) => Some(Term::Const(Constant::Num(*n))),
            QueryArg::Seq(prefix) => {
                // \n. case n p0 (case (pred n) p1 (... 0))
                let mut body = Term::Const(Constant::Num(0));
                for (k, p) in prefix.iter().enumerate().rev() {
                    let mut probe = Term::var("n");
                    for _ in 0..k {
                        probe = Term::app(Term::Pred, probe);
                    }
                    body = Term::apps(Term::Case, [probe, Term::Const(Constant::Num(*p)), body]);
                }
                Some(Term::lam("n", Type::Base, body))
            }
            QueryArg::Total(_) => None,
        }
    }
}

impl fmt::Display for QueryArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryArg::Nat(n) => write!(f, "{n}"),
            QueryArg::Seq(p) => {
                for d in p {
                    write!(f, "{d}.")?;
                }
                f.write_str("0*")
            }
            QueryArg::Total(e) => write!(f, "{e}"),
        }
    }
}

/// A query came back without a value; the whole application blocks.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("query blocked: {reason}")]
pub struct Blocked {
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub position: usize,
    pub args: Vec<QueryArg>,
    pub result: Result<u64, Blocked>,
}

impl fmt::Display for QueryRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}(", self.position)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        match &self.result {
            Ok(v) => write!(f, ")={v}"),
            Err(_) => f.write_str(")=none"),
        }
    }
}

pub trait QueryHandle {
    fn model(&self) -> ModelKind;
    /// Evaluates argument `position` at the given total arguments.
    fn ask(&mut self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Value(u64),
    Refused(String),
    PromiseViolation(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    pub answer: Answer,
    /// Set when the answer came from a bounded search that found no witness.
    pub approximate: bool,
}

impl Response {
    pub fn exact(v: u64) -> Self {
        Response { answer: Answer::Value(v), approximate: false }
    }

    pub fn approximate(v: u64) -> Self {
        Response { answer: Answer::Value(v), approximate: true }
    }
}

/// Key-value configuration of one oracle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleConfig(BTreeMap<String, String>);

impl OracleConfig {
    pub fn set(&mut self, key: &str, value: &str) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, OracleError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| OracleError::BadConfig {
                key: key.to_string(),
                value: v.to_string(),
            }),
        }
    }
}

pub trait OraclePlugin: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn signature(&self) -> Type;
    /// Must depend only on `config` and the results of the queries made.
    fn answer(&self, q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Response, Blocked>;
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("unknown oracle `#{0}`")]
    UnknownOracle(String),
    #[error("oracle `#{0}` is already registered")]
    Duplicate(String),
    #[error("bad oracle setting `{key}={value}`")]
    BadConfig { key: String, value: String },
}

/// Registered plugins and their configurations.
#[derive(Clone, Debug, Default)]
pub struct OracleTable {
    plugins: BTreeMap<String, Arc<dyn OraclePlugin>>,
    configs: BTreeMap<String, OracleConfig>,
}

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `#exists2`, `#mu`, `#omegaC` and `#omegaB`.
    pub fn with_builtins() -> Self {
        let mut t = Self::new();
        for p in [
            Arc::new(Exists2) as Arc<dyn OraclePlugin>,
            Arc::new(Mu),
            Arc::new(OmegaC),
            Arc::new(OmegaB),
        ] {
            t.register(p).expect("builtin names are distinct");
        }
        t
    }

    pub fn register(&mut self, plugin: Arc<dyn OraclePlugin>) -> Result<(), OracleError> {
        let name = plugin.name().to_string();
        if self.plugins.contains_key(&name) {
            return Err(OracleError::Duplicate(name));
        }
        self.plugins.insert(name, plugin);
        Ok(())
    }

    /// Accepts the name with or without the leading `#`.
    pub fn lookup(&self, name: &str) -> Result<Arc<dyn OraclePlugin>, OracleError> {
        let key = name.strip_prefix('#').unwrap_or(name);
        self.plugins
            .get(key)
            .cloned()
            .ok_or_else(|| OracleError::UnknownOracle(key.to_string()))
    }

    pub fn set_config(&mut self, name: &str, key: &str, value: &str) -> Result<(), OracleError> {
        let name = name.strip_prefix('#').unwrap_or(name);
        self.lookup(name)?;
        self.configs.entry(name.to_string()).or_default().set(key, value);
        Ok(())
    }

    pub fn config(&self, name: &str) -> OracleConfig {
        let name = name.strip_prefix('#').unwrap_or(name);
        self.configs.get(name).cloned().unwrap_or_default()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.plugins.keys().map(String::as_str)
    }

    /// Typing context declaring every registered oracle.
    pub fn typing_context(&self) -> TypingContext {
        TypingContext::with_oracles(
            self.plugins
                .iter()
                .map(|(n, p)| (n.clone(), p.signature()))
                .collect(),
        )
    }
}

/// Answers queries from total arguments of the finite model.
pub struct TotalHandle<'a> {
    model: &'a FinModel,
    args: Vec<(Type, TotalElement)>,
    log: Vec<QueryRecord>,
}

impl<'a> TotalHandle<'a> {
    pub fn new(model: &'a FinModel, args: Vec<(Type, TotalElement)>) -> Self {
        TotalHandle { model, args, log: Vec::new() }
    }

    pub fn into_log(self) -> Vec<QueryRecord> {
        self.log
    }

    fn lower(&self, ty: &Type, a: &QueryArg) -> Result<TotalElement, Blocked> {
        let bound = self.model.bound() as u64;
        let outside = || Blocked {
            reason: format!("argument {a} lies outside the model at type {ty}"),
        };
        match (ty, a) {
            (Type::Base, QueryArg::Nat(n)) if *n <= bound => Ok(TotalElement::Nat(*n as u32)),
            (Type::Arrow(d, c), QueryArg::Seq(p)) if d.is_base() && c.is_base() => {
                let entries = (0..=bound)
                    .map(|i| {
                        let v = p.get(i as usize).copied().unwrap_or(0);
                        (v <= bound).then_some(TotalElement::Nat(v as u32))
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(outside)?;
                Ok(TotalElement::Table(entries.into()))
            }
            (_, QueryArg::Total(e)) => Ok(e.clone()),
            _ => Err(outside()),
        }
    }

    fn eval(&self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked> {
        let (ty, f) = self.args.get(position).ok_or_else(|| Blocked {
            reason: format!("no argument at position {position}"),
        })?;
        let mut ty = ty;
        let mut cur = f.clone();
        for a in args {
            let (dom, cod) = ty.split().ok_or_else(|| Blocked {
                reason: "too many query arguments".into(),
            })?;
            let x = self.lower(dom, a)?;
            let space = self.model.total_space(dom).map_err(|e| Blocked { reason: e.to_string() })?;
            let i = space.index_of(&x).ok_or_else(|| Blocked {
                reason: format!("{x} is not a total element of {dom}"),
            })?;
            cur = cur
                .entries()
                .and_then(|e| e.get(i))
                .cloned()
                .ok_or_else(|| Blocked { reason: "malformed table".into() })?;
            ty = cod;
        }
        cur.as_nat().map(u64::from).ok_or_else(|| Blocked {
            reason: "query did not reach a number".into(),
        })
    }
}

impl QueryHandle for TotalHandle<'_> {
    fn model(&self) -> ModelKind {
        ModelKind::Finite { bound: self.model.bound() }
    }

    fn ask(&mut self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked> {
        let result = self.eval(position, args);
        self.log.push(QueryRecord {
            position,
            args: args.to_vec(),
            result: result.clone(),
        });
        result
    }
}

/// Replays a recorded query log, checking that the same queries are asked
/// in the same order.
pub struct ReplayHandle {
    model: ModelKind,
    log: Vec<QueryRecord>,
    next: usize,
}

impl ReplayHandle {
    pub fn new(model: ModelKind, log: Vec<QueryRecord>) -> Self {
        ReplayHandle { model, log, next: 0 }
    }

    pub fn fully_consumed(&self) -> bool {
        self.next == self.log.len()
    }
}

impl QueryHandle for ReplayHandle {
    fn model(&self) -> ModelKind {
        self.model
    }

    fn ask(&mut self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked> {
        let rec = self.log.get(self.next).ok_or_else(|| Blocked {
            reason: "query beyond the recorded log".into(),
        })?;
        if rec.position != position || rec.args != args {
            return Err(Blocked {
                reason: format!("replay diverged at query {}", self.next),
            });
        }
        self.next += 1;
        rec.result.clone()
    }
}
