use std::collections::HashSet;

use super::{CompNode, CompTree, EvalReport, Limits, Model, NodeKind, NodeNotes, Outcome};
use crate::domains::{DomainError, FinModel, TotalElement};
use crate::oracles::{
    Answer, Blocked, ModelKind, OracleTable, QueryArg, QueryHandle, QueryRecord, Response,
    TotalHandle,
};
use crate::syntax::{pretty, substitute, typecheck, Constant, OracleArg, PartialApp, Term, Type, TypingContext};

#[derive(Clone, Debug)]
enum Fail {
    Fuel,
    Refusal { oracle: String, reason: String },
    Overflow,
    Stuck(String),
}

impl From<DomainError> for Fail {
    fn from(e: DomainError) -> Self {
        Fail::Stuck(e.to_string())
    }
}

type NodeRef = Option<usize>;

enum Kont {
    Suc(NodeRef),
    Pred(NodeRef),
    Case { node: NodeRef, depth: usize, then_: Term, else_: Term },
    Pass(NodeRef),
    Oracle(Box<FiniteOracle>),
}

/// State of a finite-model oracle node while its predecessors run.
struct FiniteOracle {
    node: NodeRef,
    depth: usize,
    head: Constant,
    arg_ty: Type,
    preds: Vec<Term>,
    values: Vec<u64>,
    rest: Vec<Term>,
}

enum Next {
    /// Evaluate this term as a predecessor of the given node.
    Eval(Term, NodeRef, usize),
    /// A value for the innermost pending continuation.
    Return(u64),
}

struct Recording {
    max_nodes: usize,
    max_depth: usize,
    nodes: Vec<CompNode>,
    marked: HashSet<usize>,
    truncated: bool,
}

struct Machine<'a> {
    model: &'a Model,
    oracles: &'a OracleTable,
    ctx: TypingContext,
    fuel: u64,
    used: u64,
    max_depth: usize,
    queries: u64,
    approximate: bool,
    rec: Option<Recording>,
}

pub(super) fn evaluate(
    t: &Term,
    model: &Model,
    oracles: &OracleTable,
    limits: Limits,
    record: bool,
) -> EvalReport {
    let mut m = Machine {
        model,
        oracles,
        ctx: oracles.typing_context(),
        fuel: limits.fuel,
        used: 0,
        max_depth: 0,
        queries: 0,
        approximate: false,
        rec: record.then(|| Recording {
            max_nodes: limits.max_nodes.max(1),
            max_depth: limits.max_depth,
            nodes: Vec::new(),
            marked: HashSet::new(),
            truncated: false,
        }),
    };
    let outcome = match typecheck(t, &m.ctx) {
        Ok(Type::Base) if t.is_closed() => match m.run(t.clone(), None, 0) {
            Ok(v) => Outcome::Value(v),
            Err(f) => m.outcome_of(f),
        },
        Ok(ty) => Outcome::StuckIllTyped(format!("expected a closed term of type 0, found {ty}")),
        Err(e) => Outcome::StuckIllTyped(e.to_string()),
    };
    let tree = m.rec.take().map(|r| CompTree {
        nodes: r.nodes,
        outcome: outcome.clone(),
        truncated: r.truncated,
    });
    EvalReport {
        outcome,
        steps: m.used,
        max_depth: m.max_depth,
        oracle_queries: m.queries,
        approximate: m.approximate,
        tree,
    }
}

impl Machine<'_> {
    fn outcome_of(&self, f: Fail) -> Outcome {
        match f {
            Fail::Fuel => Outcome::NoValueWithinFuel(self.fuel),
            Fail::Refusal { oracle, reason } => Outcome::OracleRefusal { oracle, reason },
            Fail::Overflow => Outcome::Overflow,
            Fail::Stuck(d) => Outcome::StuckIllTyped(d),
        }
    }

    fn bound(&self) -> Option<u32> {
        match self.model {
            Model::Finite(m) => Some(m.bound()),
            Model::Infinite => None,
        }
    }

    fn new_node(&mut self, term: &Term, parent: NodeRef, depth: usize, kind: NodeKind) -> Result<NodeRef, Fail> {
        if self.used >= self.fuel {
            return Err(Fail::Fuel);
        }
        self.used += 1;
        self.max_depth = self.max_depth.max(depth);
        let Some(rec) = self.rec.as_mut() else {
            return Ok(None);
        };
        let attached = depth == 0 || parent.is_some();
        if !attached {
            return Ok(None);
        }
        if depth <= rec.max_depth && rec.nodes.len() < rec.max_nodes {
            let id = rec.nodes.len();
            rec.nodes.push(CompNode {
                id,
                parent,
                kind,
                depth,
                term: term.clone(),
                term_text: pretty(term),
                outcome: None,
                children: Vec::new(),
                notes: NodeNotes::default(),
            });
            if let Some(p) = parent {
                rec.nodes[p].children.push(id);
            }
            return Ok(Some(id));
        }
        rec.truncated = true;
        if let Some(p) = parent {
            if rec.marked.insert(p) {
                let id = rec.nodes.len();
                rec.nodes.push(CompNode {
                    id,
                    parent: Some(p),
                    kind: NodeKind::Truncated,
                    depth,
                    term: Term::Zero,
                    term_text: String::new(),
                    outcome: None,
                    children: Vec::new(),
                    notes: NodeNotes::default(),
                });
                rec.nodes[p].children.push(id);
            }
        }
        Ok(None)
    }

    fn settle(&mut self, node: NodeRef, outcome: Outcome) {
        if let (Some(rec), Some(id)) = (self.rec.as_mut(), node) {
            rec.nodes[id].outcome = Some(outcome);
        }
    }

    fn notes(&mut self, node: NodeRef) -> Option<&mut NodeNotes> {
        match (self.rec.as_mut(), node) {
            (Some(rec), Some(id)) => Some(&mut rec.nodes[id].notes),
            _ => None,
        }
    }

    /// Evaluates a closed term of type 0 whose node hangs below `parent`.
    fn run(&mut self, term: Term, parent: NodeRef, depth: usize) -> Result<u64, Fail> {
        let mut konts: Vec<Kont> = Vec::new();
        let mut next = Next::Eval(term, parent, depth);
        loop {
            let step = match next {
                Next::Eval(t, parent, depth) => self.enter(t, parent, depth, &mut konts),
                Next::Return(v) => match konts.pop() {
                    None => return Ok(v),
                    Some(k) => self.resume(k, v, &mut konts),
                },
            };
            match step {
                Ok(n) => next = n,
                Err(f) => {
                    let out = self.outcome_of(f.clone());
                    for k in konts.iter().rev() {
                        let node = match k {
                            Kont::Suc(n) | Kont::Pred(n) | Kont::Pass(n) => *n,
                            Kont::Case { node, .. } => *node,
                            Kont::Oracle(o) => o.node,
                        };
                        self.settle(node, out.clone());
                    }
                    return Err(f);
                }
            }
        }
    }

    fn enter(&mut self, t: Term, parent: NodeRef, depth: usize, konts: &mut Vec<Kont>) -> Result<Next, Fail> {
        let (head, args) = t.head_decompose();
        let kind = match (head, args.len()) {
            (Term::Zero, 0) | (Term::Const(Constant::Num(_)), 0) => NodeKind::Leaf,
            (Term::Suc | Term::Pred, 1) | (Term::Case, 3) => NodeKind::BaseStep,
            (Term::Lam(..), n) if n >= 1 => NodeKind::BetaStep,
            (Term::Fix(..), _) => NodeKind::FixStep,
            (Term::Oracle(_) | Term::Const(_), n) if n >= 1 => NodeKind::OracleApp,
            _ => return Err(Fail::Stuck(format!("no rule applies to {}", pretty(&t)))),
        };
        let node = self.new_node(&t, parent, depth, kind)?;
        let child = depth + 1;
        let own = |s: &[&Term]| s.iter().map(|a| (*a).clone()).collect::<Vec<_>>();
        match kind {
            NodeKind::Leaf => {
                let v = match head {
                    Term::Const(Constant::Num(n)) => *n,
                    _ => 0,
                };
                if self.bound().is_some_and(|b| v > b as u64) {
                    self.settle(node, Outcome::Overflow);
                    return Err(Fail::Overflow);
                }
                self.settle(node, Outcome::Value(v));
                Ok(Next::Return(v))
            }
            NodeKind::BaseStep => match head {
                Term::Suc => {
                    konts.push(Kont::Suc(node));
                    Ok(Next::Eval(args[0].clone(), node, child))
                }
                Term::Pred => {
                    konts.push(Kont::Pred(node));
                    Ok(Next::Eval(args[0].clone(), node, child))
                }
                _ => {
                    konts.push(Kont::Case {
                        node,
                        depth: child,
                        then_: args[1].clone(),
                        else_: args[2].clone(),
                    });
                    Ok(Next::Eval(args[0].clone(), node, child))
                }
            },
            NodeKind::BetaStep => {
                let Term::Lam(x, _, body) = head else { unreachable!() };
                let reduced = substitute(body, x, args[0]);
                konts.push(Kont::Pass(node));
                Ok(Next::Eval(Term::apps(reduced, own(&args[1..])), node, child))
            }
            NodeKind::FixStep => {
                let Term::Fix(x, _, body) = head else { unreachable!() };
                let unfolded = substitute(body, x, head);
                konts.push(Kont::Pass(node));
                Ok(Next::Eval(Term::apps(unfolded, own(&args)), node, child))
            }
            NodeKind::OracleApp => {
                let head = match head {
                    Term::Oracle(name) => {
                        let p = self.oracles.lookup(name).map_err(|e| Fail::Stuck(e.to_string()))?;
                        Constant::Partial(PartialApp {
                            oracle: p.name().to_string(),
                            args: Vec::new(),
                            ty: p.signature(),
                        })
                    }
                    Term::Const(c) => c.clone(),
                    _ => unreachable!(),
                };
                let s1 = args[0].clone();
                let rest = own(&args[1..]);
                match self.model {
                    Model::Finite(m) => {
                        let m = m.clone();
                        self.finite_oracle(&m, node, child, head, s1, rest, konts)
                    }
                    Model::Infinite => self.infinite_oracle(node, child, head, s1, rest, konts),
                }
            }
            NodeKind::Truncated => unreachable!(),
        }
    }

    fn resume(&mut self, k: Kont, v: u64, konts: &mut Vec<Kont>) -> Result<Next, Fail> {
        match k {
            Kont::Suc(node) => {
                let r = v.checked_add(1).filter(|r| self.bound().is_none_or(|b| *r <= b as u64));
                match r {
                    Some(r) => {
                        self.settle(node, Outcome::Value(r));
                        Ok(Next::Return(r))
                    }
                    None => {
                        self.settle(node, Outcome::Overflow);
                        Err(Fail::Overflow)
                    }
                }
            }
            Kont::Pred(node) => {
                let r = v.saturating_sub(1);
                self.settle(node, Outcome::Value(r));
                Ok(Next::Return(r))
            }
            Kont::Case { node, depth, then_, else_ } => {
                konts.push(Kont::Pass(node));
                Ok(Next::Eval(if v == 0 { then_ } else { else_ }, node, depth))
            }
            Kont::Pass(node) => {
                self.settle(node, Outcome::Value(v));
                Ok(Next::Return(v))
            }
            Kont::Oracle(mut o) => {
                o.values.push(v);
                if o.values.len() < o.preds.len() {
                    let t = o.preds[o.values.len()].clone();
                    let (node, depth) = (o.node, o.depth);
                    konts.push(Kont::Oracle(o));
                    return Ok(Next::Eval(t, node, depth));
                }
                let m = match self.model {
                    Model::Finite(m) => m.clone(),
                    Model::Infinite => unreachable!(),
                };
                self.finish_finite(&m, *o, konts)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finite_oracle(
        &mut self,
        m: &FinModel,
        node: NodeRef,
        depth: usize,
        head: Constant,
        s1: Term,
        rest: Vec<Term>,
        konts: &mut Vec<Kont>,
    ) -> Result<Next, Fail> {
        let arg_ty = typecheck(&s1, &self.ctx).map_err(|e| Fail::Stuck(e.to_string()))?;
        let spaces = arg_ty
            .spine()
            .into_iter()
            .map(|d| m.total_space(d).map(|s| (d.clone(), s)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut preds = Vec::new();
        let mut idx = vec![0usize; spaces.len()];
        if spaces.iter().all(|(_, s)| !s.is_empty()) {
            loop {
                let consts = spaces.iter().zip(&idx).map(|((d, s), &i)| {
                    let e = &s.elems()[i];
                    match e {
                        TotalElement::Nat(n) => Term::Const(Constant::Num(*n as u64)),
                        _ => Term::Const(Constant::Total(e.clone(), d.clone())),
                    }
                });
                preds.push(Term::apps(s1.clone(), consts));
                // odometer, last argument fastest
                let mut k = idx.len();
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < spaces[k].1.len() {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if done {
                    break;
                }
            }
        }
        if let Some(n) = self.notes(node) {
            n.predecessors = Some(preds.len());
            if let Constant::Partial(p) = &head {
                n.oracle = Some(p.oracle.clone());
            }
        }
        let first = preds.first().cloned().ok_or_else(|| Fail::Stuck("no total arguments".into()))?;
        konts.push(Kont::Oracle(Box::new(FiniteOracle {
            node,
            depth,
            head,
            arg_ty,
            preds,
            values: Vec::new(),
            rest,
        })));
        Ok(Next::Eval(first, node, depth))
    }

    fn finish_finite(&mut self, m: &FinModel, o: FiniteOracle, konts: &mut Vec<Kont>) -> Result<Next, Fail> {
        let psi = assemble(m, &o.arg_ty, &o.values)?;
        let xi = match o.head {
            Constant::Total(table, ty) => {
                let (_, cod) = ty.split().ok_or_else(|| Fail::Stuck("number applied".into()))?;
                let space = m.total_space(&o.arg_ty)?;
                let i = space
                    .index_of(&psi)
                    .ok_or_else(|| Fail::Stuck(format!("{psi} is not total at {}", o.arg_ty)))?;
                let e = table.entries().and_then(|e| e.get(i)).cloned().ok_or_else(|| Fail::Stuck("malformed table".into()))?;
                match e {
                    TotalElement::Nat(n) => Constant::Num(n as u64),
                    e => Constant::Total(e, cod.clone()),
                }
            }
            Constant::Partial(mut p) => {
                let (_, cod) = p.ty.split().ok_or_else(|| Fail::Stuck("oracle over-applied".into()))?;
                let cod = cod.clone();
                p.args.push(OracleArg::Total(psi));
                if cod.is_base() {
                    let v = self.answer_finite(m, o.node, &p)?;
                    Constant::Num(v)
                } else {
                    p.ty = cod;
                    Constant::Partial(p)
                }
            }
            Constant::Num(_) => return Err(Fail::Stuck("number applied".into())),
        };
        if o.rest.is_empty() {
            return match xi {
                Constant::Num(v) => {
                    self.settle(o.node, Outcome::Value(v));
                    Ok(Next::Return(v))
                }
                _ => Err(Fail::Stuck("oracle result is not a number".into())),
            };
        }
        konts.push(Kont::Pass(o.node));
        Ok(Next::Eval(Term::apps(Term::Const(xi), o.rest), o.node, o.depth))
    }

    fn answer_finite(&mut self, m: &FinModel, node: NodeRef, p: &PartialApp) -> Result<u64, Fail> {
        let plugin = self.oracles.lookup(&p.oracle).map_err(|e| Fail::Stuck(e.to_string()))?;
        let sig = plugin.signature();
        let args = sig
            .spine()
            .into_iter()
            .zip(&p.args)
            .map(|(ty, a)| match a {
                OracleArg::Total(e) => Ok((ty.clone(), e.clone())),
                OracleArg::Term(_) => Err(Fail::Stuck("term argument in a finite model".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut h = TotalHandle::new(m, args);
        let r = plugin.answer(&mut h, &self.oracles.config(&p.oracle));
        let log = h.into_log();
        self.queries += log.len() as u64;
        let approximate = r.as_ref().is_ok_and(|r| r.approximate);
        self.approximate |= approximate;
        if let Some(n) = self.notes(node) {
            n.queries = log;
            n.approximate = approximate;
        }
        let v = self.settle_answer(&p.oracle, node, r, None)?;
        if v > m.bound() as u64 {
            self.settle(node, Outcome::Overflow);
            return Err(Fail::Overflow);
        }
        Ok(v)
    }

    fn settle_answer(
        &mut self,
        oracle: &str,
        node: NodeRef,
        r: Result<Response, Blocked>,
        blocked: Option<Fail>,
    ) -> Result<u64, Fail> {
        let fail = match (blocked, r) {
            (Some(f), _) => f,
            (None, Ok(resp)) => match resp.answer {
                Answer::Value(v) => return Ok(v),
                Answer::Refused(reason) => Fail::Refusal { oracle: oracle.to_string(), reason },
                Answer::PromiseViolation(d) => Fail::Refusal {
                    oracle: oracle.to_string(),
                    reason: format!("promise violation: {d}"),
                },
            },
            (None, Err(b)) => Fail::Refusal { oracle: oracle.to_string(), reason: b.reason },
        };
        let out = self.outcome_of(fail.clone());
        self.settle(node, out);
        Err(fail)
    }

    fn infinite_oracle(
        &mut self,
        node: NodeRef,
        depth: usize,
        head: Constant,
        s1: Term,
        rest: Vec<Term>,
        konts: &mut Vec<Kont>,
    ) -> Result<Next, Fail> {
        let mut p = match head {
            Constant::Partial(p) => p,
            Constant::Total(..) => return Err(Fail::Stuck("finite-model functional in the infinite model".into())),
            Constant::Num(_) => return Err(Fail::Stuck("number applied".into())),
        };
        let (_, cod) = p.ty.split().ok_or_else(|| Fail::Stuck("oracle over-applied".into()))?;
        let cod = cod.clone();
        p.args.push(OracleArg::Term(s1));
        if let Some(n) = self.notes(node) {
            n.oracle = Some(p.oracle.clone());
        }
        if !cod.is_base() {
            p.ty = cod;
            konts.push(Kont::Pass(node));
            return Ok(Next::Eval(Term::apps(Term::Const(Constant::Partial(p)), rest), node, depth));
        }
        let plugin = self.oracles.lookup(&p.oracle).map_err(|e| Fail::Stuck(e.to_string()))?;
        let config = self.oracles.config(&p.oracle);
        let terms = p
            .args
            .iter()
            .map(|a| match a {
                OracleArg::Term(t) => Ok(t.clone()),
                OracleArg::Total(_) => Err(Fail::Stuck("finite-model argument in the infinite model".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut h = DemandHandle {
            machine: self,
            node,
            depth,
            args: terms,
            log: Vec::new(),
            failure: None,
        };
        let r = plugin.answer(&mut h, &config);
        let (log, failure) = (h.log, h.failure);
        self.queries += log.len() as u64;
        let approximate = r.as_ref().is_ok_and(|r| r.approximate);
        self.approximate |= approximate;
        if let Some(n) = self.notes(node) {
            n.queries = log;
            n.approximate = approximate;
        }
        let v = self.settle_answer(&p.oracle, node, r, failure)?;
        self.settle(node, Outcome::Value(v));
        Ok(Next::Return(v))
    }
}

/// Runs queries as sub-computations below the oracle node.
struct DemandHandle<'m, 'a> {
    machine: &'m mut Machine<'a>,
    node: NodeRef,
    depth: usize,
    args: Vec<Term>,
    log: Vec<QueryRecord>,
    failure: Option<Fail>,
}

impl QueryHandle for DemandHandle<'_, '_> {
    fn model(&self) -> ModelKind {
        ModelKind::Infinite
    }

    fn ask(&mut self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked> {
        let result = match self.failure {
            Some(_) => Err(Blocked { reason: "an earlier query had no value".into() }),
            None => self.query(position, args),
        };
        self.log.push(QueryRecord {
            position,
            args: args.to_vec(),
            result: result.clone(),
        });
        result
    }
}

impl DemandHandle<'_, '_> {
    fn query(&mut self, position: usize, args: &[QueryArg]) -> Result<u64, Blocked> {
        let head = self.args.get(position).cloned().ok_or_else(|| Blocked {
            reason: format!("no argument at position {position}"),
        })?;
        let terms = args
            .iter()
            .map(|a| a.to_term())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Blocked { reason: "argument has no term form".into() })?;
        let t = Term::apps(head, terms);
        match self.machine.run(t, self.node, self.depth) {
            Ok(v) => Ok(v),
            Err(f) => {
                let reason = self.machine.outcome_of(f.clone()).to_string();
                self.failure = Some(f);
                Err(Blocked { reason })
            }
        }
    }
}

/// Curried table of a functional from its values on all total argument
/// tuples, listed with the last argument varying fastest.
fn assemble(m: &FinModel, ty: &Type, values: &[u64]) -> Result<TotalElement, Fail> {
    match ty {
        Type::Base => {
            let v = values[0];
            if v > m.bound() as u64 {
                return Err(Fail::Overflow);
            }
            Ok(TotalElement::Nat(v as u32))
        }
        Type::Arrow(dom, cod) => {
            let n = m.total_space(dom)?.len();
            let chunk = values.len() / n;
            let entries = values
                .chunks(chunk)
                .map(|c| assemble(m, cod, c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TotalElement::Table(entries.into()))
        }
    }
}
