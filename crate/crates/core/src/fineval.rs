//! Exact denotational evaluation in a finite model.
//!
//! Terms are first elaborated against their typing context: variables
//! become positions in the runtime environment and every application and
//! abstraction gets the partial space of its argument type attached.
//! Abstractions are tabulated over the whole argument space; `fix` iterates
//! its body from bottom until the value stabilises.

use std::sync::Arc;

use crate::domains::{
    bottom_of, embed, embed_partial, DomainElement, DomainError, FinModel, PElement, PartialSpace,
};
use crate::oracles::{Answer, OracleError, OraclePlugin, OracleTable, TotalHandle};
use crate::syntax::{Constant, OracleArg, Term, Type, TypeError};

/// Safety cap on `fix` iteration; finite monotone chains stop far earlier.
const MAX_FIX_ITERATIONS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("fix did not stabilise")]
    NoFixedPoint,
}

/// Values for the free variables of a term, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Env {
    bindings: Vec<(String, Type, DomainElement)>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: &str, ty: Type, value: DomainElement) -> Self {
        self.bindings.push((name.to_string(), ty, value));
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&DomainElement> {
        self.bindings.iter().rev().find(|(n, _, _)| n == name).map(|(_, _, v)| v)
    }
}

enum Core {
    Val(DomainElement),
    Var(usize),
    App(Box<Core>, Box<Core>, Arc<PartialSpace>),
    Lam(Arc<PartialSpace>, Box<Core>),
    Fix(DomainElement, Box<Core>),
}

struct Elab<'a> {
    model: &'a FinModel,
    oracles: &'a OracleTable,
    scope: Vec<(String, Type)>,
}

impl Elab<'_> {
    fn term(&mut self, t: &Term) -> Result<(Core, Type), EvalError> {
        let m = self.model;
        Ok(match t {
            Term::Zero => (Core::Val(DomainElement::Nat(0)), Type::Base),
            Term::Suc => (Core::Val(suc_table(m)), Type::nat_fn()),
            Term::Pred => (Core::Val(pred_table(m)), Type::nat_fn()),
            Term::Case => (
                Core::Val(case_table(m)?),
                Type::curried([Type::Base, Type::Base, Type::Base], Type::Base),
            ),
            Term::Oracle(name) => {
                let p = self.oracles.lookup(name)?;
                let ty = p.signature();
                let v = tabulate_oracle(p.as_ref(), &self.oracles.config(name), &ty, m)?;
                (Core::Val(v), ty)
            }
            Term::Const(c) => (Core::Val(self.constant(c)?), c.ty()),
            Term::Var(x) => {
                let i = self
                    .scope
                    .iter()
                    .rposition(|(n, _)| n == x)
                    .ok_or_else(|| TypeError::UnboundVariable { name: x.clone() })?;
                (Core::Var(i), self.scope[i].1.clone())
            }
            Term::App(f, a) => {
                let (cf, tf) = self.term(f)?;
                let (ca, ta) = self.term(a)?;
                match tf {
                    Type::Arrow(dom, cod) if *dom == ta => {
                        let space = m.partial_space(&dom)?;
                        (Core::App(Box::new(cf), Box::new(ca), space), *cod)
                    }
                    other => {
                        return Err(TypeError::TypeMismatch {
                            expected: format!("{ta} -> _"),
                            found: other,
                            location: crate::syntax::pretty(t),
                        }
                        .into())
                    }
                }
            }
            Term::Lam(x, ty, body) => {
                let space = m.partial_space(ty)?;
                self.scope.push((x.clone(), ty.clone()));
                let r = self.term(body);
                self.scope.pop();
                let (cb, tb) = r?;
                (Core::Lam(space, Box::new(cb)), Type::arrow(ty.clone(), tb))
            }
            Term::Fix(x, ty, body) => {
                self.scope.push((x.clone(), ty.clone()));
                let r = self.term(body);
                self.scope.pop();
                let (cb, tb) = r?;
                if tb != *ty {
                    return Err(TypeError::TypeMismatch {
                        expected: ty.to_string(),
                        found: tb,
                        location: crate::syntax::pretty(t),
                    }
                    .into());
                }
                (Core::Fix(bottom_of(ty, m)?, Box::new(cb)), ty.clone())
            }
        })
    }

    fn constant(&mut self, c: &Constant) -> Result<DomainElement, EvalError> {
        let m = self.model;
        match c {
            Constant::Num(n) if *n <= m.bound() as u64 => Ok(DomainElement::Nat(*n as u32)),
            Constant::Num(_) => Ok(DomainElement::Bottom),
            Constant::Total(e, ty) => Ok(embed(ty, e, m)?),
            Constant::Partial(p) => {
                let plugin = self.oracles.lookup(&p.oracle)?;
                let mut ty = plugin.signature();
                let mut v = tabulate_oracle(plugin.as_ref(), &self.oracles.config(&p.oracle), &ty, m)?;
                for a in &p.args {
                    let (dom, cod) = match ty {
                        Type::Arrow(d, c) => (*d, *c),
                        Type::Base => {
                            return Err(DomainError::TypeMismatch {
                                ty: Type::Base,
                                detail: "too many oracle arguments".into(),
                            }
                            .into())
                        }
                    };
                    let x = match a {
                        OracleArg::Total(e) => embed(&dom, e, m)?,
                        OracleArg::Term(t) => {
                            let saved = std::mem::take(&mut self.scope);
                            let r = self.term(t);
                            self.scope = saved;
                            run(&r?.0, &mut Vec::new())?
                        }
                    };
                    v = crate::domains::apply(&Type::arrow(dom, cod.clone()), &v, &x, m)?;
                    ty = cod;
                }
                Ok(v)
            }
        }
    }
}

fn run(c: &Core, env: &mut Vec<DomainElement>) -> Result<DomainElement, EvalError> {
    match c {
        Core::Val(v) => Ok(v.clone()),
        Core::Var(i) => Ok(env[*i].clone()),
        Core::App(f, a, space) => {
            let fv = run(f, env)?;
            let av = run(a, env)?;
            let i = space.index_of(&av).ok_or_else(|| DomainError::TypeMismatch {
                ty: space.ty().clone(),
                detail: format!("{av} is not in the space"),
            })?;
            match fv {
                DomainElement::Table(e) => Ok(e[i].clone()),
                other => Err(DomainError::TypeMismatch {
                    ty: space.ty().clone(),
                    detail: format!("applied non-table {other}"),
                }
                .into()),
            }
        }
        Core::Lam(space, body) => {
            let mut entries = Vec::with_capacity(space.len());
            for x in space.elems() {
                env.push(x.clone());
                let r = run(body, env);
                env.pop();
                entries.push(r?);
            }
            Ok(DomainElement::Table(entries.into()))
        }
        Core::Fix(bottom, body) => {
            let mut x = bottom.clone();
            for _ in 0..MAX_FIX_ITERATIONS {
                env.push(x.clone());
                let r = run(body, env);
                env.pop();
                let y = r?;
                if y == x {
                    return Ok(x);
                }
                x = y;
            }
            Err(EvalError::NoFixedPoint)
        }
    }
}

fn suc_table(m: &FinModel) -> DomainElement {
    let n = m.bound();
    let mut e = vec![DomainElement::Bottom];
    e.extend((0..=n).map(|k| if k < n { DomainElement::Nat(k + 1) } else { DomainElement::Bottom }));
    DomainElement::Table(e.into())
}

fn pred_table(m: &FinModel) -> DomainElement {
    let mut e = vec![DomainElement::Bottom];
    e.extend((0..=m.bound()).map(|k| DomainElement::Nat(k.saturating_sub(1))));
    DomainElement::Table(e.into())
}

/// `case b t e`: bottom if `b` is, `t` if `b = 0`, `e` otherwise.
fn case_table(m: &FinModel) -> Result<DomainElement, DomainError> {
    let base = m.partial_space(&Type::Base)?;
    let pick = |first: bool| {
        DomainElement::Table(
            base.elems()
                .iter()
                .map(|t| {
                    DomainElement::Table(
                        base.elems()
                            .iter()
                            .map(|e| if first { t.clone() } else { e.clone() })
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let mut e = vec![bottom_of(&Type::arrow(Type::Base, Type::nat_fn()), m)?];
    e.extend((0..=m.bound()).map(|k| pick(k == 0)));
    Ok(DomainElement::Table(e.into()))
}

/// Tabulates an oracle over all total arguments of its signature and embeds
/// the result. Refusals, promise violations, blocked queries and answers
/// above the base bound all become bottom.
pub fn tabulate_oracle(
    p: &dyn OraclePlugin,
    config: &crate::oracles::OracleConfig,
    ty: &Type,
    m: &FinModel,
) -> Result<DomainElement, DomainError> {
    fn go(
        p: &dyn OraclePlugin,
        config: &crate::oracles::OracleConfig,
        rest: &Type,
        args: &mut Vec<(Type, crate::domains::TotalElement)>,
        m: &FinModel,
    ) -> Result<PElement, DomainError> {
        match rest {
            Type::Base => {
                let mut h = TotalHandle::new(m, args.clone());
                Ok(match p.answer(&mut h, config) {
                    Ok(r) => match r.answer {
                        Answer::Value(v) if v <= m.bound() as u64 => PElement::Nat(v as u32),
                        _ => PElement::Bottom,
                    },
                    Err(_) => PElement::Bottom,
                })
            }
            Type::Arrow(dom, cod) => {
                let space = m.total_space(dom)?;
                let mut entries = Vec::with_capacity(space.len());
                for g in space.elems() {
                    args.push(((**dom).clone(), g.clone()));
                    let r = go(p, config, cod, args, m);
                    args.pop();
                    entries.push(r?);
                }
                Ok(PElement::Table(entries.into()))
            }
        }
    }
    let table = go(p, config, ty, &mut Vec::new(), m)?;
    embed_partial(ty, &table, m)
}

/// Denotation of `t` with the free variables bound by `env`.
pub fn eval_fin(
    t: &Term,
    env: &Env,
    m: &FinModel,
    oracles: &OracleTable,
) -> Result<DomainElement, EvalError> {
    let mut elab = Elab {
        model: m,
        oracles,
        scope: env.bindings.iter().map(|(n, ty, _)| (n.clone(), ty.clone())).collect(),
    };
    let (core, _) = elab.term(t)?;
    let mut values: Vec<DomainElement> = env.bindings.iter().map(|(_, _, v)| v.clone()).collect();
    run(&core, &mut values)
}
