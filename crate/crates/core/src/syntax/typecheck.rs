use std::collections::BTreeMap;

use super::{pretty, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },
    #[error("unknown oracle `#{name}`")]
    UnknownOracle { name: String },
    #[error("type mismatch in `{location}`: expected {expected}, found {found}")]
    TypeMismatch {
        expected: String,
        found: Type,
        location: String,
    },
}

/// Variable bindings (innermost last) and the oracle signature table.
#[derive(Clone, Debug, Default)]
pub struct TypingContext {
    vars: Vec<(String, Type)>,
    oracles: BTreeMap<String, Type>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_oracles(oracles: BTreeMap<String, Type>) -> Self {
        TypingContext { vars: Vec::new(), oracles }
    }

    pub fn bind(mut self, name: &str, ty: Type) -> Self {
        self.vars.push((name.to_string(), ty));
        self
    }

    pub fn declare_oracle(&mut self, name: &str, ty: Type) {
        self.oracles.insert(name.to_string(), ty);
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn oracle(&self, name: &str) -> Option<&Type> {
        self.oracles.get(name)
    }

    pub fn vars(&self) -> &[(String, Type)] {
        &self.vars
    }
}

/// Infers the type of `t` under `ctx`.
pub fn typecheck(t: &Term, ctx: &TypingContext) -> Result<Type, TypeError> {
    let mut scope = ctx.vars.clone();
    infer(t, &mut scope, &ctx.oracles)
}

fn infer(
    t: &Term,
    scope: &mut Vec<(String, Type)>,
    oracles: &BTreeMap<String, Type>,
) -> Result<Type, TypeError> {
    match t {
        Term::Zero => Ok(Type::Base),
        Term::Suc | Term::Pred => Ok(Type::nat_fn()),
        Term::Case => Ok(Type::curried([Type::Base, Type::Base, Type::Base], Type::Base)),
        Term::Oracle(name) => oracles
            .get(name)
            .cloned()
            .ok_or_else(|| TypeError::UnknownOracle { name: name.clone() }),
        Term::Const(c) => Ok(c.ty()),
        Term::Var(x) => scope
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, ty)| ty.clone())
            .ok_or_else(|| TypeError::UnboundVariable { name: x.clone() }),
        Term::App(f, a) => {
            let fty = infer(f, scope, oracles)?;
            let aty = infer(a, scope, oracles)?;
            match fty {
                Type::Arrow(dom, cod) if *dom == aty => Ok(*cod),
                Type::Arrow(dom, _) => Err(TypeError::TypeMismatch {
                    expected: dom.to_string(),
                    found: aty,
                    location: pretty(t),
                }),
                Type::Base => Err(TypeError::TypeMismatch {
                    expected: format!("{aty} -> _"),
                    found: Type::Base,
                    location: pretty(t),
                }),
            }
        }
        Term::Lam(x, ty, body) => {
            scope.push((x.clone(), ty.clone()));
            let r = infer(body, scope, oracles);
            scope.pop();
            Ok(Type::arrow(ty.clone(), r?))
        }
        Term::Fix(x, ty, body) => {
            scope.push((x.clone(), ty.clone()));
            let r = infer(body, scope, oracles);
            scope.pop();
            let bty = r?;
            if bty == *ty {
                Ok(bty)
            } else {
                Err(TypeError::TypeMismatch {
                    expected: ty.to_string(),
                    found: bty,
                    location: pretty(t),
                })
            }
        }
    }
}
