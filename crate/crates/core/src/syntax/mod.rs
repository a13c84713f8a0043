//! Terms and types of the language: `0`, `suc`, `pred`, `case`, oracle
//! constants, variables, application, abstraction and `fix`.
//!
//! Besides the surface constructs a term may carry a [`Constant`]: a natural
//! number standing for itself, a total functional of the finite model, or an
//! oracle applied to some of its arguments. These never come out of the
//! parser; the computation-tree builder introduces them when it forms the
//! predecessors of an oracle application.

mod parse;
mod pretty;
mod subst;
mod typecheck;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::domains::TotalElement;

pub use parse::{parse, parse_type, ParseError};
pub use pretty::{pretty, pretty_with, PrettyOptions};
pub use subst::{fresh_name, substitute};
pub use typecheck::{typecheck, TypeError, TypingContext};

/// Finite types: the base type `0` and arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Base,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    /// `0 -> 0`.
    pub fn nat_fn() -> Type {
        Type::arrow(Type::Base, Type::Base)
    }

    /// Builds `a1 -> a2 -> ... -> result`.
    pub fn curried<I>(args: I, result: Type) -> Type
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Base)
    }

    pub fn rank(&self) -> usize {
        match self {
            Type::Base => 0,
            Type::Arrow(d, c) => (d.rank() + 1).max(c.rank()),
        }
    }

    /// Number of arrows along the spine.
    pub fn arity(&self) -> usize {
        match self {
            Type::Base => 0,
            Type::Arrow(_, c) => 1 + c.arity(),
        }
    }

    /// Total number of arrows anywhere in the type.
    pub fn arrows(&self) -> usize {
        match self {
            Type::Base => 0,
            Type::Arrow(d, c) => 1 + d.arrows() + c.arrows(),
        }
    }

    /// Argument types along the spine; every type ends in `0`.
    pub fn spine(&self) -> Vec<&Type> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Type::Arrow(d, c) = cur {
            out.push(d.as_ref());
            cur = c;
        }
        out
    }

    pub fn split(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Base => None,
            Type::Arrow(d, c) => Some((d, c)),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base => write!(f, "0"),
            Type::Arrow(d, c) => {
                if d.is_base() {
                    write!(f, "0 -> {c}")
                } else {
                    write!(f, "({d}) -> {c}")
                }
            }
        }
    }
}

impl FromStr for Type {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}

/// An argument already supplied to an oracle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OracleArg {
    /// A total functional of the finite model (the assembled `Psi`).
    Total(TotalElement),
    /// A closed term, queried on demand (infinite model).
    Term(Term),
}

/// An oracle together with the arguments it has received so far.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialApp {
    pub oracle: String,
    pub args: Vec<OracleArg>,
    /// Type of the remaining functional.
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    /// A natural number, a constant for itself.
    Num(u64),
    /// A total functional of the finite model.
    Total(TotalElement, Type),
    /// An oracle applied to a prefix of its arguments.
    Partial(PartialApp),
}

impl Constant {
    pub fn ty(&self) -> Type {
        match self {
            Constant::Num(_) => Type::Base,
            Constant::Total(_, ty) => ty.clone(),
            Constant::Partial(p) => p.ty.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    Suc,
    Pred,
    Case,
    Oracle(String),
    Const(Constant),
    Var(String),
    App(Box<Term>, Box<Term>),
    Lam(String, Type, Box<Term>),
    Fix(String, Type, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn oracle(name: &str) -> Term {
        Term::Oracle(name.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn fix(x: &str, ty: Type, body: Term) -> Term {
        Term::Fix(x.to_string(), ty, Box::new(body))
    }

    /// `suc` applied `n` times to `0`.
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::app(Term::Suc, t))
    }

    /// Recognises `suc (suc ... 0)`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut cur = self;
        loop {
            match cur {
                Term::Zero => return Some(n),
                Term::App(f, a) if matches!(**f, Term::Suc) => {
                    n += 1;
                    cur = a;
                }
                _ => return None,
            }
        }
    }

    /// Number of syntax nodes (applications and binders included).
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, _, b) | Term::Fix(_, _, b) => 1 + b.size(),
            _ => 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
            Term::Lam(y, _, b) | Term::Fix(y, _, b) => y != x && b.has_free(x),
            _ => false,
        }
    }

    /// Splits an iterated application `t1 t2 ... tn` into its head and
    /// arguments. The head is never an application.
    pub fn head_decompose(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Lam(x, _, b) | Term::Fix(x, _, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        _ => {}
    }
}

fn alpha<'a>(
    l: &'a Term,
    r: &'a Term,
    lenv: &mut Vec<&'a str>,
    renv: &mut Vec<&'a str>,
) -> bool {
    match (l, r) {
        (Term::Var(x), Term::Var(y)) => {
            let li = lenv.iter().rposition(|v| *v == x);
            let ri = renv.iter().rposition(|v| *v == y);
            match (li, ri) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha(f1, f2, lenv, renv) && alpha(a1, a2, lenv, renv)
        }
        (Term::Lam(x, s, b1), Term::Lam(y, t, b2)) | (Term::Fix(x, s, b1), Term::Fix(y, t, b2)) => {
            if s != t {
                return false;
            }
            lenv.push(x);
            renv.push(y);
            let eq = alpha(b1, b2, lenv, renv);
            lenv.pop();
            renv.pop();
            eq
        }
        _ => l == r,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}
