use super::{Constant, OracleArg, Term};

#[derive(Clone, Copy, Debug, Default)]
pub struct PrettyOptions {
    /// Print `suc (suc 0)` as `2`.
    pub numerals: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    Fun,
    Arg,
}

pub fn pretty(t: &Term) -> String {
    pretty_with(t, PrettyOptions::default())
}

pub fn pretty_with(t: &Term, opts: PrettyOptions) -> String {
    let mut out = String::new();
    go(t, Pos::Top, opts, &mut out);
    out
}

fn go(t: &Term, pos: Pos, opts: PrettyOptions, out: &mut String) {
    if opts.numerals {
        if let Some(n) = t.as_numeral() {
            out.push_str(&n.to_string());
            return;
        }
    }
    match t {
        Term::Zero => out.push('0'),
        Term::Suc => out.push_str("suc"),
        Term::Pred => out.push_str("pred"),
        Term::Case => out.push_str("case"),
        Term::Oracle(name) => {
            out.push('#');
            out.push_str(name);
        }
        Term::Var(x) => out.push_str(x),
        Term::Const(c) => constant(c, opts, out),
        Term::App(f, a) => {
            let paren = pos == Pos::Arg;
            if paren {
                out.push('(');
            }
            go(f, Pos::Fun, opts, out);
            out.push(' ');
            go(a, Pos::Arg, opts, out);
            if paren {
                out.push(')');
            }
        }
        Term::Lam(x, ty, body) | Term::Fix(x, ty, body) => {
            out.push('(');
            out.push_str(if matches!(t, Term::Lam(..)) { "\\" } else { "fix " });
            out.push_str(x);
            out.push(':');
            out.push_str(&ty.to_string());
            out.push_str(". ");
            go(body, Pos::Top, opts, out);
            out.push(')');
        }
    }
}

fn constant(c: &Constant, opts: PrettyOptions, out: &mut String) {
    match c {
        Constant::Num(n) => out.push_str(&n.to_string()),
        Constant::Total(e, _) => {
            out.push('{');
            out.push_str(&e.to_string());
            out.push('}');
        }
        Constant::Partial(p) => {
            out.push_str("{#");
            out.push_str(&p.oracle);
            for a in &p.args {
                out.push(' ');
                match a {
                    OracleArg::Total(e) => out.push_str(&e.to_string()),
                    OracleArg::Term(t) => go(t, Pos::Arg, opts, out),
                }
            }
            out.push('}');
        }
    }
}
