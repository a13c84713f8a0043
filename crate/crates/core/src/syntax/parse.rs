use std::fmt;

use super::{Term, Type};

/// Largest numeral literal accepted; literals expand to nested `suc`.
const MAX_NUMERAL: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" | "),
            self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Oracle(String),
    Backslash,
    Colon,
    Dot,
    Arrow,
    LParen,
    RParen,
    Suc,
    Pred,
    Case,
    Fix,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "numeral `{n}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Oracle(s) => write!(f, "oracle `#{s}`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Suc => f.write_str("`suc`"),
            Tok::Pred => f.write_str("`pred`"),
            Tok::Case => f.write_str("`case`"),
            Tok::Fix => f.write_str("`fix`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, found: String, expected: &[&str]| ParseError {
        line,
        col,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '\\' => Some(Tok::Backslash),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Spanned { tok: Tok::Arrow, line: l0, col: c0 });
                i += 2;
                col += 2;
                continue;
            }
            return Err(err(l0, c0, "`-`".into(), &["`->`", "`--`"]));
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let n = text
                .parse::<u64>()
                .ok()
                .filter(|n| *n <= MAX_NUMERAL)
                .ok_or_else(|| {
                    err(
                        l0,
                        c0,
                        format!("numeral `{text}`"),
                        &["a numeral no larger than 65536"],
                    )
                })?;
            out.push(Spanned { tok: Tok::Num(n), line: l0, col: c0 });
            continue;
        }
        if c == '#' || is_ident_start(c) {
            let oracle = c == '#';
            let start = if oracle { i + 1 } else { i };
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            if j == start || !is_ident_start(chars[start]) {
                return Err(err(l0, c0 + 1, "`#`".into(), &["an oracle name"]));
            }
            let text: String = chars[start..j].iter().collect();
            col += j - i;
            i = j;
            let tok = if oracle {
                Tok::Oracle(text)
            } else {
                match text.as_str() {
                    "suc" => Tok::Suc,
                    "pred" => Tok::Pred,
                    "case" => Tok::Case,
                    "fix" => Tok::Fix,
                    _ => Tok::Ident(text),
                }
            };
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        return Err(err(l0, c0, format!("`{c}`"), &["a term"]));
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let here = &self.toks[self.pos];
        Err(ParseError {
            line: here.line,
            col: here.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = match self.peek() {
            Tok::Num(0) => {
                self.bump();
                Type::Base
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                t
            }
            _ => return self.fail(&["`0`", "`(`"]),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            let cod = self.ty()?;
            Ok(Type::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn binder(&mut self) -> Result<(String, Type, Term), ParseError> {
        let x = self.ident()?;
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.ty()?;
        self.expect(Tok::Dot, "`.`")?;
        let body = self.term()?;
        Ok((x, ty, body))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc: Option<Term> = None;
        loop {
            let next = match self.peek() {
                Tok::Backslash => {
                    self.bump();
                    let (x, ty, body) = self.binder()?;
                    Some((Term::Lam(x, ty, Box::new(body)), true))
                }
                Tok::Fix => {
                    self.bump();
                    let (x, ty, body) = self.binder()?;
                    Some((Term::Fix(x, ty, Box::new(body)), true))
                }
                _ => self.atom()?.map(|t| (t, false)),
            };
            match next {
                Some((t, last)) => {
                    acc = Some(match acc {
                        None => t,
                        Some(f) => Term::app(f, t),
                    });
                    if last {
                        break;
                    }
                }
                None => break,
            }
        }
        match acc {
            Some(t) => Ok(t),
            None => self.fail(&[
                "numeral", "identifier", "`suc`", "`pred`", "`case`", "oracle", "`\\`", "`fix`",
                "`(`",
            ]),
        }
    }

    fn atom(&mut self) -> Result<Option<Term>, ParseError> {
        let t = match self.peek().clone() {
            Tok::Num(n) => Term::numeral(n),
            Tok::Ident(x) => Term::Var(x),
            Tok::Oracle(x) => Term::Oracle(x),
            Tok::Suc => Term::Suc,
            Tok::Pred => Term::Pred,
            Tok::Case => Term::Case,
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Some(t));
            }
            _ => return Ok(None),
        };
        self.bump();
        Ok(Some(t))
    }
}

/// Parses a program in the surface syntax.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input", "an argument"]);
    }
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input", "`->`"]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse("0").unwrap(), Term::Zero);
        assert_eq!(
            parse("3").unwrap(),
            Term::app(Term::Suc, Term::app(Term::Suc, Term::app(Term::Suc, Term::Zero)))
        );
    }

    #[test]
    fn lambda_with_arrow_annotation() {
        let t = parse("(\\x:0 -> 0. x 0)").unwrap();
        assert_eq!(
            t,
            Term::lam("x", Type::nat_fn(), Term::app(Term::var("x"), Term::Zero))
        );
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse("case 0 1 x").unwrap();
        assert_eq!(
            t,
            Term::apps(Term::Case, [Term::Zero, Term::numeral(1), Term::var("x")])
        );
    }

    #[test]
    fn trailing_binder_argument_and_comments() {
        let t = parse("#mu \\n:0. n -- the identity\n").unwrap();
        assert_eq!(
            t,
            Term::app(Term::oracle("mu"), Term::lam("n", Type::Base, Term::var("n")))
        );
        let t = parse("fix x:0. suc x").unwrap();
        assert_eq!(t, Term::fix("x", Type::Base, Term::app(Term::Suc, Term::var("x"))));
    }

    #[test]
    fn types_are_right_associative() {
        assert_eq!(
            parse_type("0 -> 0 -> 0").unwrap(),
            Type::arrow(Type::Base, Type::nat_fn())
        );
        assert_eq!(
            parse_type("(0 -> 0) -> 0").unwrap(),
            Type::arrow(Type::nat_fn(), Type::Base)
        );
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse("(\\x:0. x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 9));
        assert!(e.expected.contains(&"`)`".to_string()));

        let e = parse("\n  \\x:1. x").unwrap_err();
        assert_eq!((e.line, e.col), (2, 6));

        let e = parse("").unwrap_err();
        assert_eq!(e.found, "end of input");

        assert!(parse("0 )").is_err());
        assert!(parse("# x").is_err());
        assert!(parse("99999999").is_err());
    }
}
