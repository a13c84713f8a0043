//! The `.eff` text format: one named object per line.
//!
//! ```text
//! # comment
//! x = clopen {depth: 2, leaves: [01, 10]}
//! o = intervals [[0, 1/2, co], [3/4, 1, cc]]
//! f = step {breaks: [0, 1/2, 1], pieces: [1, 0], points: [1, 0, 0]}
//! ```
//!
//! Rationals are written `p/q` or as integers. A leaf is a string of bits,
//! `-` for the empty leaf of the full set at depth 0. Interval flags give
//! the left and right ends, `c` closed and `o` open. Objects must be given
//! in normal form; the error for a non-normal one quotes the normal form.

use std::fmt;
use std::str::FromStr;

use super::{parse_bits, ClopenCantorSet, EffError, Interval, Rat, RatIntervalUnion, StepFunction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffValue {
    Clopen(ClopenCantorSet),
    Intervals(RatIntervalUnion),
    Step(StepFunction),
}

impl EffValue {
    pub fn kind(&self) -> &'static str {
        match self {
            EffValue::Clopen(_) => "clopen",
            EffValue::Intervals(_) => "intervals",
            EffValue::Step(_) => "step",
        }
    }
}

impl fmt::Display for EffValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffValue::Clopen(c) => c.fmt(f),
            EffValue::Intervals(u) => u.fmt(f),
            EffValue::Step(s) => s.fmt(f),
        }
    }
}

/// Named objects in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EffFile {
    pub entries: Vec<(String, EffValue)>,
}

impl EffFile {
    pub fn get(&self, name: &str) -> Option<&EffValue> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl fmt::Display for EffFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.entries {
            writeln!(f, "{name} = {v}")?;
        }
        Ok(())
    }
}

impl FromStr for EffFile {
    type Err = EffError;

    fn from_str(s: &str) -> Result<Self, EffError> {
        parse_file(s)
    }
}

pub fn parse_file(src: &str) -> Result<EffFile, EffError> {
    let mut entries: Vec<(String, EffValue)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let err = |message: String| EffError::Parse { line, message };
        let (name, rest) = text.split_once('=').ok_or_else(|| err("expected `name = value`".into()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(format!("bad name `{name}`")));
        }
        if entries.iter().any(|(n, _)| n == name) {
            return Err(err(format!("`{name}` defined twice")));
        }
        let value = parse_value(rest).map_err(|e| match e {
            EffError::Parse { message, .. } => err(message),
            other => err(other.to_string()),
        })?;
        entries.push((name.to_string(), value));
    }
    Ok(EffFile { entries })
}

/// Parses a single object.
pub fn parse_value(src: &str) -> Result<EffValue, EffError> {
    let mut p = Parser { toks: tokenize(src), pos: 0 };
    let v = match p.word()?.as_str() {
        "clopen" => {
            p.expect("{")?;
            p.key("depth")?;
            let depth: usize = p.word()?.parse().map_err(|_| p.fail("a depth"))?;
            p.expect(",")?;
            p.key("leaves")?;
            let leaves = p.list(|p| {
                let w = p.word()?;
                parse_bits(&w).ok_or_else(|| p.fail("a bit string"))
            })?;
            p.expect("}")?;
            EffValue::Clopen(ClopenCantorSet::new_canonical(depth, leaves)?)
        }
        "intervals" => {
            let parts = p.list(|p| {
                p.expect("[")?;
                let lo = p.rat()?;
                p.expect(",")?;
                let hi = p.rat()?;
                p.expect(",")?;
                let flags = p.word()?;
                let flag = |c: char| match c {
                    'c' => Some(true),
                    'o' => Some(false),
                    _ => None,
                };
                let mut cs = flags.chars();
                let (Some(l), Some(r), None) = (cs.next().and_then(flag), cs.next().and_then(flag), cs.next()) else {
                    return Err(p.fail("flags such as `cc` or `co`"));
                };
                p.expect("]")?;
                Ok(Interval::new(lo, hi, l, r))
            })?;
            EffValue::Intervals(RatIntervalUnion::new_normalized(parts)?)
        }
        "step" => {
            p.expect("{")?;
            p.key("breaks")?;
            let breaks = p.list(Parser::rat)?;
            p.expect(",")?;
            p.key("pieces")?;
            let pieces = p.list(Parser::rat)?;
            p.expect(",")?;
            p.key("points")?;
            let points = p.list(Parser::rat)?;
            p.expect("}")?;
            EffValue::Step(StepFunction::new(breaks, pieces, points)?)
        }
        other => {
            return Err(EffError::Parse {
                line: 1,
                message: format!("expected clopen, intervals or step, found `{other}`"),
            })
        }
    };
    if p.pos < p.toks.len() {
        return Err(p.fail("end of line"));
    }
    Ok(v)
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if "{}[],:".contains(c) || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Parser {
    toks: Vec<String>,
    pos: usize,
}

impl Parser {
    fn fail(&self, expected: &str) -> EffError {
        let found = self.toks.get(self.pos.saturating_sub(1)).map_or("end of line", String::as_str);
        EffError::Parse { line: 1, message: format!("expected {expected} near `{found}`") }
    }

    fn next(&mut self) -> Option<&str> {
        let t = self.toks.get(self.pos)?;
        self.pos += 1;
        Some(t)
    }

    fn word(&mut self) -> Result<String, EffError> {
        match self.next() {
            Some(t) if !"{}[],:".contains(t) => Ok(t.to_string()),
            _ => Err(self.fail("a word")),
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), EffError> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => Err(self.fail(&format!("`{tok}`"))),
        }
    }

    fn key(&mut self, k: &str) -> Result<(), EffError> {
        match self.next() {
            Some(t) if t == k => self.expect(":"),
            _ => Err(self.fail(&format!("`{k}:`"))),
        }
    }

    fn rat(&mut self) -> Result<Rat, EffError> {
        let w = self.word()?;
        Rat::from_str(&w).map_err(|_| self.fail("a rational p/q"))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, EffError>) -> Result<Vec<T>, EffError> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.toks.get(self.pos).map(String::as_str) == Some("]") {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.next() {
                Some(",") => {}
                Some("]") => return Ok(out),
                _ => return Err(self.fail("`,` or `]`")),
            }
        }
    }
}
