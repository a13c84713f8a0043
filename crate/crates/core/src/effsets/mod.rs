//! Exact, finitely presented objects: clopen subsets of Cantor space, finite
//! unions of rational intervals in `[0, 1]`, and rational step functions on
//! `[0, 1]`. All arithmetic is on big rationals.

mod clopen;
mod intervals;
mod step;
pub mod text;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use clopen::{compile_clopen_to_term, ClopenCantorSet};
pub use intervals::{Interval, RatIntervalUnion};
pub use step::StepFunction;

pub type Rat = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EffError {
    #[error("the set is empty")]
    EmptySet,
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("input is not normalized; normalized form: {hint}")]
    NotNormalized { hint: String },
    #[error("depth {depth} exceeds the limit {limit}")]
    LimitExceeded { depth: usize, limit: usize },
    #[error("sets are not nested at index {index}")]
    NestingViolated { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A bit string written as `0`/`1` characters, `-` when empty.
pub fn bits_to_string(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "-".into();
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    if s == "-" {
        return Some(Vec::new());
    }
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}
