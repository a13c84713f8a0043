use super::{
    Answer, Blocked, ModelKind, OracleConfig, OraclePlugin, QueryArg, QueryHandle, Response,
};
use crate::syntax::Type;

const DEFAULT_SEARCH_BOUND: u64 = 1000;
const DEFAULT_PROMISED_DEPTH: u64 = 6;
/// Keeps `2^d` queries within reach.
const MAX_PROMISED_DEPTH: u64 = 20;

fn type2() -> Type {
    Type::arrow(Type::nat_fn(), Type::Base)
}

fn search_bound(q: &dyn QueryHandle, config: &OracleConfig) -> Result<(u64, bool), Blocked> {
    match q.model() {
        ModelKind::Finite { bound } => Ok((bound as u64, true)),
        ModelKind::Infinite => config
            .get_u64("searchBound", DEFAULT_SEARCH_BOUND)
            .map(|b| (b, false))
            .map_err(|e| Blocked { reason: e.to_string() }),
    }
}

/// Scans `f(0), f(1), ...` for the first zero.
fn first_zero(q: &mut dyn QueryHandle, bound: u64) -> Result<Option<u64>, Blocked> {
    for n in 0..=bound {
        if q.ask(0, &[QueryArg::Nat(n)])? == 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `exists2(f) = 0` iff `f` has a zero, `1` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Exists2;

impl OraclePlugin for Exists2 {
    fn name(&self) -> &str {
        "exists2"
    }

    fn signature(&self) -> Type {
        type2()
    }

    fn answer(&self, q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Response, Blocked> {
        let (bound, exact) = search_bound(q, config)?;
        Ok(match first_zero(q, bound)? {
            Some(_) => Response::exact(0),
            None if exact => Response::exact(1),
            None => Response::approximate(1),
        })
    }
}

/// Least zero of `f`, or `0` if there is none.
#[derive(Debug, Clone, Copy)]
pub struct Mu;

impl OraclePlugin for Mu {
    fn name(&self) -> &str {
        "mu"
    }

    fn signature(&self) -> Type {
        type2()
    }

    fn answer(&self, q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Response, Blocked> {
        let (bound, exact) = search_bound(q, config)?;
        Ok(match first_zero(q, bound)? {
            Some(n) => Response::exact(n),
            None if exact => Response::exact(0),
            None => Response::approximate(0),
        })
    }
}

/// Binary prefixes probed by the emptiness oracles, in lexicographic order.
fn probes(q: &dyn QueryHandle, config: &OracleConfig) -> Result<Vec<QueryArg>, Blocked> {
    let depth = match q.model() {
        ModelKind::Finite { bound } => bound as u64 + 1,
        ModelKind::Infinite => config
            .get_u64("promisedDepth", DEFAULT_PROMISED_DEPTH)
            .map_err(|e| Blocked { reason: e.to_string() })?,
    };
    if depth > MAX_PROMISED_DEPTH {
        return Err(Blocked {
            reason: format!("promisedDepth {depth} exceeds {MAX_PROMISED_DEPTH}"),
        });
    }
    Ok((0u64..1 << depth)
        .map(|k| {
            QueryArg::Seq((0..depth).map(|i| (k >> (depth - 1 - i)) & 1).collect())
        })
        .collect())
}

fn members(q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Vec<QueryArg>, Blocked> {
    let mut out = Vec::new();
    for p in probes(q, config)? {
        if q.ask(0, std::slice::from_ref(&p))? != 0 {
            out.push(p);
        }
    }
    Ok(out)
}

/// Emptiness of a subset of Cantor space given by its characteristic
/// functional, under the promise that membership depends only on the first
/// `promisedDepth` bits. Violations of the promise go undetected.
#[derive(Debug, Clone, Copy)]
pub struct OmegaC;

impl OraclePlugin for OmegaC {
    fn name(&self) -> &str {
        "omegaC"
    }

    fn signature(&self) -> Type {
        Type::arrow(type2(), Type::Base)
    }

    fn answer(&self, q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Response, Blocked> {
        let found = members(q, config)?;
        Ok(Response::exact(u64::from(!found.is_empty())))
    }
}

/// As [`OmegaC`], for sets with at most one element; reports a violation
/// when it finds two.
#[derive(Debug, Clone, Copy)]
pub struct OmegaB;

impl OraclePlugin for OmegaB {
    fn name(&self) -> &str {
        "omegaB"
    }

    fn signature(&self) -> Type {
        Type::arrow(type2(), Type::Base)
    }

    fn answer(&self, q: &mut dyn QueryHandle, config: &OracleConfig) -> Result<Response, Blocked> {
        let found = members(q, config)?;
        if found.len() > 1 {
            return Ok(Response {
                answer: Answer::PromiseViolation(format!(
                    "members {} and {} both found",
                    found[0], found[1]
                )),
                approximate: false,
            });
        }
        Ok(Response::exact(u64::from(!found.is_empty())))
    }
}
