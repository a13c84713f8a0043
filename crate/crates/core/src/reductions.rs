//! Constructions that compute one object from an oracle for another, at
//! desk scale: codes for open sets, suprema of upper semicontinuous
//! functions, selection from clopen sets, Moreau envelopes, Urysohn
//! functions, measures by bisection, points of nested intersections and
//! continuity by oscillation.
//!
//! Where a construction consults an oracle, it does so through an explicit
//! argument (an emptiness test, a selector) rather than by inspecting its
//! input directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::effsets::{
    compile_clopen_to_term, int, ClopenCantorSet, EffError, Interval, Rat, RatIntervalUnion, StepFunction,
};
use crate::optree::{eval_op, Model, Outcome};
use crate::oracles::OracleTable;
use crate::syntax::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Eff(#[from] EffError),
    #[error("the function is not upper semicontinuous")]
    NotUsco,
    #[error("{which} is not closed")]
    NotClosed { which: &'static str },
    #[error("{which} is empty")]
    EmptyInput { which: &'static str },
    #[error("the sets meet at {point}")]
    Overlap { point: Rat },
    #[error("oracle gave no answer: {0}")]
    Oracle(String),
}

/// Decides emptiness of clopen sets.
pub trait ClopenEmptiness {
    fn is_empty(&mut self, x: &ClopenCantorSet) -> Result<bool, ReductionError>;
}

/// Reads emptiness off the representation.
#[derive(Debug, Default, Clone, Copy)]
pub struct DirectEmptiness;

impl ClopenEmptiness for DirectEmptiness {
    fn is_empty(&mut self, x: &ClopenCantorSet) -> Result<bool, ReductionError> {
        Ok(x.is_empty())
    }
}

/// Asks `#omegaC` about the compiled characteristic function, through the
/// evaluator in the infinite model.
#[derive(Debug, Clone)]
pub struct EvaluatorEmptiness {
    pub fuel: u64,
    pub depth_limit: usize,
}

impl Default for EvaluatorEmptiness {
    fn default() -> Self {
        EvaluatorEmptiness { fuel: 1_000_000, depth_limit: 12 }
    }
}

impl ClopenEmptiness for EvaluatorEmptiness {
    fn is_empty(&mut self, x: &ClopenCantorSet) -> Result<bool, ReductionError> {
        match omega_on_clopen("omegaC", x, self.depth_limit, self.fuel)? {
            Outcome::Value(v) => Ok(v == 0),
            other => Err(ReductionError::Oracle(other.to_string())),
        }
    }
}

/// Runs `#name` (one of the emptiness oracles) on the compiled
/// characteristic function of `x`, promising the depth of `x`.
pub fn omega_on_clopen(name: &str, x: &ClopenCantorSet, depth_limit: usize, fuel: u64) -> Result<Outcome, ReductionError> {
    let chi = compile_clopen_to_term(x, depth_limit)?;
    let mut oracles = OracleTable::with_builtins();
    oracles
        .set_config(name, "promisedDepth", &x.depth().to_string())
        .map_err(|e| ReductionError::Oracle(e.to_string()))?;
    let t = Term::app(Term::oracle(name), chi);
    Ok(eval_op(&t, &Model::Infinite, &oracles, fuel).outcome)
}

/// Rationals in `[0, 1]` with denominator at most `d`, increasing.
pub fn farey(d: u64) -> Vec<Rat> {
    let mut v: Vec<Rat> = (1..=d.max(1))
        .flat_map(|q| (0..=q).map(move |p| Rat::new(BigInt::from(p), BigInt::from(q))))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// All pairs `p < q` of rationals with denominator at most `d` such that
/// `(p, q)` lies inside `o`, in lexicographic order.
pub fn rm_code_open(o: &RatIntervalUnion, d: u64) -> Vec<(Rat, Rat)> {
    let grid = farey(d);
    let mut out = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        for q in &grid[i + 1..] {
            // a normalized union leaves a point out between any two parts
            if o.parts().iter().any(|part| part.lo <= *p && *q <= part.hi) {
                out.push((p.clone(), q.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupResult {
    pub value: Rat,
    /// Each threshold `r` asked about, with whether `{f >= r}` was empty.
    pub transcript: Vec<(Rat, bool)>,
}

/// The supremum of an upper semicontinuous `f` to within `2^-k`, found by
/// bisection on the emptiness of the closed sets `{f >= r}`. The returned
/// value never exceeds the supremum.
pub fn sup_usco(f: &StepFunction, k: u32) -> Result<SupResult, ReductionError> {
    if !f.is_usco() {
        return Err(ReductionError::NotUsco);
    }
    sup_by_emptiness(f.eval(&int(0)), k, |r| f.superlevel(r).is_empty())
}

/// Bisection from a value `lo` known to be attained, using a test for the
/// emptiness of `{f >= r}`.
pub fn sup_by_emptiness(mut lo: Rat, k: u32, mut empty: impl FnMut(&Rat) -> bool) -> Result<SupResult, ReductionError> {
    let mut transcript = Vec::new();
    let mut ask = |r: &Rat, t: &mut Vec<(Rat, bool)>| {
        let e = empty(r);
        t.push((r.clone(), e));
        e
    };
    let mut step = Rat::one();
    let mut hi = &lo + &step;
    while !ask(&hi, &mut transcript) {
        lo = hi;
        step *= int(2);
        hi = &lo + &step;
    }
    let width = Rat::new(BigInt::one(), BigInt::one() << k);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / int(2);
        if ask(&mid, &mut transcript) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SupResult { value: lo, transcript })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// First `depth` bits; the rest are zero.
    pub point: Vec<bool>,
    pub queries: usize,
}

/// The lexicographically least member of a non-empty `x`, bit by bit: keep
/// to the 0-branch unless the emptiness test rules it out.
pub fn select_clopen(x: &ClopenCantorSet, tester: &mut dyn ClopenEmptiness) -> Result<Selection, ReductionError> {
    if x.is_empty() {
        return Err(EffError::EmptySet.into());
    }
    let mut point = Vec::with_capacity(x.depth());
    let mut queries = 0;
    for _ in 0..x.depth() {
        let mut left = point.clone();
        left.push(false);
        queries += 1;
        let go_right = tester.is_empty(&x.intersect(&ClopenCantorSet::cell(&left)))?;
        point.push(go_right);
    }
    Ok(Selection { point, queries })
}

/// `f_n(x) = sup_y f(y) - n|x - y|`. The supremum is over finitely many
/// candidates: each breakpoint value, and each open piece at its point
/// nearest to `x`.
pub fn moreau_env(f: &StepFunction, n: u64, x: &Rat) -> Rat {
    let n = int(n as i64);
    let b = f.breaks();
    let points = b.iter().zip(f.points()).map(|(q, w)| w - &n * (x - q).abs());
    let pieces = f.pieces().iter().enumerate().map(|(i, v)| {
        let d = Interval::closed(b[i].clone(), b[i + 1].clone()).distance(x);
        v - &n * d
    });
    points.chain(pieces).max().expect("at least two breakpoints")
}

/// `d(x, c0) / (d(x, c0) + d(x, c1))` for disjoint non-empty closed `c0`,
/// `c1`: zero exactly on `c0`, one exactly on `c1`.
pub fn urysohn(c0: &RatIntervalUnion, c1: &RatIntervalUnion, x: &Rat) -> Result<Rat, ReductionError> {
    check_urysohn(c0, c1)?;
    let d0 = c0.distance(x)?;
    let d1 = c1.distance(x)?;
    Ok(&d0 / (&d0 + &d1))
}

pub fn check_urysohn(c0: &RatIntervalUnion, c1: &RatIntervalUnion) -> Result<(), ReductionError> {
    for (c, which) in [(c0, "C0"), (c1, "C1")] {
        if c.is_empty() {
            return Err(ReductionError::EmptyInput { which });
        }
        if !c.is_closed() {
            return Err(ReductionError::NotClosed { which });
        }
    }
    if let Some(p) = c0.intersect(c1).parts().first() {
        return Err(ReductionError::Overlap { point: p.lo.clone() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub enum Measurable<'a> {
    Clopen(&'a ClopenCantorSet),
    /// A closed subset of `[0, 1]`.
    Closed(&'a RatIntervalUnion),
}

/// `l_n`: the total length of the depth-`n` dyadic cells that meet the set
/// in positive measure. Non-increasing in `n`, never below the measure.
pub fn measure_bisect(c: Measurable<'_>, n: u32) -> Result<Rat, ReductionError> {
    let cells = BigInt::one() << n;
    let cell_len = Rat::new(BigInt::one(), cells.clone());
    let count: u64 = match c {
        Measurable::Clopen(x) => {
            let mut count = 0;
            for j in 0u64..1 << n {
                let prefix: Vec<bool> = (0..n).map(|i| (j >> (n - 1 - i)) & 1 == 1).collect();
                if x.intersect(&ClopenCantorSet::cell(&prefix)).measure().is_positive() {
                    count += 1;
                }
            }
            count
        }
        Measurable::Closed(u) => {
            if !u.is_closed() {
                return Err(ReductionError::NotClosed { which: "C" });
            }
            let mut count = 0;
            for j in 0u64..1 << n {
                let lo = Rat::new(BigInt::from(j), cells.clone());
                let cell = Interval::closed(lo.clone(), lo + &cell_len);
                if u.intersect_interval(&cell).measure().is_positive() {
                    count += 1;
                }
            }
            count
        }
    };
    Ok(cell_len * int(count as i64))
}

/// A point in every set of a nested sequence of non-empty clopen sets.
pub fn cantor_intersection(cs: &[ClopenCantorSet], tester: &mut dyn ClopenEmptiness) -> Result<Vec<bool>, ReductionError> {
    for (i, c) in cs.iter().enumerate() {
        if c.is_empty() {
            return Err(EffError::EmptySet.into());
        }
        if i > 0 && !c.is_subset(&cs[i - 1]) {
            return Err(EffError::NestingViolated { index: i }.into());
        }
    }
    match cs.last() {
        None => Ok(Vec::new()),
        Some(last) => Ok(select_clopen(last, tester)?.point),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    /// `witness` is in `D_k = {x : osc_f(x) >= 2^-k}` and `k` is the least
    /// such exponent.
    Discontinuous { witness: Rat, osc: Rat, k: u32 },
}

/// Continuity of a step function from the finite set of points of positive
/// oscillation. The witness is a point of greatest oscillation.
pub fn decide_continuity_via_osc(f: &StepFunction) -> Continuity {
    let best = f
        .breaks()
        .iter()
        .map(|x| (f.osc_point(x), x))
        .filter(|(o, _)| o.is_positive())
        .max_by(|a, b| a.0.cmp(&b.0));
    match best {
        None => Continuity::Continuous,
        Some((osc, x)) => {
            let mut k = 0;
            while osc < Rat::new(BigInt::one(), BigInt::one() << k) {
                k += 1;
            }
            Continuity::Discontinuous { witness: x.clone(), osc, k }
        }
    }
}

/// Least common multiple of `1..=d`.
pub fn lcm_upto(d: u64) -> BigInt {
    (1..=d).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}
