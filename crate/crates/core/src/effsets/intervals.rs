use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use super::{int, EffError, Rat};

/// An interval in `[0, 1]` with rational endpoints; each end open or closed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: Rat, hi: Rat) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: Rat) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    pub fn length(&self) -> Rat {
        if self.is_empty() {
            Rat::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval { lo, hi, lo_closed, hi_closed }
    }

    /// Distance from `x` to the closure.
    pub fn distance(&self, x: &Rat) -> Rat {
        if *x < self.lo {
            &self.lo - x
        } else if *x > self.hi {
            x - &self.hi
        } else {
            Rat::zero()
        }
    }

    /// `[lo, hi, cc]` with the flags for the left and right ends.
    pub fn flags(&self) -> String {
        let c = |b: bool| if b { 'c' } else { 'o' };
        format!("{}{}", c(self.lo_closed), c(self.hi_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.lo, self.hi, self.flags())
    }
}

/// A finite union of intervals in `[0, 1]`, kept sorted, disjoint and with
/// no two pieces that could be merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatIntervalUnion {
    parts: Vec<Interval>,
}

impl RatIntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalizes any list of intervals; pieces outside `[0, 1]` are
    /// rejected.
    pub fn new(parts: Vec<Interval>) -> Result<Self, EffError> {
        for p in &parts {
            if p.lo.is_negative() || p.hi > int(1) {
                return Err(EffError::Invalid(format!("{p} leaves [0, 1]")));
            }
        }
        Ok(Self::normalize(parts))
    }

    /// Accepts only input already in normal form.
    pub fn new_normalized(parts: Vec<Interval>) -> Result<Self, EffError> {
        let n = Self::new(parts.clone())?;
        if n.parts != parts {
            return Err(EffError::NotNormalized { hint: n.to_string() });
        }
        Ok(n)
    }

    fn normalize(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        // closed left ends first among equal starts
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::new();
        for p in parts {
            if let Some(last) = out.last_mut() {
                let joins = p.lo < last.hi || (p.lo == last.hi && (last.hi_closed || p.lo_closed));
                if joins {
                    match p.hi.cmp(&last.hi) {
                        Ordering::Greater => {
                            last.hi = p.hi;
                            last.hi_closed = p.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= p.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(p);
        }
        RatIntervalUnion { parts: out }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn components(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.parts.iter().all(|p| p.lo_closed && p.hi_closed)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn measure(&self) -> Rat {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.parts.iter().chain(&other.parts).cloned().collect())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut v = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                v.push(a.intersect(b));
            }
        }
        Self::normalize(v)
    }

    pub fn intersect_interval(&self, i: &Interval) -> Self {
        Self::normalize(self.parts.iter().map(|p| p.intersect(i)).collect())
    }

    /// `inf` of `|x - y|` over members `y`.
    pub fn distance(&self, x: &Rat) -> Result<Rat, EffError> {
        self.parts
            .iter()
            .map(|p| p.distance(x))
            .min()
            .ok_or_else(|| EffError::Undefined("distance to the empty set".into()))
    }
}

impl fmt::Display for RatIntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "intervals [{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effsets::rat;
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64), lc: bool, hc: bool) -> Interval {
        Interval::new(rat(a.0, a.1), rat(b.0, b.1), lc, hc)
    }

    #[test]
    fn examples() {
        let u = RatIntervalUnion::new(vec![iv((0, 1), (1, 2), true, true), iv((1, 2), (1, 1), true, true)]).unwrap();
        assert_eq!(u.measure(), rat(1, 1));
        assert_eq!(u.components(), 1);
        let u = RatIntervalUnion::new(vec![iv((1, 2), (3, 4), true, true)]).unwrap();
        assert_eq!(u.distance(&rat(1, 4)).unwrap(), rat(1, 4));
        assert!(RatIntervalUnion::empty().distance(&rat(1, 2)).is_err());
    }

    #[test]
    fn open_ends_at_a_shared_point_stay_apart() {
        let u = RatIntervalUnion::new(vec![iv((0, 1), (1, 2), false, false), iv((1, 2), (1, 1), false, false)]).unwrap();
        assert_eq!(u.components(), 2);
        assert!(!u.contains(&rat(1, 2)));
        let u = RatIntervalUnion::new(vec![iv((0, 1), (1, 2), false, true), iv((1, 2), (1, 1), false, false)]).unwrap();
        assert_eq!(u.components(), 1);
        assert!(u.contains(&rat(1, 2)));
    }

    #[test]
    fn rejects_unnormalized_input() {
        let e = RatIntervalUnion::new_normalized(vec![iv((0, 1), (1, 2), true, true), iv((1, 4), (1, 1), true, true)]);
        assert_eq!(e, Err(EffError::NotNormalized { hint: "intervals [[0, 1, cc]]".into() }));
        assert!(RatIntervalUnion::new(vec![iv((0, 1), (3, 2), true, true)]).is_err());
    }

    pub(crate) fn arb_interval() -> impl Strategy<Value = Interval> {
        (0i64..=8, 0i64..=8, any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
            let (a, b) = (a.min(b), a.max(b));
            Interval::new(rat(a, 8), rat(b, 8), lc, hc)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn contains_matches_grid_scan(parts in proptest::collection::vec(arb_interval(), 0..5)) {
            let u = RatIntervalUnion::new(parts.clone()).unwrap();
            for k in 0..=10_000 {
                let x = rat(k, 10_000);
                prop_assert_eq!(u.contains(&x), parts.iter().any(|p| p.contains(&x)));
            }
            for w in u.parts().windows(2) {
                prop_assert!(w[0].hi <= w[1].lo);
            }
        }
    }

    proptest! {
        #[test]
        fn measure_is_inclusion_exclusion(a in proptest::collection::vec(arb_interval(), 0..4), b in proptest::collection::vec(arb_interval(), 0..4)) {
            let a = RatIntervalUnion::new(a).unwrap();
            let b = RatIntervalUnion::new(b).unwrap();
            prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
        }

        #[test]
        fn normalization_is_idempotent(parts in proptest::collection::vec(arb_interval(), 0..5)) {
            let u = RatIntervalUnion::new(parts).unwrap();
            prop_assert_eq!(RatIntervalUnion::new_normalized(u.parts().to_vec()).unwrap(), u);
        }
    }
}
