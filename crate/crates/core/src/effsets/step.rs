use std::fmt;

use num_traits::{Signed, Zero};

use super::{int, EffError, Interval, Rat, RatIntervalUnion};

/// A step function on `[0, 1]`: breakpoints `0 = q0 < q1 < ... < qk = 1`,
/// value `v_i` on the open piece `(q_{i-1}, q_i)` and `w_i` at `q_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breaks: Vec<Rat>,
    pieces: Vec<Rat>,
    points: Vec<Rat>,
}

/// Where a point of `[0, 1]` falls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loc {
    Break(usize),
    /// Open piece between breakpoints `i` and `i + 1`.
    Piece(usize),
}

impl StepFunction {
    pub fn new(breaks: Vec<Rat>, pieces: Vec<Rat>, points: Vec<Rat>) -> Result<Self, EffError> {
        if breaks.len() < 2 {
            return Err(EffError::Invalid("need at least the breakpoints 0 and 1".into()));
        }
        if !breaks[0].is_zero() || *breaks.last().unwrap() != int(1) {
            return Err(EffError::Invalid("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EffError::Invalid("breakpoints must increase strictly".into()));
        }
        if pieces.len() + 1 != breaks.len() || points.len() != breaks.len() {
            return Err(EffError::Invalid(format!(
                "{} breakpoints need {} piece values and {} point values",
                breaks.len(),
                breaks.len() - 1,
                breaks.len()
            )));
        }
        Ok(StepFunction { breaks, pieces, points })
    }

    pub fn constant(c: Rat) -> Self {
        StepFunction {
            breaks: vec![int(0), int(1)],
            pieces: vec![c.clone()],
            points: vec![c.clone(), c],
        }
    }

    /// `1` on the interval, `0` elsewhere.
    pub fn indicator(i: &Interval) -> Self {
        let mut breaks = vec![int(0), i.lo.clone(), i.hi.clone(), int(1)];
        breaks.dedup();
        let value = |x: &Rat| if i.contains(x) { int(1) } else { int(0) };
        let points = breaks.iter().map(value).collect();
        let pieces = breaks
            .windows(2)
            .map(|w| value(&((&w[0] + &w[1]) / int(2))))
            .collect();
        StepFunction { breaks, pieces, points }
    }

    pub fn breaks(&self) -> &[Rat] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Rat] {
        &self.pieces
    }

    pub fn points(&self) -> &[Rat] {
        &self.points
    }

    pub fn locate(&self, x: &Rat) -> Loc {
        match self.breaks.binary_search(x) {
            Ok(i) => Loc::Break(i),
            Err(i) => Loc::Piece(i.clamp(1, self.pieces.len()) - 1),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        match self.locate(x) {
            Loc::Break(i) => self.points[i].clone(),
            Loc::Piece(i) => self.pieces[i].clone(),
        }
    }

    /// `lim f(z)` as `z` increases to `x`; none at `0`.
    pub fn left_limit(&self, x: &Rat) -> Option<Rat> {
        match self.locate(x) {
            Loc::Break(0) => None,
            Loc::Break(i) => Some(self.pieces[i - 1].clone()),
            Loc::Piece(i) => Some(self.pieces[i].clone()),
        }
    }

    /// `lim f(z)` as `z` decreases to `x`; none at `1`.
    pub fn right_limit(&self, x: &Rat) -> Option<Rat> {
        match self.locate(x) {
            Loc::Break(i) if i == self.pieces.len() => None,
            Loc::Break(i) => Some(self.pieces[i].clone()),
            Loc::Piece(i) => Some(self.pieces[i].clone()),
        }
    }

    /// Every value taken on `[p, q]`.
    fn values_on(&self, p: &Rat, q: &Rat) -> Vec<&Rat> {
        let mut out = Vec::new();
        for (i, b) in self.breaks.iter().enumerate() {
            if p <= b && b <= q {
                out.push(&self.points[i]);
            }
        }
        for (i, v) in self.pieces.iter().enumerate() {
            let lo = p.max(&self.breaks[i]);
            let hi = q.min(&self.breaks[i + 1]);
            if lo < hi {
                out.push(v);
            }
        }
        if out.is_empty() && p <= q {
            // p = q inside a piece
            out.push(match self.locate(p) {
                Loc::Break(i) => &self.points[i],
                Loc::Piece(i) => &self.pieces[i],
            });
        }
        out
    }

    pub fn sup_on(&self, p: &Rat, q: &Rat) -> Rat {
        self.values_on(p, q).into_iter().max().cloned().expect("p <= q")
    }

    pub fn inf_on(&self, p: &Rat, q: &Rat) -> Rat {
        self.values_on(p, q).into_iter().min().cloned().expect("p <= q")
    }

    pub fn sup(&self) -> Rat {
        self.sup_on(&int(0), &int(1))
    }

    pub fn osc_interval(&self, a: &Rat, b: &Rat) -> Rat {
        self.sup_on(a, b) - self.inf_on(a, b)
    }

    /// Oscillation at `x`; the shrinking balls stabilize once inside the
    /// pieces adjacent to `x`.
    pub fn osc_point(&self, x: &Rat) -> Rat {
        match self.locate(x) {
            Loc::Piece(_) => Rat::zero(),
            Loc::Break(i) => {
                let mut vals = vec![&self.points[i]];
                if i > 0 {
                    vals.push(&self.pieces[i - 1]);
                }
                if i < self.pieces.len() {
                    vals.push(&self.pieces[i]);
                }
                let hi = vals.iter().max().unwrap();
                let lo = vals.iter().min().unwrap();
                *hi - *lo
            }
        }
    }

    /// Both one-sided limits, where they exist, equal the value.
    pub fn is_continuous_at(&self, x: &Rat) -> bool {
        let fx = self.eval(x);
        [self.left_limit(x), self.right_limit(x)].into_iter().flatten().all(|l| l == fx)
    }

    /// Points where `liminf f <= f(x) - q`. For a step function the lower
    /// limit is the smaller one-sided limit, and only breakpoints qualify.
    pub fn jump_set(&self, q: &Rat) -> Vec<Rat> {
        self.breaks
            .iter()
            .filter(|x| {
                let liminf = [self.left_limit(x), self.right_limit(x)].into_iter().flatten().min();
                liminf.is_some_and(|l| l <= self.eval(x) - q)
            })
            .cloned()
            .collect()
    }

    /// Upper semicontinuity: each breakpoint value dominates its adjacent
    /// pieces.
    pub fn is_usco(&self) -> bool {
        (0..self.breaks.len()).all(|i| {
            let w = &self.points[i];
            (i == 0 || *w >= self.pieces[i - 1]) && (i == self.pieces.len() || *w >= self.pieces[i])
        })
    }

    /// Total variation on `[0, 1]`.
    pub fn variation(&self) -> Rat {
        let mut seq = Vec::with_capacity(2 * self.pieces.len() + 1);
        for (w, v) in self.points.iter().zip(&self.pieces) {
            seq.push(w);
            seq.push(v);
        }
        seq.push(self.points.last().unwrap());
        seq.windows(2).map(|w| (w[0] - w[1]).abs()).sum()
    }

    /// `{x : f(x) >= r}`.
    pub fn superlevel(&self, r: &Rat) -> RatIntervalUnion {
        let mut parts = Vec::new();
        for (i, w) in self.points.iter().enumerate() {
            if w >= r {
                parts.push(Interval::point(self.breaks[i].clone()));
            }
        }
        for (i, v) in self.pieces.iter().enumerate() {
            if v >= r {
                parts.push(Interval::open(self.breaks[i].clone(), self.breaks[i + 1].clone()));
            }
        }
        RatIntervalUnion::new(parts).expect("breakpoints lie in [0, 1]")
    }

    /// `self` squeezed onto `[0, 1/2]` followed by `other` on `[1/2, 1]`.
    /// The value at `1/2` must be shared.
    pub fn concat(&self, other: &StepFunction) -> Result<StepFunction, EffError> {
        let (a, b) = (self.points.last().unwrap(), &other.points[0]);
        if a != b {
            return Err(EffError::Invalid(format!("values {a} and {b} differ at the junction")));
        }
        let half = Rat::new(1.into(), 2.into());
        let mut breaks: Vec<Rat> = self.breaks.iter().map(|q| q * &half).collect();
        breaks.extend(other.breaks[1..].iter().map(|q| q * &half + &half));
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        let mut points = self.points.clone();
        points.extend(other.points[1..].iter().cloned());
        StepFunction::new(breaks, pieces, points)
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rat]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "step {{breaks: [{}], pieces: [{}], points: [{}]}}",
            list(&self.breaks),
            list(&self.pieces),
            list(&self.points)
        )
    }
}
