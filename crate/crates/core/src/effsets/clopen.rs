use std::collections::BTreeSet;
use std::fmt;

use super::{bits_to_string, EffError, Rat};
use crate::syntax::{Term, Type};

/// A clopen subset of Cantor space: the sequences whose first `depth` bits
/// form one of the leaves.
///
/// Always canonical: the depth is the least one at which the set can be
/// written this way.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenCantorSet {
    depth: usize,
    leaves: BTreeSet<Vec<bool>>,
}

impl ClopenCantorSet {
    pub fn new<I>(depth: usize, leaves: I) -> Result<Self, EffError>
    where
        I: IntoIterator<Item = Vec<bool>>,
    {
        let leaves: BTreeSet<Vec<bool>> = leaves.into_iter().collect();
        if let Some(bad) = leaves.iter().find(|l| l.len() != depth) {
            return Err(EffError::Invalid(format!(
                "leaf {} has length {}, expected {depth}",
                bits_to_string(bad),
                bad.len()
            )));
        }
        Ok(Self::canonical(depth, leaves))
    }

    /// Like [`ClopenCantorSet::new`], but refuses a non-canonical
    /// presentation instead of reducing it.
    pub fn new_canonical<I>(depth: usize, leaves: I) -> Result<Self, EffError>
    where
        I: IntoIterator<Item = Vec<bool>>,
    {
        let leaves: Vec<Vec<bool>> = leaves.into_iter().collect();
        let n = leaves.len();
        let s = Self::new(depth, leaves)?;
        if s.depth != depth || s.leaves.len() != n {
            return Err(EffError::NotNormalized { hint: s.to_string() });
        }
        Ok(s)
    }

    fn canonical(mut depth: usize, mut leaves: BTreeSet<Vec<bool>>) -> Self {
        while depth > 0 {
            let mut parents = BTreeSet::new();
            for l in &leaves {
                let mut sibling = l.clone();
                sibling[depth - 1] = !sibling[depth - 1];
                if !leaves.contains(&sibling) {
                    return ClopenCantorSet { depth, leaves };
                }
                parents.insert(l[..depth - 1].to_vec());
            }
            leaves = parents;
            depth -= 1;
        }
        ClopenCantorSet { depth, leaves }
    }

    pub fn empty() -> Self {
        ClopenCantorSet { depth: 0, leaves: BTreeSet::new() }
    }

    pub fn full() -> Self {
        ClopenCantorSet { depth: 0, leaves: BTreeSet::from([Vec::new()]) }
    }

    /// The basic open set of sequences extending `prefix`.
    pub fn cell(prefix: &[bool]) -> Self {
        Self::canonical(prefix.len(), BTreeSet::from([prefix.to_vec()]))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &BTreeSet<Vec<bool>> {
        &self.leaves
    }

    /// Leaves of the same set presented at depth `d >= depth()`.
    pub fn refine(&self, d: usize) -> BTreeSet<Vec<bool>> {
        assert!(d >= self.depth, "cannot coarsen by refining");
        let mut out = BTreeSet::new();
        let extra = d - self.depth;
        for l in &self.leaves {
            for k in 0u64..1 << extra {
                let mut v = l.clone();
                v.extend((0..extra).map(|i| (k >> (extra - 1 - i)) & 1 == 1));
                out.insert(v);
            }
        }
        out
    }

    fn combine(&self, other: &Self, keep: impl Fn(bool, bool) -> bool) -> Self {
        let d = self.depth.max(other.depth);
        let a = self.refine(d);
        let b = other.refine(d);
        let leaves = (0u64..1 << d)
            .map(|k| (0..d).map(|i| (k >> (d - 1 - i)) & 1 == 1).collect::<Vec<_>>())
            .filter(|v| keep(a.contains(v), b.contains(v)))
            .collect();
        Self::canonical(d, leaves)
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Membership of the sequence `prefix ++ 0 0 0 ...`.
    pub fn member(&self, prefix: &[bool]) -> bool {
        let head: Vec<bool> = (0..self.depth).map(|i| prefix.get(i).copied().unwrap_or(false)).collect();
        self.leaves.contains(&head)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        self.combine(&Self::empty(), |a, _| !a)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// First `depth()` bits of the lexicographically least member, whose
    /// tail is all zeros.
    pub fn lex_least(&self) -> Result<Vec<bool>, EffError> {
        self.leaves.iter().next().cloned().ok_or(EffError::EmptySet)
    }

    pub fn measure(&self) -> Rat {
        Rat::new(self.leaves.len().into(), num_bigint::BigInt::from(1) << self.depth)
    }
}

impl fmt::Display for ClopenCantorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let leaves: Vec<String> = self.leaves.iter().map(|l| bits_to_string(l)).collect();
        write!(f, "clopen {{depth: {}, leaves: [{}]}}", self.depth, leaves.join(", "))
    }
}

/// A closed term of type `(0 -> 0) -> 0` returning `1` on sequences in `s`
/// and `0` elsewhere, by a decision tree of `case (f i)` tests.
pub fn compile_clopen_to_term(s: &ClopenCantorSet, limit: usize) -> Result<Term, EffError> {
    if s.depth() > limit {
        return Err(EffError::LimitExceeded { depth: s.depth(), limit });
    }
    let body = decide(s, &mut Vec::new());
    Ok(Term::lam("f", Type::nat_fn(), body))
}

fn decide(s: &ClopenCantorSet, prefix: &mut Vec<bool>) -> Term {
    let here = s.intersect(&ClopenCantorSet::cell(prefix));
    if here.is_empty() {
        return Term::Zero;
    }
    if here == ClopenCantorSet::cell(prefix) {
        return Term::numeral(1);
    }
    let probe = Term::app(Term::var("f"), Term::numeral(prefix.len() as u64));
    prefix.push(false);
    let zero = decide(s, prefix);
    prefix.pop();
    prefix.push(true);
    let one = decide(s, prefix);
    prefix.pop();
    Term::apps(Term::Case, [probe, zero, one])
}
