//! Size-bounded corpora of closed terms of type `0`.
//!
//! The size of a term is its number of syntax nodes, applications and
//! binders included. Bound variables are named `x0, x1, ...` by binding
//! depth, so every term is generated once up to renaming. Binders and
//! application arguments range over a fixed set of small types, and every
//! subterm has a type within the rank and arrow bounds.
//!
//! Terms are counted by dynamic programming and produced by unranking, which
//! gives both exhaustive listing and uniform sampling from the same table.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Term, Type};

#[derive(Clone, Debug)]
pub struct CorpusParams {
    pub max_size: usize,
    pub max_rank: usize,
    pub max_arrows: usize,
    /// Types a variable may be bound at, and the types of arguments.
    pub binder_types: Vec<Type>,
    /// Oracle constants with their signatures.
    pub oracles: Vec<(String, Type)>,
}

impl CorpusParams {
    /// Rank at most 2, at most three arrows, binders from
    /// `0, 0 -> 0, 0 -> 0 -> 0, (0 -> 0) -> 0`, and the given oracles.
    pub fn standard(max_size: usize, oracles: Vec<(String, Type)>) -> Self {
        let f = Type::nat_fn();
        CorpusParams {
            max_size,
            max_rank: 2,
            max_arrows: 3,
            binder_types: vec![
                Type::Base,
                f.clone(),
                Type::arrow(Type::Base, f.clone()),
                Type::arrow(f, Type::Base),
            ],
            oracles,
        }
    }
}

type Key = (Vec<Type>, Type, usize);

pub struct Corpus {
    params: CorpusParams,
    counts: HashMap<Key, u128>,
}

impl Corpus {
    pub fn new(params: CorpusParams) -> Self {
        Corpus { params, counts: HashMap::new() }
    }

    pub fn params(&self) -> &CorpusParams {
        &self.params
    }

    fn allowed(&self, ty: &Type) -> bool {
        ty.rank() <= self.params.max_rank && ty.arrows() <= self.params.max_arrows
    }

    fn atoms(&self, ctx: &[Type], ty: &Type) -> Vec<Term> {
        let mut out = Vec::new();
        let f = Type::nat_fn();
        if ty.is_base() {
            out.push(Term::Zero);
        }
        if *ty == f {
            out.push(Term::Suc);
            out.push(Term::Pred);
        }
        if *ty == Type::curried([Type::Base, Type::Base, Type::Base], Type::Base) {
            out.push(Term::Case);
        }
        for (name, sig) in &self.params.oracles {
            if sig == ty {
                out.push(Term::oracle(name));
            }
        }
        for (i, b) in ctx.iter().enumerate() {
            if b == ty {
                out.push(Term::var(&var_name(i)));
            }
        }
        out
    }

    /// Number of terms of type `ty` and exactly `size` nodes in `ctx`.
    pub fn count_at(&mut self, ctx: &[Type], ty: &Type, size: usize) -> u128 {
        if size == 0 || !self.allowed(ty) {
            return 0;
        }
        let key = (ctx.to_vec(), ty.clone(), size);
        if let Some(&c) = self.counts.get(&key) {
            return c;
        }
        let c = self.productions(ctx, ty, size).iter().map(|p| p.count).fold(0u128, u128::saturating_add);
        self.counts.insert(key, c);
        c
    }

    fn productions(&mut self, ctx: &[Type], ty: &Type, size: usize) -> Vec<Production> {
        let mut out = Vec::new();
        if size == 1 {
            let n = self.atoms(ctx, ty).len() as u128;
            out.push(Production { form: Form::Atom, count: n });
            return out;
        }
        if let Some((dom, cod)) = ty.split() {
            if self.params.binder_types.contains(dom) {
                let inner = extend(ctx, dom);
                let count = self.count_at(&inner, cod, size - 1);
                out.push(Production { form: Form::Lam, count });
            }
        }
        if self.params.binder_types.contains(ty) {
            let inner = extend(ctx, ty);
            let count = self.count_at(&inner, ty, size - 1);
            out.push(Production { form: Form::Fix, count });
        }
        for sigma in self.params.binder_types.clone() {
            let fty = Type::arrow(sigma.clone(), ty.clone());
            if !self.allowed(&fty) {
                continue;
            }
            for sf in 1..size - 1 {
                let sa = size - 1 - sf;
                let cf = self.count_at(ctx, &fty, sf);
                if cf == 0 {
                    continue;
                }
                let ca = self.count_at(ctx, &sigma, sa);
                out.push(Production {
                    form: Form::App { sigma: sigma.clone(), sf, sa, ca },
                    count: cf.saturating_mul(ca),
                });
            }
        }
        out
    }

    /// The `index`-th term of the given shape, in a fixed order.
    pub fn unrank_at(&mut self, ctx: &[Type], ty: &Type, size: usize, mut index: u128) -> Option<Term> {
        for p in self.productions(ctx, ty, size) {
            if index >= p.count {
                index -= p.count;
                continue;
            }
            return Some(match p.form {
                Form::Atom => self.atoms(ctx, ty).swap_remove(index as usize),
                Form::Lam => {
                    let (dom, cod) = ty.split()?;
                    let inner = extend(ctx, dom);
                    let body = self.unrank_at(&inner, cod, size - 1, index)?;
                    Term::lam(&var_name(ctx.len()), dom.clone(), body)
                }
                Form::Fix => {
                    let inner = extend(ctx, ty);
                    let body = self.unrank_at(&inner, ty, size - 1, index)?;
                    Term::fix(&var_name(ctx.len()), ty.clone(), body)
                }
                Form::App { sigma, sf, sa, ca } => {
                    let fty = Type::arrow(sigma.clone(), ty.clone());
                    let f = self.unrank_at(ctx, &fty, sf, index / ca)?;
                    let a = self.unrank_at(ctx, &sigma, sa, index % ca)?;
                    Term::app(f, a)
                }
            });
        }
        None
    }

    /// Number of closed terms of type `0` with size at most the bound.
    pub fn count(&mut self) -> u128 {
        (1..=self.params.max_size).map(|s| self.count_at(&[], &Type::Base, s)).sum()
    }

    /// The `index`-th closed term of type `0`, smaller sizes first.
    pub fn get(&mut self, mut index: u128) -> Option<Term> {
        for s in 1..=self.params.max_size {
            let c = self.count_at(&[], &Type::Base, s);
            if index < c {
                return self.unrank_at(&[], &Type::Base, s, index);
            }
            index -= c;
        }
        None
    }

    /// All closed terms of type `0` up to the size bound.
    pub fn all(&mut self) -> Vec<Term> {
        let n = self.count();
        (0..n).filter_map(|i| self.get(i)).collect()
    }

    /// `n` terms drawn uniformly with replacement, reproducibly from `seed`.
    pub fn sample(&mut self, n: usize, seed: u64) -> Vec<Term> {
        let total = self.count();
        if total == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).filter_map(|_| self.get(rng.gen_range(0..total))).collect()
    }

    /// Exhaustive when the corpus has at most `threshold` terms, otherwise
    /// `threshold` samples.
    pub fn generate(&mut self, threshold: usize, seed: u64) -> (Vec<Term>, bool) {
        if self.count() <= threshold as u128 {
            (self.all(), true)
        } else {
            (self.sample(threshold, seed), false)
        }
    }
}

struct Production {
    form: Form,
    count: u128,
}

enum Form {
    Atom,
    Lam,
    Fix,
    App { sigma: Type, sf: usize, sa: usize, ca: u128 },
}

fn extend(ctx: &[Type], ty: &Type) -> Vec<Type> {
    let mut v = ctx.to_vec();
    v.push(ty.clone());
    v
}

pub fn var_name(i: usize) -> String {
    format!("x{i}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::OracleTable;
    use crate::syntax::typecheck;
    use std::collections::HashSet;

    fn oracles() -> Vec<(String, Type)> {
        let f2 = Type::arrow(Type::nat_fn(), Type::Base);
        vec![("exists2".into(), f2.clone()), ("mu".into(), f2)]
    }

    #[test]
    fn smallest_sizes() {
        let mut c = Corpus::new(CorpusParams::standard(3, oracles()));
        // 0
        assert_eq!(c.count_at(&[], &Type::Base, 1), 1);
        // fix x0:0. x0, fix x0:0. 0
        assert_eq!(c.count_at(&[], &Type::Base, 2), 2);
        // suc 0, pred 0, fix x0:0. fix x1:0. {0, x0, x1}, and
        // {#exists2, #mu} {suc, pred}
        assert_eq!(c.count_at(&[], &Type::Base, 3), 2 + 3 + 4);
    }

    #[test]
    fn terms_are_distinct_closed_and_well_typed() {
        let mut c = Corpus::new(CorpusParams::standard(6, oracles()));
        let terms = c.all();
        assert_eq!(terms.len() as u128, c.count());
        let ctx = OracleTable::with_builtins().typing_context();
        let mut seen = HashSet::new();
        for t in &terms {
            assert!(t.is_closed(), "{t}");
            assert_eq!(typecheck(t, &ctx).unwrap(), Type::Base, "{t}");
            assert!(t.size() <= 6);
            assert!(seen.insert(t.clone()), "duplicate {t}");
        }
    }

    #[test]
    #[ignore]
    fn print_counts() {
        let mut c = Corpus::new(CorpusParams::standard(9, oracles()));
        for s in 1..=9 {
            println!("size {s}: {}", c.count_at(&[], &Type::Base, s));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let mut c = Corpus::new(CorpusParams::standard(9, oracles()));
        let a = c.sample(50, 7);
        let b = c.sample(50, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.size() <= 9));
    }
}
