//! Truncated finite models of the partial and total type structures.
//!
//! The base domain of a model with bound `N` is `{0, ..., N}` plus bottom,
//! ordered flatly. At an arrow type the partial space holds every monotone
//! map from the partial domain space to the partial codomain space, and the
//! total space holds every map from total arguments to total results.
//!
//! A function element is a table whose `i`-th entry is its value on the
//! `i`-th element of the domain enumeration. Enumerations are deterministic:
//! `⊥ < 0 < 1 < ...` at the base, lexicographic by entries above it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::syntax::Type;

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Spaces larger than this get no precomputed order matrix.
const LEQ_MATRIX_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("space {ty} has at least {estimate} elements, over the budget of {budget}")]
    BudgetExceeded {
        ty: Type,
        estimate: f64,
        budget: usize,
    },
    #[error("value does not belong to type {ty}: {detail}")]
    TypeMismatch { ty: Type, detail: String },
    #[error("embedding at {ty} is not well defined: dominated totals disagree")]
    IllDefinedEmbedding { ty: Type },
}

/// An element of a truncated partial space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainElement {
    Bottom,
    Nat(u32),
    Table(Arc<[DomainElement]>),
}

/// An element of a truncated total space; never contains bottom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TotalElement {
    Nat(u32),
    Table(Arc<[TotalElement]>),
}

/// An element of a mixed space: total arguments, possibly undefined results.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PElement {
    Bottom,
    Nat(u32),
    Table(Arc<[PElement]>),
}

impl DomainElement {
    pub fn as_nat(&self) -> Option<u32> {
        match self {
            DomainElement::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn entries(&self) -> Option<&[DomainElement]> {
        match self {
            DomainElement::Table(e) => Some(e),
            _ => None,
        }
    }
}

impl TotalElement {
    pub fn as_nat(&self) -> Option<u32> {
        match self {
            TotalElement::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn entries(&self) -> Option<&[TotalElement]> {
        match self {
            TotalElement::Table(e) => Some(e),
            _ => None,
        }
    }
}

impl From<&TotalElement> for PElement {
    fn from(t: &TotalElement) -> Self {
        match t {
            TotalElement::Nat(n) => PElement::Nat(*n),
            TotalElement::Table(e) => PElement::Table(e.iter().map(PElement::from).collect()),
        }
    }
}

fn fmt_entries<T: fmt::Display>(f: &mut fmt::Formatter<'_>, entries: &[T]) -> fmt::Result {
    f.write_str("[")?;
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{e}")?;
    }
    f.write_str("]")
}

impl fmt::Display for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainElement::Bottom => f.write_str("⊥"),
            DomainElement::Nat(n) => write!(f, "{n}"),
            DomainElement::Table(e) => fmt_entries(f, e),
        }
    }
}

impl fmt::Display for TotalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TotalElement::Nat(n) => write!(f, "{n}"),
            TotalElement::Table(e) => fmt_entries(f, e),
        }
    }
}

impl fmt::Display for PElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PElement::Bottom => f.write_str("⊥"),
            PElement::Nat(n) => write!(f, "{n}"),
            PElement::Table(e) => fmt_entries(f, e),
        }
    }
}

/// Uniform read access to total and mixed elements, for the embedding.
trait Tabulated {
    /// `Some(Some(n))` for a number, `Some(None)` for bottom, `None` for a table.
    fn base(&self) -> Option<Option<u32>>;
    fn entry(&self, i: usize) -> Option<&Self>;
}

impl Tabulated for TotalElement {
    fn base(&self) -> Option<Option<u32>> {
        match self {
            TotalElement::Nat(n) => Some(Some(*n)),
            TotalElement::Table(_) => None,
        }
    }

    fn entry(&self, i: usize) -> Option<&Self> {
        self.entries().and_then(|e| e.get(i))
    }
}

impl Tabulated for PElement {
    fn base(&self) -> Option<Option<u32>> {
        match self {
            PElement::Bottom => Some(None),
            PElement::Nat(n) => Some(Some(*n)),
            PElement::Table(_) => None,
        }
    }

    fn entry(&self, i: usize) -> Option<&Self> {
        match self {
            PElement::Table(e) => e.get(i),
            _ => None,
        }
    }
}

/// The enumerated partial space of one type.
#[derive(Debug)]
pub struct PartialSpace {
    ty: Type,
    elems: Vec<DomainElement>,
    index: HashMap<DomainElement, u32>,
    leq: OnceLock<Option<Vec<u64>>>,
    total_embeds: OnceLock<Vec<u32>>,
}

impl PartialSpace {
    fn new(ty: Type, elems: Vec<DomainElement>) -> Self {
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        PartialSpace {
            ty,
            elems,
            index,
            leq: OnceLock::new(),
            total_embeds: OnceLock::new(),
        }
    }

    pub fn ty(&self) -> &Type {
        &self.ty
    }

    pub fn elems(&self) -> &[DomainElement] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, v: &DomainElement) -> Option<usize> {
        self.index.get(v).map(|i| *i as usize)
    }

    /// Order between the `i`-th and `j`-th elements.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        let n = self.elems.len();
        let matrix = self.leq.get_or_init(|| {
            (n <= LEQ_MATRIX_LIMIT).then(|| {
                let words = n.div_ceil(64);
                let mut bits = vec![0u64; n * words];
                for a in 0..n {
                    for b in 0..n {
                        if leq_raw(&self.elems[a], &self.elems[b]) {
                            bits[a * words + b / 64] |= 1 << (b % 64);
                        }
                    }
                }
                bits
            })
        });
        match matrix {
            Some(bits) => {
                let words = n.div_ceil(64);
                bits[i * words + j / 64] >> (j % 64) & 1 == 1
            }
            None => leq_raw(&self.elems[i], &self.elems[j]),
        }
    }
}

/// The enumerated total space of one type.
#[derive(Debug)]
pub struct TotalSpace {
    ty: Type,
    elems: Vec<TotalElement>,
    index: HashMap<TotalElement, u32>,
}

impl TotalSpace {
    pub fn ty(&self) -> &Type {
        &self.ty
    }

    pub fn elems(&self) -> &[TotalElement] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, v: &TotalElement) -> Option<usize> {
        self.index.get(v).map(|i| *i as usize)
    }
}

#[derive(Debug, Default)]
struct SpaceCache {
    partial: Mutex<HashMap<Type, Arc<PartialSpace>>>,
    total: Mutex<HashMap<Type, Arc<TotalSpace>>>,
}

/// A truncated model: base domain `{0..=bound}` plus bottom.
///
/// Cloning shares the enumeration caches.
#[derive(Clone, Debug)]
pub struct FinModel {
    bound: u32,
    budget: usize,
    cache: Arc<SpaceCache>,
}

impl FinModel {
    pub fn new(bound: u32) -> Self {
        Self::with_budget(bound, DEFAULT_BUDGET)
    }

    pub fn with_budget(bound: u32, budget: usize) -> Self {
        FinModel {
            bound,
            budget,
            cache: Arc::default(),
        }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The partial space of `ty`, enumerated on first use.
    pub fn partial_space(&self, ty: &Type) -> Result<Arc<PartialSpace>, DomainError> {
        if let Some(s) = self.cache.partial.lock().unwrap().get(ty) {
            return Ok(s.clone());
        }
        let elems = match ty {
            Type::Base => std::iter::once(DomainElement::Bottom)
                .chain((0..=self.bound).map(DomainElement::Nat))
                .collect(),
            Type::Arrow(dom, cod) => {
                let d = self.partial_space(dom)?;
                let c = self.partial_space(cod)?;
                let mut out = Vec::new();
                let budget = self.budget;
                let complete = monotone_tables(&d, &c, |idx| {
                    out.push(DomainElement::Table(
                        idx.iter().map(|&i| c.elems[i as usize].clone()).collect(),
                    ));
                    out.len() <= budget
                });
                if !complete {
                    return Err(DomainError::BudgetExceeded {
                        ty: ty.clone(),
                        estimate: out.len() as f64,
                        budget,
                    });
                }
                out
            }
        };
        let space = Arc::new(PartialSpace::new(ty.clone(), elems));
        let mut cache = self.cache.partial.lock().unwrap();
        Ok(cache.entry(ty.clone()).or_insert(space).clone())
    }

    /// The total space of `ty`, enumerated on first use.
    pub fn total_space(&self, ty: &Type) -> Result<Arc<TotalSpace>, DomainError> {
        if let Some(s) = self.cache.total.lock().unwrap().get(ty) {
            return Ok(s.clone());
        }
        let elems: Vec<TotalElement> = match ty {
            Type::Base => (0..=self.bound).map(TotalElement::Nat).collect(),
            Type::Arrow(dom, cod) => {
                let d = self.total_space(dom)?;
                let c = self.total_space(cod)?;
                let estimate = (c.len() as f64).powf(d.len() as f64);
                if estimate > self.budget as f64 {
                    return Err(DomainError::BudgetExceeded {
                        ty: ty.clone(),
                        estimate,
                        budget: self.budget,
                    });
                }
                let count = estimate as usize;
                let (base, width) = (c.len(), d.len());
                let mut out = Vec::with_capacity(count);
                let mut digits = vec![0usize; width];
                for k in 0..count {
                    let mut r = k;
                    for slot in digits.iter_mut().rev() {
                        *slot = r % base;
                        r /= base;
                    }
                    out.push(TotalElement::Table(
                        digits.iter().map(|&i| c.elems[i].clone()).collect(),
                    ));
                }
                out
            }
        };
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let space = Arc::new(TotalSpace { ty: ty.clone(), elems, index });
        let mut cache = self.cache.total.lock().unwrap();
        Ok(cache.entry(ty.clone()).or_insert(space).clone())
    }

    /// For each total element of `ty`, the index of its embedding in the
    /// partial space of `ty`.
    fn total_embeds(&self, ty: &Type) -> Result<(Arc<PartialSpace>, Vec<u32>), DomainError> {
        let p = self.partial_space(ty)?;
        if let Some(v) = p.total_embeds.get() {
            return Ok((p.clone(), v.clone()));
        }
        let t = self.total_space(ty)?;
        let mut out = Vec::with_capacity(t.len());
        for g in t.elems() {
            let e = embed(ty, g, self)?;
            let i = p.index_of(&e).ok_or_else(|| DomainError::TypeMismatch {
                ty: ty.clone(),
                detail: format!("embedding {e} is not monotone"),
            })?;
            out.push(i as u32);
        }
        let _ = p.total_embeds.set(out.clone());
        Ok((p, out))
    }
}

/// Backtracking enumeration of monotone index tables from `dom` to `cod`,
/// in lexicographic order. `visit` returns false to stop early; the return
/// value says whether the enumeration ran to completion.
fn monotone_tables<F>(dom: &PartialSpace, cod: &PartialSpace, mut visit: F) -> bool
where
    F: FnMut(&[u32]) -> bool,
{
    let n = dom.len();
    // constraints against earlier positions
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..i {
            if dom.leq_idx(j, i) {
                below[i].push(j);
            }
            if dom.leq_idx(i, j) {
                above[i].push(j);
            }
        }
    }
    let mut acc: Vec<u32> = Vec::with_capacity(n);
    let mut next: Vec<usize> = vec![0; n + 1];
    let m = cod.len();
    let mut pos = 0usize;
    next[0] = 0;
    loop {
        if pos == n {
            if !visit(&acc) {
                return false;
            }
            if n == 0 {
                return true;
            }
            pos -= 1;
            acc.pop();
            continue;
        }
        let mut found = None;
        let mut c = next[pos];
        while c < m {
            let ok = below[pos].iter().all(|&j| cod.leq_idx(acc[j] as usize, c))
                && above[pos].iter().all(|&j| cod.leq_idx(c, acc[j] as usize));
            if ok {
                found = Some(c);
                break;
            }
            c += 1;
        }
        match found {
            Some(c) => {
                next[pos] = c + 1;
                acc.push(c as u32);
                pos += 1;
                next[pos] = 0;
            }
            None => {
                if pos == 0 {
                    return true;
                }
                pos -= 1;
                acc.pop();
            }
        }
    }
}

/// Every total element of `ty` in the model.
pub fn enumerate_total(ty: &Type, m: &FinModel) -> Result<Vec<TotalElement>, DomainError> {
    Ok(m.total_space(ty)?.elems().to_vec())
}

/// Every monotone element of `ty` in the model.
pub fn enumerate_partial(ty: &Type, m: &FinModel) -> Result<Vec<DomainElement>, DomainError> {
    Ok(m.partial_space(ty)?.elems().to_vec())
}

/// Streams the partial space of `dom -> cod` without materialising it.
/// Returns the number of elements visited.
pub fn for_each_partial_fn<F>(
    dom: &Type,
    cod: &Type,
    m: &FinModel,
    mut visit: F,
) -> Result<usize, DomainError>
where
    F: FnMut(&DomainElement),
{
    let d = m.partial_space(dom)?;
    let c = m.partial_space(cod)?;
    let mut count = 0;
    monotone_tables(&d, &c, |idx| {
        let e = DomainElement::Table(idx.iter().map(|&i| c.elems[i as usize].clone()).collect());
        visit(&e);
        count += 1;
        true
    });
    Ok(count)
}

fn leq_raw(v: &DomainElement, w: &DomainElement) -> bool {
    match (v, w) {
        (DomainElement::Bottom, _) => true,
        (DomainElement::Nat(a), DomainElement::Nat(b)) => a == b,
        (DomainElement::Table(a), DomainElement::Table(b)) => {
            a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| leq_raw(x, y))
        }
        _ => false,
    }
}

fn check_shape(ty: &Type, v: &DomainElement, m: &FinModel) -> Result<(), DomainError> {
    let bad = |detail: String| DomainError::TypeMismatch { ty: ty.clone(), detail };
    match (ty, v) {
        (Type::Base, DomainElement::Bottom) => Ok(()),
        (Type::Base, DomainElement::Nat(n)) if *n <= m.bound() => Ok(()),
        (Type::Arrow(dom, cod), DomainElement::Table(e)) => {
            let d = m.partial_space(dom)?;
            if e.len() != d.len() {
                return Err(bad(format!("table has {} entries, expected {}", e.len(), d.len())));
            }
            e.iter().try_for_each(|x| check_shape(cod, x, m))
        }
        _ => Err(bad(format!("{v}"))),
    }
}

/// The information order at `ty`.
pub fn leq(ty: &Type, v: &DomainElement, w: &DomainElement, m: &FinModel) -> Result<bool, DomainError> {
    check_shape(ty, v, m)?;
    check_shape(ty, w, m)?;
    Ok(leq_raw(v, w))
}

/// Least element of the partial space of `ty`.
pub fn bottom_of(ty: &Type, m: &FinModel) -> Result<DomainElement, DomainError> {
    match ty {
        Type::Base => Ok(DomainElement::Bottom),
        Type::Arrow(dom, cod) => {
            let n = m.partial_space(dom)?.len();
            let b = bottom_of(cod, m)?;
            Ok(DomainElement::Table(vec![b; n].into()))
        }
    }
}

/// Applies a function element of type `ty` to an argument.
pub fn apply(
    ty: &Type,
    f: &DomainElement,
    arg: &DomainElement,
    m: &FinModel,
) -> Result<DomainElement, DomainError> {
    let (dom, _) = ty.split().ok_or_else(|| DomainError::TypeMismatch {
        ty: ty.clone(),
        detail: "applied a base value".into(),
    })?;
    let d = m.partial_space(dom)?;
    let i = d.index_of(arg).ok_or_else(|| DomainError::TypeMismatch {
        ty: dom.clone(),
        detail: format!("{arg} is not an element of the space"),
    })?;
    match f {
        DomainElement::Table(e) if e.len() == d.len() => Ok(e[i].clone()),
        _ => Err(DomainError::TypeMismatch {
            ty: ty.clone(),
            detail: format!("{f} is not a table over the domain"),
        }),
    }
}

/// Whether `v` is a monotone element of `ty`, recursively.
pub fn is_monotone(ty: &Type, v: &DomainElement, m: &FinModel) -> Result<bool, DomainError> {
    check_shape(ty, v, m)?;
    match (ty, v) {
        (Type::Arrow(dom, cod), DomainElement::Table(e)) => {
            let d = m.partial_space(dom)?;
            for i in 0..d.len() {
                for j in 0..d.len() {
                    if d.leq_idx(i, j) && !leq_raw(&e[i], &e[j]) {
                        return Ok(false);
                    }
                }
            }
            for x in e.iter() {
                if !is_monotone(cod, x, m)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(true),
    }
}

fn embed_any<E: Tabulated>(ty: &Type, v: &E, m: &FinModel) -> Result<DomainElement, DomainError> {
    let bad = |detail: &str| DomainError::TypeMismatch {
        ty: ty.clone(),
        detail: detail.to_string(),
    };
    match ty {
        Type::Base => match v.base() {
            Some(Some(n)) if n <= m.bound() => Ok(DomainElement::Nat(n)),
            Some(Some(_)) => Err(bad("number above the base bound")),
            Some(None) => Ok(DomainElement::Bottom),
            None => Err(bad("table at base type")),
        },
        Type::Arrow(dom, cod) => {
            if v.base().is_some() {
                return Err(bad("base value at arrow type"));
            }
            let totals = m.total_space(dom)?.len();
            let (p, embeds) = m.total_embeds(dom)?;
            let outs = (0..totals)
                .map(|g| {
                    let e = v.entry(g).ok_or_else(|| bad("table too short"))?;
                    embed_any(cod, e, m)
                })
                .collect::<Result<Vec<_>, _>>()?;
            if v.entry(totals).is_some() {
                return Err(bad("table too long"));
            }
            let bottom = bottom_of(cod, m)?;
            let mut entries = Vec::with_capacity(p.len());
            for phi in 0..p.len() {
                let mut chosen: Option<&DomainElement> = None;
                for (g, &gi) in embeds.iter().enumerate() {
                    if p.leq_idx(gi as usize, phi) {
                        match chosen {
                            None => chosen = Some(&outs[g]),
                            Some(c) if *c != outs[g] => {
                                return Err(DomainError::IllDefinedEmbedding { ty: ty.clone() })
                            }
                            Some(_) => {}
                        }
                    }
                }
                entries.push(chosen.cloned().unwrap_or_else(|| bottom.clone()));
            }
            Ok(DomainElement::Table(entries.into()))
        }
    }
}

/// Embeds a total element into the partial space.
pub fn embed(ty: &Type, v: &TotalElement, m: &FinModel) -> Result<DomainElement, DomainError> {
    embed_any(ty, v, m)
}

/// Embeds a mixed element (total arguments, partial results).
pub fn embed_partial(ty: &Type, v: &PElement, m: &FinModel) -> Result<DomainElement, DomainError> {
    embed_any(ty, v, m)
}

/// Least fixed point of `f : ty -> ty`, by iteration from bottom.
pub fn lfp(ty: &Type, f: &DomainElement, m: &FinModel) -> Result<DomainElement, DomainError> {
    let fty = Type::arrow(ty.clone(), ty.clone());
    let mut x = bottom_of(ty, m)?;
    let limit = m.partial_space(ty)?.len() + 1;
    for _ in 0..limit {
        let y = apply(&fty, f, &x, m)?;
        if y == x {
            return Ok(x);
        }
        x = y;
    }
    Err(DomainError::TypeMismatch {
        ty: fty,
        detail: "iteration did not stabilise; the table is not monotone".into(),
    })
}
