//! Weakened monoidal structures and their coherence verifier.
//!
//! A pseudomonoidal structure is a family of n-ary products together
//! with a unit object, unit-insertion morphisms and window-collapsing
//! associativity morphisms, none of which need be invertible. The
//! [`Pseudomonoidal`] trait captures exactly the operations the
//! coherence diagrams mention, so one verifier serves both instances:
//!
//! * [`MonoidalStructure`] reads a genuine monoidal backend as a
//!   pseudomonoidal one via left-iterated binary tensors (all structure
//!   maps are isomorphisms);
//! * [`CompositionStructure`] is the composition product of symmetric
//!   sequences, where the associativity maps are genuinely one-way
//!   whenever the tensor fails to distribute over coproducts.
//!
//! `check_coherence` walks every admissible index tuple within bounds,
//! composes both legs of each diagram, and demands exact equality.

use crate::category::{describe_difference, Backend, Mor, Obj};
use crate::compprod::{ComposeCtx, MuMapArg};
use crate::error::{Error, Result};
use crate::report::{CheckRecord, Report};
use crate::symseq::{SeqMor, SymmetricSequence};

/// Object-or-map argument for the functorial action of a product.
pub enum PArg<P: Pseudomonoidal + ?Sized> {
    Id(P::Ob),
    Map(P::Map),
}

/// Outcome of comparing two parallel maps within one evaluation scope.
pub struct ScopeOutcome {
    pub scope: String,
    pub ok: bool,
    pub counterexample: Option<serde_json::Value>,
}

/// The data of a pseudomonoidal structure, presented operationally.
pub trait Pseudomonoidal {
    type Ob: Clone + Send + Sync;
    type Map: Clone + Send + Sync;

    fn unit(&self) -> Self::Ob;

    /// The n-ary product; a single argument must come back unchanged.
    fn mu(&self, args: &[Self::Ob]) -> Result<Self::Ob>;

    /// Insert the unit after the k-th slot (0 <= k <= n).
    fn iota(&self, args: &[Self::Ob], k: usize) -> Result<Self::Map>;

    /// Collapse the r-wide window after the l-th slot into one product
    /// slot (0 <= l < l + r <= n).
    fn alpha(&self, args: &[Self::Ob], l: usize, r: usize) -> Result<Self::Map>;

    /// Functorial action of the product on maps.
    fn mu_map(&self, args: &[PArg<Self>]) -> Result<Self::Map>;

    /// `second` after `first`.
    fn then(&self, first: &Self::Map, second: &Self::Map) -> Result<Self::Map>;

    fn identity(&self, x: &Self::Ob) -> Result<Self::Map>;

    fn equal(&self, f: &Self::Map, g: &Self::Map) -> bool;

    /// Scope-by-scope comparison (arities for sequences, one global
    /// scope for plain backend morphisms).
    fn compare(&self, f: &Self::Map, g: &Self::Map) -> Vec<ScopeOutcome>;
}

// ---------------------------------------------------------------------
// Monoidal backends as pseudomonoidal structures
// ---------------------------------------------------------------------

/// A genuine monoidal structure read pseudomonoidally: products are the
/// left-bracketed iterated tensors, and the structure maps are the
/// coherence isomorphisms of the backend.
pub struct MonoidalStructure {
    backend: Backend,
}

impl MonoidalStructure {
    pub fn new(backend: Backend) -> Self {
        MonoidalStructure { backend }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    fn left_nested(&self, args: &[Obj]) -> Result<Obj> {
        let mut it = args.iter();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::domain("products need at least one factor"))?
            .clone();
        for x in it {
            acc = self.backend.tensor(&[acc, x.clone()])?;
        }
        Ok(acc)
    }
}

impl Pseudomonoidal for MonoidalStructure {
    type Ob = Obj;
    type Map = Mor;

    fn unit(&self) -> Obj {
        self.backend.unit()
    }

    fn mu(&self, args: &[Obj]) -> Result<Obj> {
        self.left_nested(args)
    }

    fn iota(&self, args: &[Obj], k: usize) -> Result<Mor> {
        if k > args.len() {
            return Err(Error::domain("unit slot out of range"));
        }
        let src = self.left_nested(args)?;
        let mut with_unit = args.to_vec();
        with_unit.insert(k, self.backend.unit());
        let dst = self.left_nested(&with_unit)?;
        self.backend.assoc_unit_iso(&src, &dst)
    }

    fn alpha(&self, args: &[Obj], l: usize, r: usize) -> Result<Mor> {
        if r < 1 || l + r > args.len() {
            return Err(Error::domain("collapse window out of range"));
        }
        let src = self.left_nested(args)?;
        let inner = self.left_nested(&args[l..l + r])?;
        let mut grouped: Vec<Obj> = args[..l].to_vec();
        grouped.push(inner);
        grouped.extend_from_slice(&args[l + r..]);
        let dst = self.left_nested(&grouped)?;
        self.backend.assoc_unit_iso(&src, &dst)
    }

    fn mu_map(&self, args: &[PArg<Self>]) -> Result<Mor> {
        let mut it = args.iter();
        let first = it.next().ok_or_else(|| Error::domain("empty product"))?;
        let mut acc = match first {
            PArg::Id(x) => self.backend.identity(x),
            PArg::Map(f) => f.clone(),
        };
        for a in it {
            let next = match a {
                PArg::Id(x) => self.backend.identity(x),
                PArg::Map(f) => f.clone(),
            };
            acc = self.backend.tensor_mor(&[acc, next])?;
        }
        Ok(acc)
    }

    fn then(&self, first: &Mor, second: &Mor) -> Result<Mor> {
        self.backend.compose(second, first)
    }

    fn identity(&self, x: &Obj) -> Result<Mor> {
        Ok(self.backend.identity(x))
    }

    fn equal(&self, f: &Mor, g: &Mor) -> bool {
        f == g
    }

    fn compare(&self, f: &Mor, g: &Mor) -> Vec<ScopeOutcome> {
        let ok = f == g;
        vec![ScopeOutcome {
            scope: "global".into(),
            ok,
            counterexample: (!ok).then(|| describe_difference(f, g)),
        }]
    }
}

// ---------------------------------------------------------------------
// The composition product as a pseudomonoidal structure
// ---------------------------------------------------------------------

/// The pseudomonoidal structure on symmetric sequences given by the
/// composition product over a backend with finite coproducts.
pub struct CompositionStructure {
    ctx: ComposeCtx,
}

impl CompositionStructure {
    pub fn new(backend: Backend, bound: usize) -> Self {
        CompositionStructure {
            ctx: ComposeCtx::new(backend, bound),
        }
    }

    pub fn ctx(&self) -> &ComposeCtx {
        &self.ctx
    }

    pub fn backend(&self) -> Backend {
        self.ctx.backend()
    }

    pub fn bound(&self) -> usize {
        self.ctx.bound()
    }

    /// Wrap with a deliberately corrupted unit insertion (two summand
    /// components with equal sources swapped), for mutation testing.
    pub fn with_corrupted_iota(&self) -> CorruptedIota<'_> {
        CorruptedIota { inner: self }
    }
}

impl Pseudomonoidal for CompositionStructure {
    type Ob = SymmetricSequence;
    type Map = SeqMor;

    fn unit(&self) -> SymmetricSequence {
        self.ctx.unit_seq()
    }

    fn mu(&self, args: &[SymmetricSequence]) -> Result<SymmetricSequence> {
        self.ctx.compose_seq(args)
    }

    fn iota(&self, args: &[SymmetricSequence], k: usize) -> Result<SeqMor> {
        self.ctx.unicity_seqmor(args, k)
    }

    fn alpha(&self, args: &[SymmetricSequence], l: usize, r: usize) -> Result<SeqMor> {
        self.ctx.associativity_seqmor(args, l, r)
    }

    fn mu_map(&self, args: &[PArg<Self>]) -> Result<SeqMor> {
        let converted: Vec<MuMapArg> = args
            .iter()
            .map(|a| match a {
                PArg::Id(s) => MuMapArg::Id(s.clone()),
                PArg::Map(f) => MuMapArg::Map(f.clone()),
            })
            .collect();
        self.ctx.mu_map(&converted)
    }

    fn then(&self, first: &SeqMor, second: &SeqMor) -> Result<SeqMor> {
        first.then(second)
    }

    fn identity(&self, x: &SymmetricSequence) -> Result<SeqMor> {
        SeqMor::identity(x, self.ctx.bound())
    }

    fn equal(&self, f: &SeqMor, g: &SeqMor) -> bool {
        f.equals(g)
    }

    fn compare(&self, f: &SeqMor, g: &SeqMor) -> Vec<ScopeOutcome> {
        if !f.src().is_same(g.src()) || !f.dst().is_same(g.dst()) {
            return vec![ScopeOutcome {
                scope: "global".into(),
                ok: false,
                counterexample: Some(serde_json::json!({
                    "note": "legs do not share endpoints",
                    "lhs": [f.src().name(), f.dst().name()],
                    "rhs": [g.src().name(), g.dst().name()],
                })),
            }];
        }
        (1..=self.ctx.bound())
            .map(|m| {
                let fm = f.comp(m).expect("component within bound");
                let gm = g.comp(m).expect("component within bound");
                let ok = fm == gm;
                ScopeOutcome {
                    scope: format!("set size {m}"),
                    ok,
                    counterexample: (!ok).then(|| describe_difference(fm, gm)),
                }
            })
            .collect()
    }
}

/// Delegating wrapper whose `iota` swaps two summand components; see
/// [`CompositionStructure::with_corrupted_iota`].
pub struct CorruptedIota<'a> {
    inner: &'a CompositionStructure,
}

impl Pseudomonoidal for CorruptedIota<'_> {
    type Ob = SymmetricSequence;
    type Map = SeqMor;

    fn unit(&self) -> SymmetricSequence {
        self.inner.unit()
    }

    fn mu(&self, args: &[SymmetricSequence]) -> Result<SymmetricSequence> {
        self.inner.mu(args)
    }

    fn iota(&self, args: &[SymmetricSequence], k: usize) -> Result<SeqMor> {
        self.inner.ctx.unicity_seqmor_swapped(args, k)
    }

    fn alpha(&self, args: &[SymmetricSequence], l: usize, r: usize) -> Result<SeqMor> {
        self.inner.alpha(args, l, r)
    }

    fn mu_map(&self, args: &[PArg<Self>]) -> Result<SeqMor> {
        let converted: Vec<MuMapArg> = args
            .iter()
            .map(|a| match a {
                PArg::Id(s) => MuMapArg::Id(s.clone()),
                PArg::Map(f) => MuMapArg::Map(f.clone()),
            })
            .collect();
        self.inner.ctx.mu_map(&converted)
    }

    fn then(&self, first: &SeqMor, second: &SeqMor) -> Result<SeqMor> {
        first.then(second)
    }

    fn identity(&self, x: &SymmetricSequence) -> Result<SeqMor> {
        self.inner.identity(x)
    }

    fn equal(&self, f: &SeqMor, g: &SeqMor) -> bool {
        self.inner.equal(f, g)
    }

    fn compare(&self, f: &SeqMor, g: &SeqMor) -> Vec<ScopeOutcome> {
        self.inner.compare(f, g)
    }
}

// ---------------------------------------------------------------------
// The coherence verifier
// ---------------------------------------------------------------------

/// One diagram instance: a condition family plus its index tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoherenceTuple {
    /// `[n, k, l, r]` with `k <= l`: unit insertion before the window.
    UnitBefore(usize, usize, usize, usize),
    /// `[n, k, l, r]` with `l <= k <= l+r`: insertion inside the window.
    UnitInside(usize, usize, usize, usize),
    /// `[n, k, l, r]` with `l+r <= k`: insertion after the window.
    UnitAfter(usize, usize, usize, usize),
    /// `[n, l, s, k, r]` with `l+s <= k`: disjoint collapses.
    AssocDisjoint(usize, usize, usize, usize, usize),
    /// `[n, l, s, k, r]` with `l <= k < k+r <= l+s`: nested collapses.
    AssocNested(usize, usize, usize, usize, usize),
    /// `[n, l, k]` with `l <= k`: two unit insertions.
    UnitUnit(usize, usize, usize),
}

impl CoherenceTuple {
    pub fn condition(&self) -> &'static str {
        match self {
            CoherenceTuple::UnitBefore(..) => "1a",
            CoherenceTuple::UnitInside(..) => "1b",
            CoherenceTuple::UnitAfter(..) => "1c",
            CoherenceTuple::AssocDisjoint(..) => "2a",
            CoherenceTuple::AssocNested(..) => "2b",
            CoherenceTuple::UnitUnit(..) => "3",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            CoherenceTuple::UnitBefore(n, k, l, r)
            | CoherenceTuple::UnitInside(n, k, l, r)
            | CoherenceTuple::UnitAfter(n, k, l, r) => vec![n, k, l, r],
            CoherenceTuple::AssocDisjoint(n, l, s, k, r)
            | CoherenceTuple::AssocNested(n, l, s, k, r) => vec![n, l, s, k, r],
            CoherenceTuple::UnitUnit(n, l, k) => vec![n, l, k],
        }
    }
}

/// Every admissible coherence tuple with product arity at most `max_n`,
/// each exactly once, in a fixed order.
pub fn enumerate_coherence_tuples(max_n: usize) -> Vec<CoherenceTuple> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in 0..n {
            for r in 1..=n - l {
                for k in 0..=n {
                    if k <= l {
                        out.push(CoherenceTuple::UnitBefore(n, k, l, r));
                    }
                    if k >= l && k <= l + r {
                        out.push(CoherenceTuple::UnitInside(n, k, l, r));
                    }
                    if k >= l + r {
                        out.push(CoherenceTuple::UnitAfter(n, k, l, r));
                    }
                }
            }
        }
        for l in 0..n {
            for s in 1..=n - l {
                for k in l + s..n {
                    for r in 1..=n - k {
                        out.push(CoherenceTuple::AssocDisjoint(n, l, s, k, r));
                    }
                }
                for k in l..l + s {
                    for r in 1..=l + s - k {
                        out.push(CoherenceTuple::AssocNested(n, l, s, k, r));
                    }
                }
            }
        }
        for l in 0..=n {
            for k in l..=n {
                out.push(CoherenceTuple::UnitUnit(n, l, k));
            }
        }
    }
    out
}

/// Evaluate both legs of one coherence diagram and compare.
fn evaluate_tuple<P: Pseudomonoidal>(
    ps: &P,
    samples: &[P::Ob],
    tuple: &CoherenceTuple,
) -> Result<Vec<CheckRecord>> {
    let args = |n: usize| -> Vec<P::Ob> {
        (0..n).map(|i| samples[i % samples.len()].clone()).collect()
    };
    let unit = ps.unit();
    let with_unit = |xs: &[P::Ob], k: usize| -> Vec<P::Ob> {
        let mut v = xs.to_vec();
        v.insert(k, unit.clone());
        v
    };
    let collapsed = |xs: &[P::Ob], l: usize, r: usize| -> Result<Vec<P::Ob>> {
        let inner = ps.mu(&xs[l..l + r])?;
        let mut v = xs[..l].to_vec();
        v.push(inner);
        v.extend_from_slice(&xs[l + r..]);
        Ok(v)
    };
    let (first_leg, second_leg) = match *tuple {
        CoherenceTuple::UnitBefore(n, k, l, r) => {
            let xs = args(n);
            let top = ps.then(
                &ps.alpha(&xs, l, r)?,
                &ps.iota(&collapsed(&xs, l, r)?, k)?,
            )?;
            let left = ps.then(
                &ps.iota(&xs, k)?,
                &ps.alpha(&with_unit(&xs, k), l + 1, r)?,
            )?;
            (top, left)
        }
        CoherenceTuple::UnitInside(n, k, l, r) => {
            let xs = args(n);
            let inner_iota = ps.iota(&xs[l..l + r], k - l)?;
            let mut margs: Vec<PArg<P>> = Vec::with_capacity(n - r + 1);
            for x in &xs[..l] {
                margs.push(PArg::Id(x.clone()));
            }
            margs.push(PArg::Map(inner_iota));
            for x in &xs[l + r..] {
                margs.push(PArg::Id(x.clone()));
            }
            let top = ps.then(&ps.alpha(&xs, l, r)?, &ps.mu_map(&margs)?)?;
            let left = ps.then(
                &ps.iota(&xs, k)?,
                &ps.alpha(&with_unit(&xs, k), l, r + 1)?,
            )?;
            (top, left)
        }
        CoherenceTuple::UnitAfter(n, k, l, r) => {
            let xs = args(n);
            let top = ps.then(
                &ps.alpha(&xs, l, r)?,
                &ps.iota(&collapsed(&xs, l, r)?, k - r + 1)?,
            )?;
            let left = ps.then(
                &ps.iota(&xs, k)?,
                &ps.alpha(&with_unit(&xs, k), l, r)?,
            )?;
            (top, left)
        }
        CoherenceTuple::AssocDisjoint(n, l, s, k, r) => {
            let xs = args(n);
            let top = ps.then(
                &ps.alpha(&xs, l, s)?,
                &ps.alpha(&collapsed(&xs, l, s)?, k - s + 1, r)?,
            )?;
            let left = ps.then(
                &ps.alpha(&xs, k, r)?,
                &ps.alpha(&collapsed(&xs, k, r)?, l, s)?,
            )?;
            (top, left)
        }
        CoherenceTuple::AssocNested(n, l, s, k, r) => {
            let xs = args(n);
            let inner_alpha = ps.alpha(&xs[l..l + s], k - l, r)?;
            let mut margs: Vec<PArg<P>> = Vec::with_capacity(n - s + 1);
            for x in &xs[..l] {
                margs.push(PArg::Id(x.clone()));
            }
            margs.push(PArg::Map(inner_alpha));
            for x in &xs[l + s..] {
                margs.push(PArg::Id(x.clone()));
            }
            let top = ps.then(&ps.alpha(&xs, l, s)?, &ps.mu_map(&margs)?)?;
            let left = ps.then(
                &ps.alpha(&xs, k, r)?,
                &ps.alpha(&collapsed(&xs, k, r)?, l, s - r + 1)?,
            )?;
            (top, left)
        }
        CoherenceTuple::UnitUnit(n, l, k) => {
            let xs = args(n);
            let top = ps.then(
                &ps.iota(&xs, l)?,
                &ps.iota(&with_unit(&xs, l), k + 1)?,
            )?;
            let left = ps.then(&ps.iota(&xs, k)?, &ps.iota(&with_unit(&xs, k), l)?)?;
            (top, left)
        }
    };
    Ok(ps
        .compare(&first_leg, &second_leg)
        .into_iter()
        .map(|o| {
            if o.ok {
                CheckRecord::pass(tuple.condition(), tuple.indices(), o.scope)
            } else {
                CheckRecord::fail(
                    tuple.condition(),
                    tuple.indices(),
                    o.scope,
                    o.counterexample.unwrap_or(serde_json::Value::Null),
                )
            }
        })
        .collect())
}

/// Run the full coherence suite: every admissible tuple with product
/// arity at most `max_n`, arguments drawn cyclically from `samples`.
pub fn check_coherence<P>(ps: &P, samples: &[P::Ob], max_n: usize) -> Result<Report>
where
    P: Pseudomonoidal + Sync,
{
    if samples.is_empty() {
        return Err(Error::domain("coherence checking needs at least one sample"));
    }
    let tuples = enumerate_coherence_tuples(max_n);
    let results = crate::par_map(tuples, |t| evaluate_tuple(ps, samples, &t));
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    Ok(Report::from_records(records))
}

/// Invertibility survey of the associativity maps, meaningful in
/// distributive backends where they are isomorphisms.
pub fn alpha_invertibility_report(
    ps: &CompositionStructure,
    samples: &[SymmetricSequence],
    max_n: usize,
) -> Result<Report> {
    let mut records = Vec::new();
    for n in 1..=max_n {
        let xs: Vec<SymmetricSequence> = (0..n)
            .map(|i| samples[i % samples.len()].clone())
            .collect();
        for l in 0..n {
            for r in 1..=n - l {
                let alpha = ps.alpha(&xs, l, r)?;
                for m in 1..=ps.bound() {
                    let comp = alpha.comp(m)?;
                    let ok = comp.is_invertible();
                    let record = if ok {
                        CheckRecord::pass("alpha-invertible", vec![n, l, r], format!("set size {m}"))
                    } else {
                        CheckRecord::fail(
                            "alpha-invertible",
                            vec![n, l, r],
                            format!("set size {m}"),
                            comp.payload_summary(8),
                        )
                    };
                    records.push(record);
                }
            }
        }
    }
    Ok(Report::from_records(records))
}

#[cfg(test)]
mod tests;
