//! Monoids for a pseudomonoidal structure, their modules, bimodules and
//! augmentations.
//!
//! Over the composition product a monoid is exactly an operad; the
//! per-partition components of its binary multiplication are the
//! classical composition maps, and `monoid_to_operad` /
//! `operad_to_monoid` convert between the two presentations without
//! loss. Higher multiplications and actions are derived from the binary
//! ones by a fixed left-grouping convention; the check functions verify
//! the unital and associativity diagram families for every admissible
//! index tuple within the requested bound.

use crate::category::{Mor, Obj};
use crate::combinatorics::{FinSet, Partition};
use crate::error::{Error, Result};
use crate::pseudomonoid::{CompositionStructure, PArg, Pseudomonoidal};
use crate::report::{CheckRecord, Report};
use crate::symseq::{SeqMor, SymmetricSequence};

/// A monoid: a carrier with binary multiplication and unit.
#[derive(Clone)]
pub struct Monoid<P: Pseudomonoidal + ?Sized> {
    pub carrier: P::Ob,
    /// `mu_2(M, M) -> M`.
    pub m2: P::Map,
    /// `I -> M`.
    pub eta: P::Map,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A one-sided module: `action` is `mu_2(M, L) -> L` for left modules
/// and `mu_2(R, M) -> R` for right ones.
#[derive(Clone)]
pub struct Module<P: Pseudomonoidal + ?Sized> {
    pub side: Side,
    pub carrier: P::Ob,
    pub action: P::Map,
}

/// A bimodule: binary biactions on both sides.
#[derive(Clone)]
pub struct Bimodule<P: Pseudomonoidal + ?Sized> {
    pub carrier: P::Ob,
    /// `a_{1,0} : mu_2(M, B) -> B`.
    pub left_action: P::Map,
    /// `a_{0,1} : mu_2(B, N) -> B`.
    pub right_action: P::Map,
}

/// An augmentation `eps : M -> I` splitting the unit.
#[derive(Clone)]
pub struct Augmentation<P: Pseudomonoidal + ?Sized> {
    pub eps: P::Map,
}

fn repeat<P: Pseudomonoidal + ?Sized>(x: &P::Ob, n: usize) -> Vec<P::Ob> {
    vec![x.clone(); n]
}

/// The derived multiplication `m_n`, left-grouped:
/// `m_n = m_2 . mu_2(m_{n-1}, id) . alpha_{n,0,n-1}`.
pub fn derive_multiplication<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    n: usize,
) -> Result<P::Map> {
    if n == 0 {
        return Err(Error::domain("multiplications start at n = 1"));
    }
    if n == 1 {
        return ps.identity(&mo.carrier);
    }
    if n == 2 {
        return Ok(mo.m2.clone());
    }
    let ms = repeat::<P>(&mo.carrier, n);
    let alpha = ps.alpha(&ms, 0, n - 1)?;
    let prev = derive_multiplication(ps, mo, n - 1)?;
    let step = ps.mu_map(&[PArg::Map(prev), PArg::Id(mo.carrier.clone())])?;
    ps.then(&ps.then(&alpha, &step)?, &mo.m2)
}

/// Right-grouped variant, used to confirm bracketing independence:
/// `m_n = m_2 . mu_2(id, m_{n-1}) . alpha_{n,1,n-1}`.
pub fn derive_multiplication_right<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    n: usize,
) -> Result<P::Map> {
    if n == 0 {
        return Err(Error::domain("multiplications start at n = 1"));
    }
    if n == 1 {
        return ps.identity(&mo.carrier);
    }
    if n == 2 {
        return Ok(mo.m2.clone());
    }
    let ms = repeat::<P>(&mo.carrier, n);
    let alpha = ps.alpha(&ms, 1, n - 1)?;
    let prev = derive_multiplication_right(ps, mo, n - 1)?;
    let step = ps.mu_map(&[PArg::Id(mo.carrier.clone()), PArg::Map(prev)])?;
    ps.then(&ps.then(&alpha, &step)?, &mo.m2)
}

fn outcome_records<P: Pseudomonoidal>(
    ps: &P,
    family: &str,
    tuple: Vec<usize>,
    lhs: &P::Map,
    rhs: &P::Map,
) -> Vec<CheckRecord> {
    ps.compare(lhs, rhs)
        .into_iter()
        .map(|o| {
            if o.ok {
                CheckRecord::pass(family, tuple.clone(), o.scope)
            } else {
                CheckRecord::fail(
                    family,
                    tuple.clone(),
                    o.scope,
                    o.counterexample.unwrap_or(serde_json::Value::Null),
                )
            }
        })
        .collect()
}

/// Verify the unital and associative diagram families of a monoid for
/// all product arities up to `max_n`.
pub fn check_monoid<P: Pseudomonoidal>(ps: &P, mo: &Monoid<P>, max_n: usize) -> Result<Report> {
    let mut records = Vec::new();
    // Unital family: eta fills the inserted slot, for n < max_n so the
    // target arity stays within bounds.
    for n in 1..max_n {
        let ms = repeat::<P>(&mo.carrier, n);
        let m_n = derive_multiplication(ps, mo, n)?;
        let m_n1 = derive_multiplication(ps, mo, n + 1)?;
        for k in 0..=n {
            let iota = ps.iota(&ms, k)?;
            let mut args: Vec<PArg<P>> = Vec::with_capacity(n + 1);
            for _ in 0..k {
                args.push(PArg::Id(mo.carrier.clone()));
            }
            args.push(PArg::Map(mo.eta.clone()));
            for _ in k..n {
                args.push(PArg::Id(mo.carrier.clone()));
            }
            let fill = ps.mu_map(&args)?;
            let lhs = ps.then(&ps.then(&iota, &fill)?, &m_n1)?;
            records.extend(outcome_records(ps, "monoid-unital", vec![n, k], &lhs, &m_n));
        }
    }
    // Associative family: collapse a window, multiply inside, finish.
    for n in 2..=max_n {
        let ms = repeat::<P>(&mo.carrier, n);
        let m_n = derive_multiplication(ps, mo, n)?;
        for k in 0..n {
            for r in 1..=n - k {
                let alpha = ps.alpha(&ms, k, r)?;
                let m_r = derive_multiplication(ps, mo, r)?;
                let mut args: Vec<PArg<P>> = Vec::with_capacity(n - r + 1);
                for _ in 0..k {
                    args.push(PArg::Id(mo.carrier.clone()));
                }
                args.push(PArg::Map(m_r));
                for _ in k + r..n {
                    args.push(PArg::Id(mo.carrier.clone()));
                }
                let fill = ps.mu_map(&args)?;
                let m_outer = derive_multiplication(ps, mo, n - r + 1)?;
                let lhs = ps.then(&ps.then(&alpha, &fill)?, &m_outer)?;
                records.extend(outcome_records(ps, "monoid-assoc", vec![n, k, r], &lhs, &m_n));
            }
        }
    }
    Ok(Report::from_records(records))
}

/// The reduced axiom set: one three-fold associativity diagram and the
/// two binary unit diagrams.
pub fn check_minimal_axioms<P: Pseudomonoidal>(ps: &P, mo: &Monoid<P>) -> Result<Report> {
    let mut records = Vec::new();
    let m = &mo.carrier;
    let ms3 = repeat::<P>(m, 3);

    let left_route = ps.then(
        &ps.then(
            &ps.alpha(&ms3, 0, 2)?,
            &ps.mu_map(&[PArg::Map(mo.m2.clone()), PArg::Id(m.clone())])?,
        )?,
        &mo.m2,
    )?;
    let right_route = ps.then(
        &ps.then(
            &ps.alpha(&ms3, 1, 2)?,
            &ps.mu_map(&[PArg::Id(m.clone()), PArg::Map(mo.m2.clone())])?,
        )?,
        &mo.m2,
    )?;
    records.extend(outcome_records(ps, "assoc3", vec![], &left_route, &right_route));

    let id_m = ps.identity(m)?;
    let right_unit = ps.then(
        &ps.then(
            &ps.iota(std::slice::from_ref(m), 1)?,
            &ps.mu_map(&[PArg::Id(m.clone()), PArg::Map(mo.eta.clone())])?,
        )?,
        &mo.m2,
    )?;
    records.extend(outcome_records(ps, "right-unit", vec![], &right_unit, &id_m));

    let left_unit = ps.then(
        &ps.then(
            &ps.iota(std::slice::from_ref(m), 0)?,
            &ps.mu_map(&[PArg::Map(mo.eta.clone()), PArg::Id(m.clone())])?,
        )?,
        &mo.m2,
    )?;
    records.extend(outcome_records(ps, "left-unit", vec![], &left_unit, &id_m));

    Ok(Report::from_records(records))
}

/// Argument list of a module diagram: M's with the carrier at one end.
fn module_slots<P: Pseudomonoidal>(md: &Module<P>, mo: &Monoid<P>, n: usize) -> Vec<P::Ob> {
    match md.side {
        Side::Left => {
            let mut v = repeat::<P>(&mo.carrier, n - 1);
            v.push(md.carrier.clone());
            v
        }
        Side::Right => {
            let mut v = vec![md.carrier.clone()];
            v.extend(repeat::<P>(&mo.carrier, n - 1));
            v
        }
    }
}

/// The derived n-ary action, left-grouped like the multiplications.
pub fn derive_action<P: Pseudomonoidal>(
    ps: &P,
    md: &Module<P>,
    mo: &Monoid<P>,
    n: usize,
) -> Result<P::Map> {
    if n == 0 {
        return Err(Error::domain("actions start at n = 1"));
    }
    if n == 1 {
        return ps.identity(&md.carrier);
    }
    if n == 2 {
        return Ok(md.action.clone());
    }
    let slots = module_slots(md, mo, n);
    match md.side {
        Side::Left => {
            // l_n = l_2 . mu_2(m_{n-1}, id_L) . alpha_{n,0,n-1}.
            let alpha = ps.alpha(&slots, 0, n - 1)?;
            let m_prev = derive_multiplication(ps, mo, n - 1)?;
            let fill = ps.mu_map(&[PArg::Map(m_prev), PArg::Id(md.carrier.clone())])?;
            ps.then(&ps.then(&alpha, &fill)?, &md.action)
        }
        Side::Right => {
            // r_n = r_2 . mu_2(id_R, m_{n-1}) . alpha_{n,1,n-1}.
            let alpha = ps.alpha(&slots, 1, n - 1)?;
            let m_prev = derive_multiplication(ps, mo, n - 1)?;
            let fill = ps.mu_map(&[PArg::Id(md.carrier.clone()), PArg::Map(m_prev)])?;
            ps.then(&ps.then(&alpha, &fill)?, &md.action)
        }
    }
}

/// Verify the unital and associative families for a one-sided module.
pub fn check_module<P: Pseudomonoidal>(
    ps: &P,
    md: &Module<P>,
    mo: &Monoid<P>,
    max_n: usize,
) -> Result<Report> {
    let mut records = Vec::new();
    let module_pos = |n: usize| match md.side {
        Side::Left => n - 1,
        Side::Right => 0,
    };
    // Unital family: insert the unit anywhere among the monoid slots.
    for n in 1..max_n {
        let slots = module_slots(md, mo, n);
        let a_n = derive_action(ps, md, mo, n)?;
        let a_n1 = derive_action(ps, md, mo, n + 1)?;
        for k in 0..=n {
            // The fresh unit slot must land in the monoid region: never
            // after the carrier of a left module, never before the
            // carrier of a right one.
            let valid = match md.side {
                Side::Left => k <= n - 1,
                Side::Right => k >= 1,
            };
            if !valid {
                continue;
            }
            let iota = ps.iota(&slots, k)?;
            let mut args: Vec<PArg<P>> = Vec::with_capacity(n + 1);
            for (pos, ob) in widened(&slots, k, &ps.unit()).into_iter().enumerate() {
                if pos == k {
                    args.push(PArg::Map(mo.eta.clone()));
                } else {
                    args.push(PArg::Id(ob));
                }
            }
            let fill = ps.mu_map(&args)?;
            let lhs = ps.then(&ps.then(&iota, &fill)?, &a_n1)?;
            records.extend(outcome_records(ps, "module-unital", vec![n, k], &lhs, &a_n));
        }
    }
    // Associative families: windows inside the monoid region use the
    // multiplication; the window touching the module slot uses the
    // action itself.
    for n in 2..=max_n {
        let slots = module_slots(md, mo, n);
        let a_n = derive_action(ps, md, mo, n)?;
        let mpos = module_pos(n);
        for k in 0..n {
            for r in 1..=n - k {
                let covers_module = k <= mpos && mpos < k + r;
                if covers_module {
                    // Only the window ending at the module slot derives
                    // an inner action of the same sidedness.
                    let aligned = match md.side {
                        Side::Left => k + r == n,
                        Side::Right => k == 0,
                    };
                    if !aligned {
                        continue;
                    }
                }
                let alpha = ps.alpha(&slots, k, r)?;
                let inner: P::Map = if covers_module {
                    derive_action(ps, md, mo, r)?
                } else {
                    derive_multiplication(ps, mo, r)?
                };
                let mut args: Vec<PArg<P>> = Vec::with_capacity(n - r + 1);
                for (pos, ob) in collapsed_slots(&slots, k, r).into_iter().enumerate() {
                    if pos == k {
                        args.push(PArg::Map(inner.clone()));
                    } else {
                        args.push(PArg::Id(ob));
                    }
                }
                // Replace the placeholder at the collapsed slot.
                let fill = ps.mu_map(&args)?;
                let outer = derive_action(ps, md, mo, n - r + 1)?;
                let lhs = ps.then(&ps.then(&alpha, &fill)?, &outer)?;
                let family = if covers_module {
                    "module-assoc-action"
                } else {
                    "module-assoc-mult"
                };
                records.extend(outcome_records(ps, family, vec![n, k, r], &lhs, &a_n));
            }
        }
    }
    Ok(Report::from_records(records))
}

fn widened<Ob: Clone>(slots: &[Ob], k: usize, unit: &Ob) -> Vec<Ob> {
    let mut v = slots.to_vec();
    v.insert(k, unit.clone());
    v
}

fn collapsed_slots<Ob: Clone>(slots: &[Ob], k: usize, r: usize) -> Vec<Ob> {
    // Placeholder at position k; the caller substitutes the inner map,
    // so the object there is irrelevant as long as arity is right.
    let mut v = slots[..k].to_vec();
    v.push(slots[k].clone());
    v.extend_from_slice(&slots[k + r..]);
    v
}

/// Derived biaction `a_{p,q}`, collapsing the innermost pair first.
pub fn derive_biaction<P: Pseudomonoidal>(
    ps: &P,
    bd: &Bimodule<P>,
    left: &Monoid<P>,
    right: &Monoid<P>,
    p: usize,
    q: usize,
) -> Result<P::Map> {
    if p == 0 && q == 0 {
        return ps.identity(&bd.carrier);
    }
    let n = p + 1 + q;
    let mut slots: Vec<P::Ob> = repeat::<P>(&left.carrier, p);
    slots.push(bd.carrier.clone());
    slots.extend(repeat::<P>(&right.carrier, q));
    if p >= 1 {
        // Collapse the (M, B) pair at window (p-1, 2).
        let alpha = ps.alpha(&slots, p - 1, 2)?;
        let mut args: Vec<PArg<P>> = Vec::with_capacity(n - 1);
        for x in &slots[..p - 1] {
            args.push(PArg::Id(x.clone()));
        }
        args.push(PArg::Map(bd.left_action.clone()));
        for x in &slots[p + 1..] {
            args.push(PArg::Id(x.clone()));
        }
        let fill = ps.mu_map(&args)?;
        let outer = derive_biaction(ps, bd, left, right, p - 1, q)?;
        ps.then(&ps.then(&alpha, &fill)?, &outer)
    } else {
        // p = 0, q >= 1: collapse the (B, N) pair at window (0, 2).
        let alpha = ps.alpha(&slots, 0, 2)?;
        let mut args: Vec<PArg<P>> = Vec::with_capacity(n - 1);
        args.push(PArg::Map(bd.right_action.clone()));
        for x in &slots[2..] {
            args.push(PArg::Id(x.clone()));
        }
        let fill = ps.mu_map(&args)?;
        let outer = derive_biaction(ps, bd, left, right, 0, q - 1)?;
        ps.then(&ps.then(&alpha, &fill)?, &outer)
    }
}

/// Verify the bimodule unital diagrams and the compatibility squares,
/// for `p + 1 + q <= max_n`.
pub fn check_bimodule<P: Pseudomonoidal>(
    ps: &P,
    bd: &Bimodule<P>,
    left: &Monoid<P>,
    right: &Monoid<P>,
    max_n: usize,
) -> Result<Report> {
    let mut records = Vec::new();
    for p in 0..max_n {
        for q in 0..max_n {
            let n = p + 1 + q;
            if n > max_n {
                continue;
            }
            let mut slots: Vec<P::Ob> = repeat::<P>(&left.carrier, p);
            slots.push(bd.carrier.clone());
            slots.extend(repeat::<P>(&right.carrier, q));
            let a_pq = derive_biaction(ps, bd, left, right, p, q)?;

            // Unital family (target arity must stay within max_n).
            if n + 1 <= max_n {
                for k in 0..=n {
                    let iota = ps.iota(&slots, k)?;
                    let eta = if k <= p {
                        left.eta.clone()
                    } else {
                        right.eta.clone()
                    };
                    let mut args: Vec<PArg<P>> = Vec::with_capacity(n + 1);
                    for (pos, ob) in widened(&slots, k, &ps.unit()).into_iter().enumerate() {
                        if pos == k {
                            args.push(PArg::Map(eta.clone()));
                        } else {
                            args.push(PArg::Id(ob));
                        }
                    }
                    let fill = ps.mu_map(&args)?;
                    let widened_a = if k <= p {
                        derive_biaction(ps, bd, left, right, p + 1, q)?
                    } else {
                        derive_biaction(ps, bd, left, right, p, q + 1)?
                    };
                    let lhs = ps.then(&ps.then(&iota, &fill)?, &widened_a)?;
                    records.extend(outcome_records(
                        ps,
                        "bimodule-unital",
                        vec![p, q, k],
                        &lhs,
                        &a_pq,
                    ));
                }
            }

            // Associativity: windows in the left monoid region, the
            // right monoid region, or straddling the carrier.
            for k in 0..n {
                for r in 1..=n - k {
                    let (inner, outer): (P::Map, P::Map) = if k + r <= p {
                        (
                            derive_multiplication(ps, left, r)?,
                            derive_biaction(ps, bd, left, right, p - r + 1, q)?,
                        )
                    } else if k > p {
                        (
                            derive_multiplication(ps, right, r)?,
                            derive_biaction(ps, bd, left, right, p, q - r + 1)?,
                        )
                    } else {
                        // k <= p < k + r: the window absorbs the carrier.
                        (
                            derive_biaction(ps, bd, left, right, p - k, k + r - p - 1)?,
                            derive_biaction(ps, bd, left, right, k, p + q + 1 - k - r)?,
                        )
                    };
                    let alpha = ps.alpha(&slots, k, r)?;
                    let mut args: Vec<PArg<P>> = Vec::with_capacity(n - r + 1);
                    for (pos, ob) in collapsed_slots(&slots, k, r).into_iter().enumerate() {
                        if pos == k {
                            args.push(PArg::Map(inner.clone()));
                        } else {
                            args.push(PArg::Id(ob));
                        }
                    }
                    let fill = ps.mu_map(&args)?;
                    let lhs = ps.then(&ps.then(&alpha, &fill)?, &outer)?;
                    records.extend(outcome_records(
                        ps,
                        "bimodule-assoc",
                        vec![p, q, k, r],
                        &lhs,
                        &a_pq,
                    ));
                }
            }
        }
    }
    Ok(Report::from_records(records))
}

/// Check `eps . eta = id` and report per scope.
pub fn validate_augmentation<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    aug: &Augmentation<P>,
) -> Result<Report> {
    let composite = ps.then(&mo.eta, &aug.eps)?;
    let id = ps.identity(&ps.unit())?;
    Ok(Report::from_records(outcome_records(
        ps,
        "augmentation-splits-unit",
        vec![],
        &composite,
        &id,
    )))
}

/// The unit object as a bimodule over an augmented monoid: both
/// biactions are `eps . m_2 . (eta in the unit slot)`.
pub fn unit_bimodule<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    aug: &Augmentation<P>,
) -> Result<Bimodule<P>> {
    let check = validate_augmentation(ps, mo, aug)?;
    if !check.all_passed() {
        return Err(Error::domain("not an augmentation: eps does not split eta"));
    }
    // a_{1,0}: mu_2(M, I) -> mu_2(M, M) -> M -> I.
    let fill_right = ps.mu_map(&[PArg::Id(mo.carrier.clone()), PArg::Map(mo.eta.clone())])?;
    let left_action = ps.then(&ps.then(&fill_right, &mo.m2)?, &aug.eps)?;
    // a_{0,1}: mu_2(I, N) -> mu_2(N, N) -> N -> I.
    let fill_left = ps.mu_map(&[PArg::Map(mo.eta.clone()), PArg::Id(mo.carrier.clone())])?;
    let right_action = ps.then(&ps.then(&fill_left, &mo.m2)?, &aug.eps)?;
    Ok(Bimodule {
        carrier: ps.unit(),
        left_action,
        right_action,
    })
}

/// The left- or right-module part of a bimodule.
pub fn bimodule_side<P: Pseudomonoidal>(bd: &Bimodule<P>, side: Side) -> Module<P> {
    match side {
        Side::Left => Module {
            side: Side::Left,
            carrier: bd.carrier.clone(),
            action: bd.left_action.clone(),
        },
        Side::Right => Module {
            side: Side::Right,
            carrier: bd.carrier.clone(),
            action: bd.right_action.clone(),
        },
    }
}

// ---------------------------------------------------------------------
// Operad presentation over the composition structure
// ---------------------------------------------------------------------

/// A monoid for the composition product, presented by per-partition
/// composition maps.
#[derive(Clone)]
pub struct OperadPresentation {
    pub carrier: SymmetricSequence,
    /// `(arity, partition)` to the restriction of the multiplication to
    /// that partition's summand.
    pub gamma: Vec<(usize, Partition, Mor)>,
    pub eta: SeqMor,
}

pub fn monoid_to_operad(
    cs: &CompositionStructure,
    mo: &Monoid<CompositionStructure>,
) -> Result<OperadPresentation> {
    let ctx = cs.ctx();
    let backend = cs.backend();
    let mut gamma = Vec::new();
    for m in 1..=cs.bound() {
        let a = FinSet::canonical(m);
        let co = ctx.compose(&[mo.carrier.clone(), mo.carrier.clone()], &a)?;
        for term in &co.terms {
            let pi = term.tree.chain()[0].clone();
            let restricted = backend.compose(mo.m2.comp(m)?, &term.injection)?;
            gamma.push((m, pi, restricted));
        }
    }
    Ok(OperadPresentation {
        carrier: mo.carrier.clone(),
        gamma,
        eta: mo.eta.clone(),
    })
}

pub fn operad_to_monoid(
    cs: &CompositionStructure,
    op: &OperadPresentation,
) -> Result<Monoid<CompositionStructure>> {
    let ctx = cs.ctx();
    let backend = cs.backend();
    let pair = vec![op.carrier.clone(), op.carrier.clone()];
    let src_seq = ctx.compose_seq(&pair)?;
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let a = FinSet::canonical(m);
        let co = ctx.compose(&pair, &a)?;
        let components: Vec<Mor> = co
            .terms
            .iter()
            .map(|term| {
                let pi = &term.tree.chain()[0];
                op.gamma
                    .iter()
                    .find(|(gm, gp, _)| *gm == m && gp == pi)
                    .map(|(_, _, g)| g.clone())
                    .ok_or_else(|| {
                        Error::domain(format!("missing composition map at arity {m}"))
                    })
            })
            .collect::<Result<_>>()?;
        comps.push(backend.copair(&co.total, &components)?);
    }
    let m2 = SeqMor::new(src_seq, op.carrier.clone(), comps)?;
    Ok(Monoid {
        carrier: op.carrier.clone(),
        m2,
        eta: op.eta.clone(),
    })
}

// ---------------------------------------------------------------------
// Built-in examples
// ---------------------------------------------------------------------

/// The unit-valued operad: every value is the monoidal unit and every
/// composition map is the canonical unit collapse. Works over any
/// backend.
pub fn com_monoid(cs: &CompositionStructure) -> Result<Monoid<CompositionStructure>> {
    let backend = cs.backend();
    let ctx = cs.ctx();
    let carrier =
        SymmetricSequence::constant(backend, &backend.unit(), cs.bound(), "com")?;
    let pair = vec![carrier.clone(), carrier.clone()];
    let src_seq = ctx.compose_seq(&pair)?;
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let a = FinSet::canonical(m);
        let co = ctx.compose(&pair, &a)?;
        let components: Vec<Mor> = co
            .terms
            .iter()
            .map(|term| {
                let mask = vec![true; term.factors.len()];
                let expand = backend.unit_insertion(&[], &mask)?;
                let collapse = expand
                    .inverse()
                    .ok_or_else(|| Error::domain("unit expansion must invert"))?;
                debug_assert_eq!(collapse.src(), &term.object);
                Ok(collapse)
            })
            .collect::<Result<_>>()?;
        comps.push(backend.copair(&co.total, &components)?);
    }
    let m2 = SeqMor::new(src_seq, carrier.clone(), comps)?;
    let eta = unit_into(cs, &carrier)?;
    Ok(Monoid { carrier, m2, eta })
}

/// `eta : I -> M` for a monoid whose arity-one value is one-dimensional
/// (the unit basis vector goes to the generator).
fn unit_into(cs: &CompositionStructure, carrier: &SymmetricSequence) -> Result<SeqMor> {
    let backend = cs.backend();
    let unit_seq = cs.ctx().unit_seq();
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let src = unit_seq.value(m)?;
        let dst = carrier.value(m)?;
        if m == 1 {
            comps.push(backend.relabel_iso(src, dst)?);
        } else {
            comps.push(backend.from_initial(dst)?);
        }
    }
    SeqMor::new(unit_seq, carrier.clone(), comps)
}

/// The canonical augmentation of a monoid whose arity-one value is the
/// unit object: identity there, the zero collapse above.
pub fn standard_augmentation(
    cs: &CompositionStructure,
    mo: &Monoid<CompositionStructure>,
) -> Result<Augmentation<CompositionStructure>> {
    let backend = cs.backend();
    let unit_seq = cs.ctx().unit_seq();
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let src = mo.carrier.value(m)?;
        let dst = unit_seq.value(m)?;
        if m == 1 {
            comps.push(backend.relabel_iso(src, dst)?);
        } else {
            comps.push(backend.zero_map(src, dst)?);
        }
    }
    Ok(Augmentation {
        eps: SeqMor::new(mo.carrier.clone(), unit_seq, comps)?,
    })
}

/// Linear orders on `{1..m}` as basis words.
fn orders(m: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![vec![]];
    for k in 1..=m as u8 {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for w in &out {
            for pos in 0..=w.len() {
                let mut v = w.clone();
                v.insert(pos, k);
                next.push(v);
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn order_label(w: &[u8]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("")
}

/// The associative operad over the rational-linear backend: the span of
/// linear orders, with order substitution as composition.
pub fn ass_monoid(cs: &CompositionStructure) -> Result<Monoid<CompositionStructure>> {
    use crate::category::{BackendKind, QMat, Rat};
    use num_traits::One;
    let backend = cs.backend();
    if backend.kind() != BackendKind::QVect {
        return Err(Error::Capability(
            "the order-span operad is built over qvect".into(),
        ));
    }
    let ctx = cs.ctx();
    let bound = cs.bound();
    let per_arity: Vec<Vec<Vec<u8>>> = (1..=bound).map(orders).collect();
    let values: Vec<Obj> = per_arity
        .iter()
        .map(|os| {
            backend
                .atom(os.iter().map(|w| order_label(w)).collect())
                .expect("order labels are distinct")
        })
        .collect();
    // The adjacent transposition acts by relabelling letters.
    let gens: Vec<Vec<Mor>> = per_arity
        .iter()
        .enumerate()
        .map(|(idx, os)| {
            let m = idx + 1;
            (0..m.saturating_sub(1))
                .map(|i| {
                    let swap = |x: u8| -> u8 {
                        if x == i as u8 + 1 {
                            x + 1
                        } else if x == i as u8 + 2 {
                            x - 1
                        } else {
                            x
                        }
                    };
                    let mat = QMat::from_fn(os.len(), os.len(), |r, c| {
                        let image: Vec<u8> = os[c].iter().map(|&x| swap(x)).collect();
                        if os[r] == image {
                            Rat::one()
                        } else {
                            Rat::from_integer(0.into())
                        }
                    });
                    backend
                        .mor_from_matrix(&values[idx], &values[idx], mat)
                        .expect("permutation matrix fits")
                })
                .collect()
        })
        .collect();
    let carrier = SymmetricSequence::new(backend, "ass", values.clone(), gens)?;

    let pair = vec![carrier.clone(), carrier.clone()];
    let src_seq = ctx.compose_seq(&pair)?;
    let mut comps = Vec::with_capacity(bound);
    for m in 1..=bound {
        let a = FinSet::canonical(m);
        let co = ctx.compose(&pair, &a)?;
        let target_orders = &per_arity[m - 1];
        let components: Vec<Mor> = co
            .terms
            .iter()
            .map(|term| {
                // Basis of the summand: a tuple of one order per internal
                // vertex (root first, then blocks in canonical order).
                let pi = &term.tree.chain()[0];
                let k = pi.num_blocks();
                let block_orders: Vec<&Vec<Vec<u8>>> = (0..k)
                    .map(|j| &per_arity[pi.block(j).len() - 1])
                    .collect();
                let root_orders = &per_arity[k - 1];
                let dims: Vec<usize> = std::iter::once(root_orders.len())
                    .chain(block_orders.iter().map(|os| os.len()))
                    .collect();
                let total: usize = dims.iter().product();
                let mut cols = Vec::with_capacity(total);
                for c in 0..total {
                    let mut rem = c;
                    let mut digits = vec![0usize; dims.len()];
                    for (slot, d) in dims.iter().enumerate().rev() {
                        digits[slot] = rem % d;
                        rem /= d;
                    }
                    let tau = &root_orders[digits[0]];
                    let mut word: Vec<u8> = Vec::with_capacity(m);
                    for &t in tau {
                        let j = (t - 1) as usize;
                        let block = pi.block(j);
                        for &q in &block_orders[j][digits[j + 1]] {
                            word.push(block[(q - 1) as usize] as u8);
                        }
                    }
                    let row = target_orders
                        .iter()
                        .position(|w| *w == word)
                        .expect("substitution yields an order");
                    cols.push(vec![(row as u32, Rat::one())]);
                }
                let mat = QMat::from_cols(target_orders.len(), cols);
                backend.mor_from_matrix(&term.object, &values[m - 1], mat)
            })
            .collect::<Result<_>>()?;
        comps.push(backend.copair(&co.total, &components)?);
    }
    let m2 = SeqMor::new(src_seq, carrier.clone(), comps)?;
    let eta = unit_into(cs, &carrier)?;
    Ok(Monoid { carrier, m2, eta })
}

/// The trivial monoid on the unit sequence itself.
pub fn unit_monoid(cs: &CompositionStructure) -> Result<Monoid<CompositionStructure>> {
    let backend = cs.backend();
    let ctx = cs.ctx();
    let carrier = ctx.unit_seq();
    let pair = vec![carrier.clone(), carrier.clone()];
    let src_seq = ctx.compose_seq(&pair)?;
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let a = FinSet::canonical(m);
        let co = ctx.compose(&pair, &a)?;
        let dst = carrier.value(m)?;
        let components: Vec<Mor> = co
            .terms
            .iter()
            .map(|term| {
                if m == 1 {
                    let mask = vec![true; term.factors.len()];
                    let expand = backend.unit_insertion(&[], &mask)?;
                    Ok(expand.inverse().expect("unit expansion inverts"))
                } else {
                    backend.zero_map(&term.object, dst)
                }
            })
            .collect::<Result<_>>()?;
        comps.push(backend.copair(&co.total, &components)?);
    }
    let m2 = SeqMor::new(src_seq, carrier.clone(), comps)?;
    let eta = SeqMor::identity(&carrier, cs.bound())?;
    Ok(Monoid { carrier, m2, eta })
}

/// Conjugate a monoid by an invertible endomorphism of its carrier; the
/// result is a monoid exactly when the input is.
pub fn conjugated_monoid<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    phi: &P::Map,
    phi_inv: &P::Map,
) -> Result<Monoid<P>> {
    let pre = ps.mu_map(&[PArg::Map(phi_inv.clone()), PArg::Map(phi_inv.clone())])?;
    let m2 = ps.then(&ps.then(&pre, &mo.m2)?, phi)?;
    let eta = ps.then(&mo.eta, phi)?;
    Ok(Monoid {
        carrier: mo.carrier.clone(),
        m2,
        eta,
    })
}

/// A seeded invertible scalar endomorphism of a qvect carrier, one
/// nonzero rational per arity.
pub fn scalar_automorphism(
    cs: &CompositionStructure,
    carrier: &SymmetricSequence,
    seed: u64,
) -> Result<(SeqMor, SeqMor)> {
    use crate::category::{QMat, Rat};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let backend = cs.backend();
    let mut rng = StdRng::seed_from_u64(seed);
    let choices: [(i64, i64); 6] = [(1, 1), (2, 1), (1, 2), (-1, 1), (3, 1), (2, 3)];
    let mut fwd = Vec::with_capacity(cs.bound());
    let mut bwd = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let v = carrier.value(m)?;
        let (p, q) = choices[rng.gen_range(0..choices.len())];
        let lambda = Rat::new(p.into(), q.into());
        let inv = Rat::new(q.into(), p.into());
        let d = v.size();
        fwd.push(backend.mor_from_matrix(v, v, QMat::identity(d).scale(&lambda))?);
        bwd.push(backend.mor_from_matrix(v, v, QMat::identity(d).scale(&inv))?);
    }
    Ok((
        SeqMor::new(carrier.clone(), carrier.clone(), fwd)?,
        SeqMor::new(carrier.clone(), carrier.clone(), bwd)?,
    ))
}

/// The order-reversal involution of the order-span operad carrier.
pub fn order_reversal(
    cs: &CompositionStructure,
    ass: &Monoid<CompositionStructure>,
) -> Result<SeqMor> {
    use crate::category::{QMat, Rat};
    use num_traits::One;
    let backend = cs.backend();
    let mut comps = Vec::with_capacity(cs.bound());
    for m in 1..=cs.bound() {
        let os = orders(m);
        let v = ass.carrier.value(m)?;
        let mat = QMat::from_fn(os.len(), os.len(), |r, c| {
            let mut rev = os[c].clone();
            rev.reverse();
            if os[r] == rev {
                Rat::one()
            } else {
                Rat::from_integer(0.into())
            }
        });
        comps.push(backend.mor_from_matrix(v, v, mat)?);
    }
    SeqMor::new(ass.carrier.clone(), ass.carrier.clone(), comps)
}

/// A deliberately side-confused binary action: the multiplication
/// followed by order reversal at arity two only. Mistaking a left
/// action for a right one multiplies the two binary slots in the wrong
/// order, which on the order-span carrier is exactly this reversal;
/// conjugating by the reversal everywhere would be invisible (reversal
/// is an automorphism of the whole operad), so the twist is applied at
/// a single arity where only the mixed associativity squares notice.
pub fn wrong_side_action(
    cs: &CompositionStructure,
    mo: &Monoid<CompositionStructure>,
) -> Result<SeqMor> {
    let rev = order_reversal(cs, mo)?;
    let backend = cs.backend();
    let comps = (1..=cs.bound())
        .map(|m| {
            if m == 2 {
                backend.compose(rev.comp(2)?, mo.m2.comp(2)?)
            } else {
                Ok(mo.m2.comp(m)?.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SeqMor::new(mo.m2.src().clone(), mo.m2.dst().clone(), comps)
}

#[cfg(test)]
mod tests;
