//! The two-sided simplicial bar construction and its cosimplicial dual.
//!
//! Degree `n` is the `(n+2)`-ary product of the right coefficient, `n`
//! copies of the monoid, and the left coefficient. Inner faces collapse
//! an adjacent pair of monoid slots and multiply; the outer faces use
//! the module actions; degeneracies insert the unit and convert it with
//! `eta`. The identity checker replays exactly the face/degeneracy
//! equation families, instance by instance, as exact morphism
//! equalities.
//!
//! Running the same construction over the opposite pointed backend and
//! re-reading every structure map in the base category yields the
//! cosimplicial cobar construction; the dual identity families are
//! checked on the re-read maps with no reindexing.

use crate::category::{describe_difference, Mor, Obj, QMat, Rat};
use crate::combinatorics::FinSet;
use crate::error::{Error, Result};
use crate::monoid::{unit_bimodule, Augmentation, Module, Monoid, Side};
use crate::pseudomonoid::{CompositionStructure, PArg, Pseudomonoidal};
use crate::report::{CheckRecord, Report};
use num_traits::One;

/// A simplicial object materialized to a maximal degree.
pub struct SimplicialObject<P: Pseudomonoidal + ?Sized> {
    /// `objects[n]` is the degree-`n` object, `n <= max_degree`.
    pub objects: Vec<P::Ob>,
    /// `faces[n-1][i]` is `d_i : B_n -> B_{n-1}`, for `1 <= n <= max_degree`.
    pub faces: Vec<Vec<P::Map>>,
    /// `degeneracies[n][j]` is `s_j : B_n -> B_{n+1}`, for `n < max_degree`.
    pub degeneracies: Vec<Vec<P::Map>>,
}

impl<P: Pseudomonoidal> SimplicialObject<P> {
    pub fn max_degree(&self) -> usize {
        self.objects.len() - 1
    }

    pub fn face(&self, n: usize, i: usize) -> &P::Map {
        &self.faces[n - 1][i]
    }

    pub fn degeneracy(&self, n: usize, j: usize) -> &P::Map {
        &self.degeneracies[n][j]
    }
}

/// Single-point corruptions of the construction, for mutation tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarFault {
    /// Build `s_0` with the unit inserted one slot too far right
    /// (degrees >= 1, where that is still well-typed).
    DegeneracyUnitSlot,
}

/// The two-sided simplicial bar construction on a monoid with a right
/// and a left module as coefficients.
pub fn bar<P: Pseudomonoidal>(
    ps: &P,
    right: &Module<P>,
    mo: &Monoid<P>,
    left: &Module<P>,
    max_degree: usize,
) -> Result<SimplicialObject<P>> {
    bar_with_fault(ps, right, mo, left, max_degree, None)
}

pub fn bar_with_fault<P: Pseudomonoidal>(
    ps: &P,
    right: &Module<P>,
    mo: &Monoid<P>,
    left: &Module<P>,
    max_degree: usize,
    fault: Option<BarFault>,
) -> Result<SimplicialObject<P>> {
    if right.side != Side::Right || left.side != Side::Left {
        return Err(Error::domain(
            "bar coefficients are a right module and a left module, in that order",
        ));
    }
    let slots = |n: usize| -> Vec<P::Ob> {
        let mut v = vec![right.carrier.clone()];
        v.extend(std::iter::repeat(mo.carrier.clone()).take(n));
        v.push(left.carrier.clone());
        v
    };
    let objects: Vec<P::Ob> = (0..=max_degree)
        .map(|n| ps.mu(&slots(n)))
        .collect::<Result<_>>()?;

    let mut faces = Vec::with_capacity(max_degree);
    for n in 1..=max_degree {
        let xs = slots(n);
        let mut row = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let alpha = ps.alpha(&xs, i, 2)?;
            // Fill the collapsed slot with the right map: the action for
            // the outer windows, the multiplication inside.
            let inner: P::Map = if i == 0 {
                right.action.clone()
            } else if i == n {
                left.action.clone()
            } else {
                mo.m2.clone()
            };
            let mut args: Vec<PArg<P>> = Vec::with_capacity(n + 1);
            for (pos, ob) in xs
                .iter()
                .take(i)
                .cloned()
                .chain(std::iter::once(xs[i].clone()))
                .chain(xs.iter().skip(i + 2).cloned())
                .enumerate()
            {
                if pos == i {
                    args.push(PArg::Map(inner.clone()));
                } else {
                    args.push(PArg::Id(ob));
                }
            }
            let fill = ps.mu_map(&args)?;
            row.push(ps.then(&alpha, &fill)?);
        }
        faces.push(row);
    }

    let mut degeneracies = Vec::with_capacity(max_degree);
    for n in 0..max_degree {
        let xs = slots(n);
        let mut row = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut slot = j + 1;
            if fault == Some(BarFault::DegeneracyUnitSlot) && j == 0 && n >= 1 {
                slot = 2;
            }
            let iota = ps.iota(&xs, slot)?;
            let mut args: Vec<PArg<P>> = Vec::with_capacity(n + 3);
            let mut widened = xs.clone();
            widened.insert(slot, ps.unit());
            for (pos, ob) in widened.into_iter().enumerate() {
                if pos == slot {
                    args.push(PArg::Map(mo.eta.clone()));
                } else {
                    args.push(PArg::Id(ob));
                }
            }
            let fill = ps.mu_map(&args)?;
            row.push(ps.then(&iota, &fill)?);
        }
        degeneracies.push(row);
    }

    Ok(SimplicialObject {
        objects,
        faces,
        degeneracies,
    })
}

/// The reduced bar construction of an augmented monoid: both
/// coefficients are the unit bimodule.
pub fn reduced_bar<P: Pseudomonoidal>(
    ps: &P,
    mo: &Monoid<P>,
    aug: &Augmentation<P>,
    max_degree: usize,
) -> Result<SimplicialObject<P>> {
    let bd = unit_bimodule(ps, mo, aug)?;
    let right = crate::monoid::bimodule_side(&bd, Side::Right);
    let left = crate::monoid::bimodule_side(&bd, Side::Left);
    bar(ps, &right, mo, &left, max_degree)
}

/// One face/degeneracy identity instance.
#[derive(Clone, Debug)]
enum SimplicialIdentity {
    /// `d_i d_k = d_{k-1} d_i`, `i < k`, at degree `n` (tuple `[n,i,k]`).
    FaceFace(usize, usize, usize),
    /// `s_i s_k = s_{k+1} s_i`, `i <= k`.
    DegenDegen(usize, usize, usize),
    /// `d_i s_k = s_{k-1} d_i`, `i < k`.
    MixedBelow(usize, usize, usize),
    /// `d_i s_k = s_k d_{i-1}`, `i > k + 1`.
    MixedAbove(usize, usize, usize),
    /// `d_i s_k = id`, `i = k` or `i = k + 1`.
    MixedIdentity(usize, usize, usize),
}

fn simplicial_instances(max_degree: usize) -> Vec<SimplicialIdentity> {
    let mut out = Vec::new();
    for n in 2..=max_degree {
        for k in 1..=n {
            for i in 0..k {
                out.push(SimplicialIdentity::FaceFace(n, i, k));
            }
        }
    }
    for n in 0..max_degree.saturating_sub(1) {
        for k in 0..=n {
            for i in 0..=k {
                out.push(SimplicialIdentity::DegenDegen(n, i, k));
            }
        }
    }
    for n in 0..max_degree {
        for k in 0..=n {
            for i in 0..=n + 1 {
                if i < k && n >= 1 {
                    out.push(SimplicialIdentity::MixedBelow(n, i, k));
                } else if i > k + 1 && n >= 1 {
                    out.push(SimplicialIdentity::MixedAbove(n, i, k));
                } else if i == k || i == k + 1 {
                    out.push(SimplicialIdentity::MixedIdentity(n, i, k));
                }
            }
        }
    }
    out
}

fn identity_records<P: Pseudomonoidal>(
    ps: &P,
    s: &SimplicialObject<P>,
    inst: &SimplicialIdentity,
) -> Result<Vec<CheckRecord>> {
    let (family, tuple, lhs, rhs) = match *inst {
        SimplicialIdentity::FaceFace(n, i, k) => {
            let lhs = ps.then(s.face(n, k), s.face(n - 1, i))?;
            let rhs = ps.then(s.face(n, i), s.face(n - 1, k - 1))?;
            ("dd", vec![n, i, k], lhs, rhs)
        }
        SimplicialIdentity::DegenDegen(n, i, k) => {
            let lhs = ps.then(s.degeneracy(n, k), s.degeneracy(n + 1, i))?;
            let rhs = ps.then(s.degeneracy(n, i), s.degeneracy(n + 1, k + 1))?;
            ("ss", vec![n, i, k], lhs, rhs)
        }
        SimplicialIdentity::MixedBelow(n, i, k) => {
            let lhs = ps.then(s.degeneracy(n, k), s.face(n + 1, i))?;
            let rhs = ps.then(s.face(n, i), s.degeneracy(n - 1, k - 1))?;
            ("ds-below", vec![n, i, k], lhs, rhs)
        }
        SimplicialIdentity::MixedAbove(n, i, k) => {
            let lhs = ps.then(s.degeneracy(n, k), s.face(n + 1, i))?;
            let rhs = ps.then(s.face(n, i - 1), s.degeneracy(n - 1, k))?;
            ("ds-above", vec![n, i, k], lhs, rhs)
        }
        SimplicialIdentity::MixedIdentity(n, i, k) => {
            let lhs = ps.then(s.degeneracy(n, k), s.face(n + 1, i))?;
            let rhs = ps.identity(&s.objects[n])?;
            ("ds-id", vec![n, i, k], lhs, rhs)
        }
    };
    Ok(ps
        .compare(&lhs, &rhs)
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
        .collect())
}

/// Replay every simplicial identity instance expressible within the
/// materialized degrees, as exact equalities.
pub fn check_simplicial_identities<P>(ps: &P, s: &SimplicialObject<P>) -> Result<Report>
where
    P: Pseudomonoidal + Sync,
    SimplicialObject<P>: Sync,
{
    let instances = simplicial_instances(s.max_degree());
    let results = crate::par_map(instances, |inst| identity_records(ps, s, &inst));
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    Ok(Report::from_records(records))
}

// ---------------------------------------------------------------------
// Evaluation-set views, chain differential, and the cosimplicial dual
// ---------------------------------------------------------------------

/// The per-evaluation-set view of a bar construction over the
/// composition structure: plain backend objects and morphisms.
pub struct SimplicialView {
    pub set_size: usize,
    pub objects: Vec<Obj>,
    pub faces: Vec<Vec<Mor>>,
    pub degeneracies: Vec<Vec<Mor>>,
}

pub fn simplicial_view(
    s: &SimplicialObject<CompositionStructure>,
    set_size: usize,
) -> Result<SimplicialView> {
    let objects = s
        .objects
        .iter()
        .map(|ob| Ok(ob.evaluate(&FinSet::canonical(set_size))?))
        .collect::<Result<_>>()?;
    let faces = s
        .faces
        .iter()
        .map(|row| row.iter().map(|f| Ok(f.comp(set_size)?.clone())).collect())
        .collect::<Result<_>>()?;
    let degeneracies = s
        .degeneracies
        .iter()
        .map(|row| row.iter().map(|f| Ok(f.comp(set_size)?.clone())).collect())
        .collect::<Result<_>>()?;
    Ok(SimplicialView {
        set_size,
        objects,
        faces,
        degeneracies,
    })
}

/// The alternating-sum chain differential at one evaluation set; only
/// meaningful over the rational-linear backend.
pub fn chain_differential(view: &SimplicialView, n: usize) -> Result<QMat> {
    let row = &view.faces[n - 1];
    let first = row[0]
        .matrix()
        .ok_or_else(|| Error::Capability("chain differentials need matrices".into()))?;
    let mut acc = QMat::zero(first.rows(), first.cols());
    for (i, face) in row.iter().enumerate() {
        let m = face
            .matrix()
            .ok_or_else(|| Error::Capability("chain differentials need matrices".into()))?;
        let signed = if i % 2 == 0 {
            m.clone()
        } else {
            m.scale(&-Rat::one())
        };
        acc = acc.add(&signed);
    }
    Ok(acc)
}

/// `d . d = 0` for the induced chain complex, degree by degree.
pub fn boundary_squares_to_zero(view: &SimplicialView) -> Result<Report> {
    let mut records = Vec::new();
    for n in 2..view.objects.len() {
        let d_n = chain_differential(view, n)?;
        let d_n1 = chain_differential(view, n - 1)?;
        let square = QMat::composed(&d_n1, &d_n);
        let ok = square.is_zero();
        let record = if ok {
            CheckRecord::pass("boundary-squared", vec![n], format!("set size {}", view.set_size))
        } else {
            CheckRecord::fail(
                "boundary-squared",
                vec![n],
                format!("set size {}", view.set_size),
                serde_json::json!({ "nonzero_entries": square.nnz() }),
            )
        };
        records.push(record);
    }
    Ok(Report::from_records(records))
}

/// A cosimplicial object in the base pointed category, obtained by
/// re-reading a bar construction over the opposite backend: arrows
/// reverse, indices stay put.
pub struct CosimplicialObject {
    pub set_size: usize,
    pub objects: Vec<Obj>,
    /// `cofaces[n-1][i] : objects[n-1] -> objects[n]`.
    pub cofaces: Vec<Vec<Mor>>,
    /// `codegeneracies[n][j] : objects[n+1] -> objects[n]`.
    pub codegeneracies: Vec<Vec<Mor>>,
}

/// The cosimplicial cobar construction of an augmented monoid over the
/// opposite pointed backend, re-read in the base category at one
/// evaluation set.
pub fn cobar(
    ps: &CompositionStructure,
    mo: &Monoid<CompositionStructure>,
    aug: &Augmentation<CompositionStructure>,
    max_degree: usize,
    set_size: usize,
) -> Result<CosimplicialObject> {
    if ps.backend().kind() != crate::category::BackendKind::OpPSet {
        return Err(Error::Capability(
            "the cobar construction re-reads a bar construction over the opposite backend"
                .into(),
        ));
    }
    let s = reduced_bar(ps, mo, aug, max_degree)?;
    let view = simplicial_view(&s, set_size)?;
    let objects = view
        .objects
        .iter()
        .map(|ob| ob.reinterpret_opposite())
        .collect::<Result<_>>()?;
    let cofaces = view
        .faces
        .iter()
        .map(|row| row.iter().map(|f| f.reinterpret_opposite()).collect())
        .collect::<Result<_>>()?;
    let codegeneracies = view
        .degeneracies
        .iter()
        .map(|row| row.iter().map(|f| f.reinterpret_opposite()).collect())
        .collect::<Result<_>>()?;
    Ok(CosimplicialObject {
        set_size,
        objects,
        cofaces,
        codegeneracies,
    })
}

/// The dual identity families on the re-read maps, same index ranges,
/// no renumbering.
pub fn check_cosimplicial_identities(c: &CosimplicialObject) -> Result<Report> {
    let backend = crate::category::Backend::pset();
    let max_degree = c.objects.len() - 1;
    let mut records = Vec::new();
    let mut push = |family: &str, tuple: Vec<usize>, lhs: &Mor, rhs: &Mor| {
        let ok = lhs == rhs;
        if ok {
            records.push(CheckRecord::pass(family, tuple, format!("set size {}", c.set_size)));
        } else {
            records.push(CheckRecord::fail(
                family,
                tuple,
                format!("set size {}", c.set_size),
                describe_difference(lhs, rhs),
            ));
        }
    };
    // delta_k . delta_i = delta_i . delta_{k-1} for i < k.
    for n in 2..=max_degree {
        for k in 1..=n {
            for i in 0..k {
                let lhs = backend.compose(&c.cofaces[n - 1][k], &c.cofaces[n - 2][i])?;
                let rhs = backend.compose(&c.cofaces[n - 1][i], &c.cofaces[n - 2][k - 1])?;
                push("co-dd", vec![n, i, k], &lhs, &rhs);
            }
        }
    }
    // sigma_k . sigma_i = sigma_i . sigma_{k+1} for i <= k.
    for n in 0..max_degree.saturating_sub(1) {
        for k in 0..=n {
            for i in 0..=k {
                let lhs = backend.compose(&c.codegeneracies[n][k], &c.codegeneracies[n + 1][i])?;
                let rhs =
                    backend.compose(&c.codegeneracies[n][i], &c.codegeneracies[n + 1][k + 1])?;
                push("co-ss", vec![n, i, k], &lhs, &rhs);
            }
        }
    }
    // Mixed families.
    for n in 0..max_degree {
        for k in 0..=n {
            for i in 0..=n + 1 {
                if i < k && n >= 1 {
                    let lhs = backend.compose(&c.codegeneracies[n][k], &c.cofaces[n][i])?;
                    let rhs = backend.compose(&c.cofaces[n - 1][i], &c.codegeneracies[n - 1][k - 1])?;
                    push("co-ds-below", vec![n, i, k], &lhs, &rhs);
                } else if i > k + 1 && n >= 1 {
                    let lhs = backend.compose(&c.codegeneracies[n][k], &c.cofaces[n][i])?;
                    let rhs = backend.compose(&c.cofaces[n - 1][i - 1], &c.codegeneracies[n - 1][k])?;
                    push("co-ds-above", vec![n, i, k], &lhs, &rhs);
                } else if i == k || i == k + 1 {
                    let lhs = backend.compose(&c.codegeneracies[n][k], &c.cofaces[n][i])?;
                    let rhs = backend.identity(&c.objects[n]);
                    push("co-ds-id", vec![n, i, k], &lhs, &rhs);
                }
            }
        }
    }
    Ok(Report::from_records(records))
}

/// Dimension (or cardinality) table of a bar construction: rows are
/// degrees, columns evaluation-set sizes.
pub fn dimension_table(
    s: &SimplicialObject<CompositionStructure>,
    max_set: usize,
) -> Result<Vec<Vec<usize>>> {
    (0..=s.max_degree())
        .map(|n| {
            (1..=max_set)
                .map(|m| Ok(s.objects[n].evaluate(&FinSet::canonical(m))?.size()))
                .collect()
        })
        .collect()
}

/// JSON export of a bar construction over the composition structure.
pub fn simplicial_json(
    s: &SimplicialObject<CompositionStructure>,
    max_set: usize,
) -> Result<serde_json::Value> {
    let mut degrees = Vec::new();
    for n in 0..=s.max_degree() {
        let mut per_set = Vec::new();
        for m in 1..=max_set {
            let view_obj = s.objects[n].evaluate(&FinSet::canonical(m))?;
            per_set.push(serde_json::json!({
                "set_size": m,
                "size": view_obj.size(),
                "object": view_obj,
            }));
        }
        let faces: Vec<serde_json::Value> = if n >= 1 {
            s.faces[n - 1]
                .iter()
                .map(|f| {
                    let comps: Vec<serde_json::Value> = (1..=max_set)
                        .map(|m| f.comp(m).map(|c| c.payload_json()))
                        .collect::<Result<_>>()?;
                    Ok(serde_json::Value::Array(comps))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let degeneracies: Vec<serde_json::Value> = if n < s.max_degree() {
            s.degeneracies[n]
                .iter()
                .map(|f| {
                    let comps: Vec<serde_json::Value> = (1..=max_set)
                        .map(|m| f.comp(m).map(|c| c.payload_json()))
                        .collect::<Result<_>>()?;
                    Ok(serde_json::Value::Array(comps))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        degrees.push(serde_json::json!({
            "degree": n,
            "objects": per_set,
            "faces": faces,
            "degeneracies": degeneracies,
        }));
    }
    Ok(serde_json::json!({ "degrees": degrees }))
}
