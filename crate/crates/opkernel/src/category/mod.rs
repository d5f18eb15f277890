//! Pluggable exact symmetric monoidal backends with finite coproducts.
//!
//! Three backends ship: `qvect` (finite-dimensional rational vector
//! spaces, tensor = tensor product, coproduct = direct sum), `pset`
//! (finite pointed sets, tensor = smash product, coproduct = wedge) and
//! `op-pset` (the opposite of `pset`, whose coproducts are cartesian
//! products of pointed sets). The smash product does not commute with
//! products, which is exactly the situation the rest of the crate is
//! built to handle.
//!
//! Objects are structural terms over atoms; morphisms carry either an
//! exact sparse rational matrix or a pointed function table. For the
//! opposite backend the table is stored in the base direction (from the
//! target's underlying set to the source's), so composition is plain
//! table composition read backwards.

mod node;
mod ptable;
mod qmat;

pub use node::{BaseKind, Node, Shape};
pub use ptable::PTable;
pub use qmat::{rat, rat_from_str, rat_int, rat_to_string, QMat, Rat};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BackendKind {
    #[serde(rename = "qvect")]
    QVect,
    #[serde(rename = "pset")]
    PSet,
    #[serde(rename = "op-pset")]
    OpPSet,
}

impl BackendKind {
    pub fn base(self) -> BaseKind {
        match self {
            BackendKind::QVect => BaseKind::Linear,
            BackendKind::PSet | BackendKind::OpPSet => BaseKind::Pointed,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::QVect => "qvect",
            BackendKind::PSet => "pset",
            BackendKind::OpPSet => "op-pset",
        }
    }
}

/// A stateless capability record for one of the shipped backends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Backend {
    kind: BackendKind,
}

/// An object of a backend. Cheap to clone; the structure is shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obj {
    backend: BackendKind,
    node: Arc<Node>,
}

impl Obj {
    pub fn backend(&self) -> BackendKind {
        self.backend
    }

    pub fn node(&self) -> &Arc<Node> {
        &self.node
    }

    /// Dimension in `qvect`, cardinality in the pointed backends.
    pub fn size(&self) -> usize {
        self.node.size
    }

    /// Reinterpret across the `pset`/`op-pset` duality.
    pub fn reinterpret_opposite(&self) -> Result<Obj> {
        let backend = match self.backend {
            BackendKind::PSet => BackendKind::OpPSet,
            BackendKind::OpPSet => BackendKind::PSet,
            BackendKind::QVect => {
                return Err(Error::Capability("qvect has no opposite backend here".into()))
            }
        };
        Ok(Obj {
            backend,
            node: self.node.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorData {
    Mat(QMat),
    Table(PTable),
}

/// A morphism of a backend, with decidable syntactic equality.
///
/// For `op-pset` the stored table runs in the base direction, from the
/// underlying set of `dst` to the underlying set of `src`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mor {
    backend: BackendKind,
    src: Obj,
    dst: Obj,
    data: MorData,
}

impl Mor {
    pub fn backend(&self) -> BackendKind {
        self.backend
    }

    pub fn src(&self) -> &Obj {
        &self.src
    }

    pub fn dst(&self) -> &Obj {
        &self.dst
    }

    pub fn data(&self) -> &MorData {
        &self.data
    }

    pub fn matrix(&self) -> Option<&QMat> {
        match &self.data {
            MorData::Mat(m) => Some(m),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&PTable> {
        match &self.data {
            MorData::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_invertible(&self) -> bool {
        match &self.data {
            MorData::Mat(m) => m.is_invertible(),
            MorData::Table(t) => t.is_bijective(),
        }
    }

    /// The two-sided inverse, when one exists.
    pub fn inverse(&self) -> Option<Mor> {
        let data = match &self.data {
            MorData::Mat(m) => MorData::Mat(m.inverse()?),
            MorData::Table(t) => MorData::Table(t.inverted()?),
        };
        Some(Mor {
            backend: self.backend,
            src: self.dst.clone(),
            dst: self.src.clone(),
            data,
        })
    }

    /// Swap two source-basis columns (qvect only); the standard
    /// single-point corruption for mutation tests.
    pub fn with_swapped_columns(&self, i: usize, j: usize) -> Result<Mor> {
        match &self.data {
            MorData::Mat(m) => Ok(Mor {
                backend: self.backend,
                src: self.src.clone(),
                dst: self.dst.clone(),
                data: MorData::Mat(m.swapped_columns(i, j)),
            }),
            MorData::Table(_) => Err(Error::Capability(
                "column swaps are a matrix corruption".into(),
            )),
        }
    }

    /// Reinterpret across the `pset`/`op-pset` duality: source and
    /// target swap, the table stays put.
    pub fn reinterpret_opposite(&self) -> Result<Mor> {
        Ok(Mor {
            backend: match self.backend {
                BackendKind::PSet => BackendKind::OpPSet,
                BackendKind::OpPSet => BackendKind::PSet,
                BackendKind::QVect => {
                    return Err(Error::Capability("qvect has no opposite backend here".into()))
                }
            },
            src: self.dst.reinterpret_opposite()?,
            dst: self.src.reinterpret_opposite()?,
            data: self.data.clone(),
        })
    }

    /// Full JSON form of just the payload (no endpoint objects).
    pub fn payload_json(&self) -> serde_json::Value {
        let repr = match &self.data {
            MorData::Mat(m) => PayloadRepr::Matrix {
                rows: m.rows(),
                cols: m.cols(),
                entries: m
                    .entries()
                    .map(|(r, c, v)| (r as u32, c as u32, rat_to_string(v)))
                    .collect(),
            },
            MorData::Table(t) => PayloadRepr::Table {
                src_card: t.src_card,
                dst_card: t.dst_card,
                map: t.map.clone(),
            },
        };
        serde_json::to_value(repr).expect("payload serializes")
    }

    /// A bounded JSON sketch of the payload, for failure reports.
    pub fn payload_summary(&self, max_entries: usize) -> serde_json::Value {
        match &self.data {
            MorData::Mat(m) => {
                let entries: Vec<serde_json::Value> = m
                    .entries()
                    .take(max_entries)
                    .map(|(r, c, v)| serde_json::json!([r, c, rat_to_string(v)]))
                    .collect();
                serde_json::json!({
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "nonzeros": m.nnz(),
                    "entries": entries,
                })
            }
            MorData::Table(t) => {
                let head: Vec<u32> = t.map.iter().take(max_entries).copied().collect();
                serde_json::json!({
                    "src_card": t.src_card,
                    "dst_card": t.dst_card,
                    "map_prefix": head,
                })
            }
        }
    }
}

/// Where two morphisms with the same shape first disagree.
pub fn describe_difference(f: &Mor, g: &Mor) -> serde_json::Value {
    match (&f.data, &g.data) {
        (MorData::Mat(a), MorData::Mat(b)) => {
            for c in 0..a.cols().min(b.cols()) {
                if a.col(c) != b.col(c) {
                    return serde_json::json!({
                        "kind": "matrix",
                        "column": c,
                        "lhs": a.col(c).iter().map(|(r, v)| serde_json::json!([r, rat_to_string(v)])).collect::<Vec<_>>(),
                        "rhs": b.col(c).iter().map(|(r, v)| serde_json::json!([r, rat_to_string(v)])).collect::<Vec<_>>(),
                    });
                }
            }
            serde_json::json!({ "kind": "matrix", "note": "shape mismatch",
                "lhs_shape": [a.rows(), a.cols()], "rhs_shape": [b.rows(), b.cols()] })
        }
        (MorData::Table(a), MorData::Table(b)) => {
            for e in 0..a.map.len().min(b.map.len()) {
                if a.map[e] != b.map[e] {
                    return serde_json::json!({
                        "kind": "table", "element": e, "lhs": a.map[e], "rhs": b.map[e],
                    });
                }
            }
            serde_json::json!({ "kind": "table", "note": "shape mismatch",
                "lhs_card": [a.src_card, a.dst_card], "rhs_card": [b.src_card, b.dst_card] })
        }
        _ => serde_json::json!({ "kind": "payload-kind-mismatch" }),
    }
}

impl Backend {
    pub fn new(kind: BackendKind) -> Self {
        Backend { kind }
    }

    pub fn qvect() -> Self {
        Backend::new(BackendKind::QVect)
    }

    pub fn pset() -> Self {
        Backend::new(BackendKind::PSet)
    }

    pub fn op_pset() -> Self {
        Backend::new(BackendKind::OpPSet)
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    fn base(&self) -> BaseKind {
        self.kind.base()
    }

    /// Opposite backend; an involution on the pointed pair.
    pub fn opposite(&self) -> Result<Backend> {
        match self.kind {
            BackendKind::PSet => Ok(Backend::op_pset()),
            BackendKind::OpPSet => Ok(Backend::pset()),
            BackendKind::QVect => Err(Error::Capability(
                "the qvect backend does not expose its products; no opposite is shipped".into(),
            )),
        }
    }

    /// Tensoring with the initial object yields the initial object in
    /// every shipped backend, so size-zero factors collapse terms.
    pub fn initial_absorbing(&self) -> bool {
        true
    }

    fn obj(&self, node: Arc<Node>) -> Obj {
        Obj {
            backend: self.kind,
            node,
        }
    }

    fn guard(&self, objs: &[&Obj]) -> Result<()> {
        for o in objs {
            if o.backend != self.kind {
                return Err(Error::MixedBackends(format!(
                    "expected {}, got {}",
                    self.kind.name(),
                    o.backend.name()
                )));
            }
        }
        Ok(())
    }

    fn guard_mor(&self, mors: &[&Mor]) -> Result<()> {
        for m in mors {
            if m.backend != self.kind {
                return Err(Error::MixedBackends(format!(
                    "expected {}, got {}",
                    self.kind.name(),
                    m.backend.name()
                )));
            }
        }
        Ok(())
    }

    /// The monoidal unit: a one-dimensional space, or the two-point set.
    pub fn unit(&self) -> Obj {
        match self.base() {
            BaseKind::Linear => self.obj(Node::atom(BaseKind::Linear, vec!["s".into()])),
            BaseKind::Pointed => self.obj(Node::atom(
                BaseKind::Pointed,
                vec!["*".into(), "s".into()],
            )),
        }
    }

    /// The initial object: the zero space, or the one-point set (which
    /// is also terminal there).
    pub fn initial(&self) -> Obj {
        match self.base() {
            BaseKind::Linear => self.obj(Node::atom(BaseKind::Linear, vec![])),
            BaseKind::Pointed => self.obj(Node::atom(BaseKind::Pointed, vec!["*".into()])),
        }
    }

    pub fn terminal(&self) -> Result<Obj> {
        match self.kind {
            BackendKind::QVect => Ok(self.initial()),
            BackendKind::PSet | BackendKind::OpPSet => Ok(self.initial()),
        }
    }

    /// An atomic object from labels. In the pointed backends the first
    /// label is the basepoint, so at least one label is required.
    pub fn atom(&self, labels: Vec<String>) -> Result<Obj> {
        if self.base() == BaseKind::Pointed && labels.is_empty() {
            return Err(Error::domain("a pointed set needs at least its basepoint"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::domain(format!("duplicate label {l:?}")));
            }
        }
        Ok(self.obj(Node::atom(self.base(), labels)))
    }

    /// An atom with generated labels: `dim` basis vectors, or a pointed
    /// set with `card` elements.
    pub fn free_atom(&self, size: usize, prefix: &str) -> Result<Obj> {
        match self.base() {
            BaseKind::Linear => self.atom((0..size).map(|i| format!("{prefix}{i}")).collect()),
            BaseKind::Pointed => {
                if size == 0 {
                    return Err(Error::domain("pointed sets have cardinality at least one"));
                }
                let mut labels = vec!["*".to_string()];
                labels.extend((1..size).map(|i| format!("{prefix}{i}")));
                self.atom(labels)
            }
        }
    }

    /// n-ary monoidal product in one canonical pass. A single factor is
    /// returned unchanged; the empty family gives the unit.
    pub fn tensor(&self, xs: &[Obj]) -> Result<Obj> {
        self.guard(&xs.iter().collect::<Vec<_>>())?;
        match xs.len() {
            0 => Ok(self.unit()),
            1 => Ok(xs[0].clone()),
            _ => Ok(self.obj(Node::tensor(
                self.base(),
                xs.iter().map(|o| o.node.clone()).collect(),
            ))),
        }
    }

    /// Finite coproduct with injections. A single summand is returned
    /// unchanged (with the identity as injection); the empty family
    /// gives the initial object.
    pub fn coproduct(&self, xs: &[Obj]) -> Result<(Obj, Vec<Mor>)> {
        self.guard(&xs.iter().collect::<Vec<_>>())?;
        match xs.len() {
            0 => Ok((self.initial(), Vec::new())),
            1 => {
                let total = xs[0].clone();
                let inj = self.identity(&total);
                Ok((total, vec![inj]))
            }
            _ => {
                let total = match self.kind {
                    BackendKind::QVect | BackendKind::PSet => self.obj(Node::coprod(
                        self.base(),
                        xs.iter().map(|o| o.node.clone()).collect(),
                    )),
                    BackendKind::OpPSet => self.obj(Node::prod(
                        BaseKind::Pointed,
                        xs.iter().map(|o| o.node.clone()).collect(),
                    )),
                };
                let injections = (0..xs.len())
                    .map(|i| self.injection_into(&total, xs, i))
                    .collect();
                Ok((total, injections))
            }
        }
    }

    fn injection_into(&self, total: &Obj, xs: &[Obj], i: usize) -> Mor {
        let data = match self.kind {
            BackendKind::QVect => {
                let dims: Vec<usize> = xs.iter().map(|o| o.size()).collect();
                MorData::Mat(QMat::injection(&dims, i))
            }
            BackendKind::PSet => {
                let offset: usize = xs[..i].iter().map(|o| o.size() - 1).sum();
                let card = xs[i].size();
                let mut map = vec![0u32; card];
                for e in 1..card {
                    map[e] = (offset + e) as u32;
                }
                MorData::Table(PTable::new(card, total.size(), map))
            }
            BackendKind::OpPSet => {
                // Base projection: decode the product, keep slot i.
                let cards: Vec<usize> = xs.iter().map(|o| o.size()).collect();
                let map = (0..total.size())
                    .map(|e| node::decode(e, &cards)[i] as u32)
                    .collect();
                MorData::Table(PTable::new(total.size(), xs[i].size(), map))
            }
        };
        Mor {
            backend: self.kind,
            src: xs[i].clone(),
            dst: total.clone(),
            data,
        }
    }

    /// Copairing: given `f_i : X_i -> T` and the coproduct of the `X_i`,
    /// the induced map out of the coproduct.
    pub fn copair(&self, total: &Obj, comps: &[Mor]) -> Result<Mor> {
        self.guard(&[total])?;
        self.guard_mor(&comps.iter().collect::<Vec<_>>())?;
        if comps.is_empty() {
            return Err(Error::domain("copairing needs at least one component"));
        }
        let target = comps[0].dst.clone();
        for c in comps {
            if c.dst != target {
                return Err(Error::domain("copairing components must share a target"));
            }
        }
        if comps.len() == 1 {
            if *total != comps[0].src {
                return Err(Error::domain("coproduct object does not match component source"));
            }
            return Ok(comps[0].clone());
        }
        let kids = total.node.children();
        if kids.len() != comps.len()
            || kids
                .iter()
                .zip(comps)
                .any(|(k, c)| **k != *c.src.node)
        {
            return Err(Error::domain("coproduct object does not match component sources"));
        }
        let data = match self.kind {
            BackendKind::QVect => {
                let mats: Vec<&QMat> = comps.iter().map(|c| c.matrix().unwrap()).collect();
                MorData::Mat(QMat::concat_cols(target.size(), &mats))
            }
            BackendKind::PSet => {
                let mut map = vec![0u32; total.size()];
                let mut offset = 0usize;
                for c in comps {
                    let t = c.table().unwrap();
                    for e in 1..t.src_card {
                        map[offset + e] = t.map[e];
                    }
                    offset += t.src_card - 1;
                }
                MorData::Table(PTable::new(total.size(), target.size(), map))
            }
            BackendKind::OpPSet => {
                // Base pairing into the product.
                let cards: Vec<usize> = comps.iter().map(|c| c.src.size()).collect();
                let base_src = target.size();
                let map = (0..base_src)
                    .map(|t| {
                        let digits: Vec<usize> = comps
                            .iter()
                            .map(|c| c.table().unwrap().apply(t))
                            .collect();
                        node::encode(&digits, &cards) as u32
                    })
                    .collect();
                MorData::Table(PTable::new(base_src, total.size(), map))
            }
        };
        Ok(Mor {
            backend: self.kind,
            src: total.clone(),
            dst: target,
            data,
        })
    }

    /// Finite product with projections (pointed-set backend only; this
    /// is the capability the opposite adaptor needs).
    pub fn product(&self, xs: &[Obj]) -> Result<(Obj, Vec<Mor>)> {
        if self.kind != BackendKind::PSet {
            return Err(Error::Capability(format!(
                "{} does not expose finite products",
                self.kind.name()
            )));
        }
        self.guard(&xs.iter().collect::<Vec<_>>())?;
        match xs.len() {
            0 => Ok((self.terminal()?, Vec::new())),
            1 => {
                let total = xs[0].clone();
                let proj = self.identity(&total);
                Ok((total, vec![proj]))
            }
            _ => {
                let total = self.obj(Node::prod(
                    BaseKind::Pointed,
                    xs.iter().map(|o| o.node.clone()).collect(),
                ));
                let cards: Vec<usize> = xs.iter().map(|o| o.size()).collect();
                let projections = (0..xs.len())
                    .map(|i| {
                        let map = (0..total.size())
                            .map(|e| node::decode(e, &cards)[i] as u32)
                            .collect();
                        Mor {
                            backend: self.kind,
                            src: total.clone(),
                            dst: xs[i].clone(),
                            data: MorData::Table(PTable::new(total.size(), xs[i].size(), map)),
                        }
                    })
                    .collect();
                Ok((total, projections))
            }
        }
    }

    /// Pairing into a product from maps `f_i : S -> X_i`.
    pub fn pair(&self, total: &Obj, comps: &[Mor]) -> Result<Mor> {
        if self.kind != BackendKind::PSet {
            return Err(Error::Capability(format!(
                "{} does not expose finite products",
                self.kind.name()
            )));
        }
        if comps.is_empty() {
            return Err(Error::domain("pairing needs at least one component"));
        }
        let source = comps[0].src.clone();
        for c in comps {
            if c.src != source {
                return Err(Error::domain("pairing components must share a source"));
            }
        }
        if comps.len() == 1 {
            return Ok(comps[0].clone());
        }
        let cards: Vec<usize> = comps.iter().map(|c| c.dst.size()).collect();
        let map = (0..source.size())
            .map(|s| {
                let digits: Vec<usize> = comps.iter().map(|c| c.table().unwrap().apply(s)).collect();
                node::encode(&digits, &cards) as u32
            })
            .collect();
        Ok(Mor {
            backend: self.kind,
            src: source,
            dst: total.clone(),
            data: MorData::Table(PTable::new(comps[0].src.size(), total.size(), map)),
        })
    }

    /// The unique map into an initial-sized object (the zero space, or a
    /// one-point set).
    pub fn zero_map(&self, src: &Obj, dst: &Obj) -> Result<Mor> {
        self.guard(&[src, dst])?;
        let trivial = match self.kind {
            BackendKind::QVect => dst.size() == 0,
            BackendKind::PSet | BackendKind::OpPSet => dst.size() == 1,
        };
        if !trivial {
            return Err(Error::domain("zero maps land in initial-sized objects"));
        }
        let data = match self.kind {
            BackendKind::QVect => MorData::Mat(QMat::zero(0, src.size())),
            BackendKind::PSet => MorData::Table(PTable::collapse(src.size(), 1)),
            BackendKind::OpPSet => MorData::Table(PTable::new(1, src.size(), vec![0])),
        };
        Ok(Mor {
            backend: self.kind,
            src: src.clone(),
            dst: dst.clone(),
            data,
        })
    }

    /// The identity-shaped morphism between two objects of equal size,
    /// matching their canonical element or basis enumerations. This is
    /// how generators are named: the unit basis vector of `S` goes to
    /// the generator of a one-dimensional value, and so on.
    pub fn relabel_iso(&self, src: &Obj, dst: &Obj) -> Result<Mor> {
        self.guard(&[src, dst])?;
        if src.size() != dst.size() {
            return Err(Error::domain("relabelling needs equal sizes"));
        }
        let data = match self.kind {
            BackendKind::QVect => MorData::Mat(QMat::identity(src.size())),
            BackendKind::PSet | BackendKind::OpPSet => {
                MorData::Table(PTable::identity(src.size()))
            }
        };
        Ok(Mor {
            backend: self.kind,
            src: src.clone(),
            dst: dst.clone(),
            data,
        })
    }

    /// The unique map out of the initial object.
    pub fn from_initial(&self, x: &Obj) -> Result<Mor> {
        self.guard(&[x])?;
        let src = self.initial();
        let data = match self.kind {
            BackendKind::QVect => MorData::Mat(QMat::zero(x.size(), 0)),
            BackendKind::PSet => MorData::Table(PTable::new(1, x.size(), vec![0])),
            BackendKind::OpPSet => MorData::Table(PTable::collapse(x.size(), 1)),
        };
        Ok(Mor {
            backend: self.kind,
            src,
            dst: x.clone(),
            data,
        })
    }

    pub fn identity(&self, x: &Obj) -> Mor {
        let data = match self.kind {
            BackendKind::QVect => MorData::Mat(QMat::identity(x.size())),
            BackendKind::PSet | BackendKind::OpPSet => MorData::Table(PTable::identity(x.size())),
        };
        Mor {
            backend: self.kind,
            src: x.clone(),
            dst: x.clone(),
            data,
        }
    }

    pub fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        self.guard_mor(&[g, f])?;
        if f.dst != g.src {
            return Err(Error::domain(
                "composition mismatch: target of the first map is not the source of the second",
            ));
        }
        let data = match (&g.data, &f.data) {
            (MorData::Mat(gm), MorData::Mat(fm)) => MorData::Mat(QMat::composed(gm, fm)),
            (MorData::Table(gt), MorData::Table(ft)) => match self.kind {
                BackendKind::PSet => MorData::Table(PTable::composed(gt, ft)),
                BackendKind::OpPSet => MorData::Table(PTable::composed(ft, gt)),
                BackendKind::QVect => unreachable!(),
            },
            _ => return Err(Error::MixedBackends("payload kinds differ".into())),
        };
        Ok(Mor {
            backend: self.kind,
            src: f.src.clone(),
            dst: g.dst.clone(),
            data,
        })
    }

    pub fn compose_all(&self, maps: &[&Mor]) -> Result<Mor> {
        let mut it = maps.iter();
        let mut acc = (*it.next().ok_or_else(|| Error::domain("empty composite"))?).clone();
        for m in it {
            acc = self.compose(m, &acc)?;
        }
        Ok(acc)
    }

    /// Functorial action of the tensor on morphisms.
    pub fn tensor_mor(&self, fs: &[Mor]) -> Result<Mor> {
        self.guard_mor(&fs.iter().collect::<Vec<_>>())?;
        match fs.len() {
            0 => Ok(self.identity(&self.unit())),
            1 => Ok(fs[0].clone()),
            _ => {
                let src = self.tensor(&fs.iter().map(|f| f.src.clone()).collect::<Vec<_>>())?;
                let dst = self.tensor(&fs.iter().map(|f| f.dst.clone()).collect::<Vec<_>>())?;
                let data = match self.kind {
                    BackendKind::QVect => {
                        let mats: Vec<&QMat> = fs.iter().map(|f| f.matrix().unwrap()).collect();
                        MorData::Mat(QMat::tensor(&mats))
                    }
                    BackendKind::PSet => {
                        let tables: Vec<&PTable> = fs.iter().map(|f| f.table().unwrap()).collect();
                        MorData::Table(smash_tables(&tables))
                    }
                    BackendKind::OpPSet => {
                        // Base direction: smash of the base tables.
                        let tables: Vec<&PTable> = fs.iter().map(|f| f.table().unwrap()).collect();
                        MorData::Table(smash_tables(&tables))
                    }
                };
                Ok(Mor {
                    backend: self.kind,
                    src,
                    dst,
                    data,
                })
            }
        }
    }

    /// The canonical isomorphism inserting unit factors: `unit_mask`
    /// ranges over the target slots, `true` marking a fresh unit factor.
    pub fn unit_insertion(&self, factors: &[Obj], unit_mask: &[bool]) -> Result<Mor> {
        self.guard(&factors.iter().collect::<Vec<_>>())?;
        let plain = unit_mask.iter().filter(|m| !**m).count();
        if plain != factors.len() {
            return Err(Error::domain("unit-insertion mask does not fit the factors"));
        }
        let unit = self.unit();
        let mut dst_factors = Vec::with_capacity(unit_mask.len());
        let mut fi = factors.iter();
        for &is_unit in unit_mask {
            dst_factors.push(if is_unit {
                unit.clone()
            } else {
                fi.next().unwrap().clone()
            });
        }
        let src = self.tensor(factors)?;
        let dst = self.tensor(&dst_factors)?;
        let src_radices: Vec<usize> = factors.iter().map(|o| o.node.radix()).collect();
        let dst_radices: Vec<usize> = dst_factors.iter().map(|o| o.node.radix()).collect();
        let data = match self.kind {
            BackendKind::QVect | BackendKind::PSet => {
                let forward = |digits: &[usize]| -> usize {
                    let mut out = Vec::with_capacity(unit_mask.len());
                    let mut it = digits.iter();
                    for &is_unit in unit_mask {
                        out.push(if is_unit { 0 } else { *it.next().unwrap() });
                    }
                    node::encode(&out, &dst_radices)
                };
                match self.kind {
                    BackendKind::QVect => {
                        let cols = (0..src.size())
                            .map(|c| {
                                let digits = node::decode(c, &src_radices);
                                vec![(forward(&digits) as u32, Rat::from_integer(1.into()))]
                            })
                            .collect();
                        MorData::Mat(QMat::from_cols(dst.size(), cols))
                    }
                    _ => {
                        let mut map = vec![0u32; src.size()];
                        for e in 1..src.size() {
                            let digits = node::decode(e - 1, &src_radices);
                            map[e] = (forward(&digits) + 1) as u32;
                        }
                        MorData::Table(PTable::new(src.size(), dst.size(), map))
                    }
                }
            }
            BackendKind::OpPSet => {
                // Base direction: strip the unit slots.
                let mut map = vec![0u32; dst.size()];
                for e in 1..dst.size() {
                    let digits = node::decode(e - 1, &dst_radices);
                    let kept: Vec<usize> = digits
                        .iter()
                        .zip(unit_mask)
                        .filter_map(|(d, &u)| (!u).then_some(*d))
                        .collect();
                    map[e] = (node::encode(&kept, &src_radices) + 1) as u32;
                }
                MorData::Table(PTable::new(dst.size(), src.size(), map))
            }
        };
        Ok(Mor {
            backend: self.kind,
            src,
            dst,
            data,
        })
    }

    /// The symmetry-and-regrouping isomorphism: permute the factors of a
    /// flat tensor into groups, tensoring each group. `groups` must list
    /// every factor index exactly once; singleton groups stay ungrouped.
    pub fn tensor_regroup(&self, factors: &[Obj], groups: &[Vec<usize>]) -> Result<Mor> {
        self.guard(&factors.iter().collect::<Vec<_>>())?;
        let mut seen = vec![false; factors.len()];
        for g in groups {
            for &i in g {
                if i >= factors.len() || seen[i] {
                    return Err(Error::domain("groups must partition the factor indices"));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::domain("groups must cover every factor"));
        }
        let group_objs: Vec<Obj> = groups
            .iter()
            .map(|g| self.tensor(&g.iter().map(|&i| factors[i].clone()).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let src = self.tensor(factors)?;
        let dst = self.tensor(&group_objs)?;
        let src_radices: Vec<usize> = factors.iter().map(|o| o.node.radix()).collect();
        let group_radices: Vec<usize> = group_objs.iter().map(|o| o.node.radix()).collect();
        let member_radices: Vec<Vec<usize>> = groups
            .iter()
            .map(|g| g.iter().map(|&i| src_radices[i]).collect())
            .collect();
        let forward = |digits: &[usize]| -> usize {
            let outer: Vec<usize> = groups
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    let member: Vec<usize> = g.iter().map(|&i| digits[i]).collect();
                    node::encode(&member, &member_radices[gi])
                })
                .collect();
            node::encode(&outer, &group_radices)
        };
        let data = match self.kind {
            BackendKind::QVect => {
                let cols = (0..src.size())
                    .map(|c| {
                        let digits = node::decode(c, &src_radices);
                        vec![(forward(&digits) as u32, Rat::from_integer(1.into()))]
                    })
                    .collect();
                MorData::Mat(QMat::from_cols(dst.size(), cols))
            }
            BackendKind::PSet => {
                let mut map = vec![0u32; src.size()];
                for e in 1..src.size() {
                    let digits = node::decode(e - 1, &src_radices);
                    map[e] = (forward(&digits) + 1) as u32;
                }
                MorData::Table(PTable::new(src.size(), dst.size(), map))
            }
            BackendKind::OpPSet => {
                // Base direction: scatter grouped digits back to slots.
                let mut map = vec![0u32; dst.size()];
                for e in 1..dst.size() {
                    let outer = node::decode(e - 1, &group_radices);
                    let mut digits = vec![0usize; factors.len()];
                    for (gi, g) in groups.iter().enumerate() {
                        let member = node::decode(outer[gi], &member_radices[gi]);
                        for (slot, d) in g.iter().zip(member) {
                            digits[*slot] = d;
                        }
                    }
                    map[e] = (node::encode(&digits, &src_radices) + 1) as u32;
                }
                MorData::Table(PTable::new(dst.size(), src.size(), map))
            }
        };
        Ok(Mor {
            backend: self.kind,
            src,
            dst,
            data,
        })
    }

    /// The coherence isomorphism between two nested tensor words over
    /// the same leaves in the same order, up to inserted unit factors on
    /// the target side. This is what a strictly associative reading of a
    /// binary monoidal structure needs.
    pub fn assoc_unit_iso(&self, src: &Obj, dst: &Obj) -> Result<Mor> {
        self.guard(&[src, dst])?;
        let unit = self.unit();
        let src_leaves = src.node.tensor_leaves();
        let dst_leaves = dst.node.tensor_leaves();
        let mut inserted = vec![false; dst_leaves.len()];
        {
            let mut si = src_leaves.iter().peekable();
            for (i, leaf) in dst_leaves.iter().enumerate() {
                if si.peek().is_some_and(|s| ***s == **leaf) {
                    si.next();
                } else if **leaf == *unit.node {
                    inserted[i] = true;
                } else {
                    return Err(Error::domain(
                        "objects are not related by associativity and unit insertions",
                    ));
                }
            }
            if si.next().is_some() {
                return Err(Error::domain("source has leftover factors"));
            }
        }
        let data = match self.kind {
            BackendKind::QVect | BackendKind::PSet => {
                let forward = |idx: usize| -> usize {
                    let mut digits = Vec::with_capacity(src_leaves.len());
                    node::nested_decode(&src.node, idx, &mut digits);
                    let mut it = digits.iter();
                    let dst_digits: Vec<usize> = inserted
                        .iter()
                        .map(|&ins| if ins { 0 } else { *it.next().unwrap() })
                        .collect();
                    node::nested_encode(&dst.node, &mut dst_digits.iter())
                };
                match self.kind {
                    BackendKind::QVect => {
                        let cols = (0..src.size())
                            .map(|c| vec![(forward(c) as u32, Rat::from_integer(1.into()))])
                            .collect();
                        MorData::Mat(QMat::from_cols(dst.size(), cols))
                    }
                    _ => {
                        let mut map = vec![0u32; src.size()];
                        for e in 1..src.size() {
                            map[e] = (forward(e - 1) + 1) as u32;
                        }
                        MorData::Table(PTable::new(src.size(), dst.size(), map))
                    }
                }
            }
            BackendKind::OpPSet => {
                let mut map = vec![0u32; dst.size()];
                for e in 1..dst.size() {
                    let mut digits = Vec::with_capacity(dst_leaves.len());
                    node::nested_decode(&dst.node, e - 1, &mut digits);
                    let kept: Vec<usize> = digits
                        .iter()
                        .zip(&inserted)
                        .filter_map(|(d, &ins)| (!ins).then_some(*d))
                        .collect();
                    map[e] = (node::nested_encode(&src.node, &mut kept.iter()) + 1) as u32;
                }
                MorData::Table(PTable::new(dst.size(), src.size(), map))
            }
        };
        Ok(Mor {
            backend: self.kind,
            src: src.clone(),
            dst: dst.clone(),
            data,
        })
    }

    /// Build a morphism from an explicit matrix.
    pub fn mor_from_matrix(&self, src: &Obj, dst: &Obj, mat: QMat) -> Result<Mor> {
        if self.kind != BackendKind::QVect {
            return Err(Error::Capability("matrices belong to the qvect backend".into()));
        }
        self.guard(&[src, dst])?;
        if mat.cols() != src.size() || mat.rows() != dst.size() {
            return Err(Error::domain("matrix shape does not match the objects"));
        }
        Ok(Mor {
            backend: self.kind,
            src: src.clone(),
            dst: dst.clone(),
            data: MorData::Mat(mat),
        })
    }

    /// Rebuild a morphism between known endpoints from a payload JSON
    /// value (the inverse of [`Mor::payload_json`]).
    pub fn mor_from_payload(
        &self,
        src: &Obj,
        dst: &Obj,
        payload: &serde_json::Value,
    ) -> Result<Mor> {
        let repr: PayloadRepr = serde_json::from_value(payload.clone())
            .map_err(|e| Error::Parse(format!("bad morphism payload: {e}")))?;
        match repr {
            PayloadRepr::Matrix { rows, cols, entries } => {
                let mut col_data = vec![Vec::new(); cols];
                for (r, c, v) in entries {
                    let v = rat_from_str(&v)
                        .ok_or_else(|| Error::Parse(format!("bad rational {v:?}")))?;
                    if r as usize >= rows || c as usize >= cols {
                        return Err(Error::Parse("matrix entry out of range".into()));
                    }
                    col_data[c as usize].push((r, v));
                }
                self.mor_from_matrix(src, dst, QMat::from_cols(rows, col_data))
            }
            PayloadRepr::Table {
                src_card,
                dst_card,
                map,
            } => {
                if map.len() != src_card || map.iter().any(|&v| v as usize >= dst_card) {
                    return Err(Error::Parse("table entries out of range".into()));
                }
                self.mor_from_table(src, dst, PTable::new(src_card, dst_card, map))
            }
        }
    }

    /// Build a morphism from an explicit table. For `op-pset` the table
    /// is the base-direction function, from `dst`'s underlying set to
    /// `src`'s.
    pub fn mor_from_table(&self, src: &Obj, dst: &Obj, table: PTable) -> Result<Mor> {
        self.guard(&[src, dst])?;
        let (want_src, want_dst) = match self.kind {
            BackendKind::PSet => (src.size(), dst.size()),
            BackendKind::OpPSet => (dst.size(), src.size()),
            BackendKind::QVect => {
                return Err(Error::Capability("tables belong to the pointed backends".into()))
            }
        };
        if table.src_card != want_src || table.dst_card != want_dst {
            return Err(Error::domain("table shape does not match the objects"));
        }
        if table.src_card > 0 && table.map[0] != 0 {
            return Err(Error::domain("tables must preserve the basepoint"));
        }
        Ok(Mor {
            backend: self.kind,
            src: src.clone(),
            dst: dst.clone(),
            data: MorData::Table(table),
        })
    }
}

/// Smash product of pointed tables, elementwise on non-basepoints.
fn smash_tables(tables: &[&PTable]) -> PTable {
    let src_nbs: Vec<usize> = tables.iter().map(|t| t.src_card.saturating_sub(1)).collect();
    let dst_nbs: Vec<usize> = tables.iter().map(|t| t.dst_card.saturating_sub(1)).collect();
    let src_card = src_nbs.iter().product::<usize>() + 1;
    let dst_card = dst_nbs.iter().product::<usize>() + 1;
    let mut map = vec![0u32; src_card];
    'outer: for e in 1..src_card {
        let digits = node::decode(e - 1, &src_nbs);
        let mut out = Vec::with_capacity(tables.len());
        for (t, d) in tables.iter().zip(&digits) {
            let img = t.apply(d + 1);
            if img == 0 {
                continue 'outer;
            }
            out.push(img - 1);
        }
        map[e] = (node::encode(&out, &dst_nbs) + 1) as u32;
    }
    PTable::new(src_card, dst_card, map)
}

// ---------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NodeRepr {
    Atom(Vec<String>),
    Tensor(Vec<NodeRepr>),
    Coprod(Vec<NodeRepr>),
    Prod(Vec<NodeRepr>),
}

fn node_to_repr(node: &Node) -> NodeRepr {
    match &node.shape {
        Shape::Atom(labels) => NodeRepr::Atom(labels.clone()),
        Shape::Tensor(c) => NodeRepr::Tensor(c.iter().map(|n| node_to_repr(n)).collect()),
        Shape::Coprod(c) => NodeRepr::Coprod(c.iter().map(|n| node_to_repr(n)).collect()),
        Shape::Prod(c) => NodeRepr::Prod(c.iter().map(|n| node_to_repr(n)).collect()),
    }
}

fn repr_to_node(repr: &NodeRepr, base: BaseKind) -> Arc<Node> {
    match repr {
        NodeRepr::Atom(labels) => Node::atom(base, labels.clone()),
        NodeRepr::Tensor(c) => {
            Node::tensor(base, c.iter().map(|r| repr_to_node(r, base)).collect())
        }
        NodeRepr::Coprod(c) => {
            Node::coprod(base, c.iter().map(|r| repr_to_node(r, base)).collect())
        }
        NodeRepr::Prod(c) => Node::prod(base, c.iter().map(|r| repr_to_node(r, base)).collect()),
    }
}

#[derive(Serialize, Deserialize)]
struct ObjRepr {
    backend: BackendKind,
    object: NodeRepr,
}

impl Serialize for Obj {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObjRepr {
            backend: self.backend,
            object: node_to_repr(&self.node),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Obj {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ObjRepr::deserialize(d)?;
        Ok(Obj {
            backend: repr.backend,
            node: repr_to_node(&repr.object, repr.backend.base()),
        })
    }
}

#[derive(Serialize, Deserialize)]
enum PayloadRepr {
    #[serde(rename = "matrix")]
    Matrix {
        rows: usize,
        cols: usize,
        entries: Vec<(u32, u32, String)>,
    },
    #[serde(rename = "table")]
    Table {
        src_card: usize,
        dst_card: usize,
        map: Vec<u32>,
    },
}

#[derive(Serialize, Deserialize)]
struct MorRepr {
    backend: BackendKind,
    src: ObjRepr,
    dst: ObjRepr,
    payload: PayloadRepr,
}

impl Serialize for Mor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let payload = match &self.data {
            MorData::Mat(m) => PayloadRepr::Matrix {
                rows: m.rows(),
                cols: m.cols(),
                entries: m
                    .entries()
                    .map(|(r, c, v)| (r as u32, c as u32, rat_to_string(v)))
                    .collect(),
            },
            MorData::Table(t) => PayloadRepr::Table {
                src_card: t.src_card,
                dst_card: t.dst_card,
                map: t.map.clone(),
            },
        };
        MorRepr {
            backend: self.backend,
            src: ObjRepr {
                backend: self.backend,
                object: node_to_repr(&self.src.node),
            },
            dst: ObjRepr {
                backend: self.backend,
                object: node_to_repr(&self.dst.node),
            },
            payload,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MorRepr::deserialize(d)?;
        let base = repr.backend.base();
        let src = Obj {
            backend: repr.backend,
            node: repr_to_node(&repr.src.object, base),
        };
        let dst = Obj {
            backend: repr.backend,
            node: repr_to_node(&repr.dst.object, base),
        };
        let backend = Backend::new(repr.backend);
        match repr.payload {
            PayloadRepr::Matrix { rows, cols, entries } => {
                let mut col_data = vec![Vec::new(); cols];
                for (r, c, v) in entries {
                    let v = rat_from_str(&v)
                        .ok_or_else(|| D::Error::custom(format!("bad rational {v:?}")))?;
                    if r as usize >= rows || c as usize >= cols {
                        return Err(D::Error::custom("matrix entry out of range"));
                    }
                    col_data[c as usize].push((r, v));
                }
                backend
                    .mor_from_matrix(&src, &dst, QMat::from_cols(rows, col_data))
                    .map_err(D::Error::custom)
            }
            PayloadRepr::Table {
                src_card,
                dst_card,
                map,
            } => {
                if map.len() != src_card || map.iter().any(|&v| v as usize >= dst_card) {
                    return Err(D::Error::custom("table entries out of range"));
                }
                backend
                    .mor_from_table(&src, &dst, PTable::new(src_card, dst_card, map))
                    .map_err(D::Error::custom)
            }
        }
    }
}
