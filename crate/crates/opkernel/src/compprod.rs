//! The binary and higher composition products of symmetric sequences.
//!
//! The n-fold composite evaluated on a finite set is a coproduct indexed
//! by n-level trees on that set; the summand of a tree is the tensor of
//! sequence values over its internal vertices, taken in level-major
//! order with blocks in canonical order. `ComposedObject` keeps the
//! whole decomposition (tree, factors, injection, slot map) because the
//! unicity and associativity morphisms are assembled summand by summand:
//!
//! * unit insertion sends the summand of `T` to the summand of the tree
//!   with an extra single-input level, through unit isomorphisms;
//! * level collapse sends the summand of `T` to the summand of the
//!   collapsed tree, regrouping the factors above each surviving vertex
//!   and including them into the inner composite via its own injection.
//!
//! A `ComposeCtx` memoizes decompositions and materialized composite
//! sequences by sequence identity, so the two legs of a coherence
//! diagram meet literally the same objects and comparison is exact.

use crate::category::{Backend, Mor, Obj};
use crate::combinatorics::{enumerate_level_trees, FinSet, LevelTree, SetBijection, VertexRef};
use crate::error::{Error, Result};
use crate::symseq::{Perm, SeqMor, SymmetricSequence};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// One summand of a composition product.
#[derive(Clone, Debug)]
pub struct ComposedTerm {
    pub tree: LevelTree,
    /// Internal vertices in level-major order; slot `i` of the tensor
    /// is the factor of `vertices[i]`.
    pub vertices: Vec<VertexRef>,
    pub factors: Vec<Obj>,
    pub object: Obj,
    pub injection: Mor,
}

impl ComposedTerm {
    fn slot_of(&self, v: VertexRef) -> usize {
        self.vertices
            .iter()
            .position(|&w| w == v)
            .expect("vertex belongs to the tree")
    }
}

/// A composition-product value retaining its coproduct decomposition.
#[derive(Debug)]
pub struct ComposedObject {
    pub label_set: FinSet,
    pub total: Obj,
    pub terms: Vec<ComposedTerm>,
    tree_index: HashMap<LevelTree, usize>,
}

impl ComposedObject {
    pub fn index_of(&self, t: &LevelTree) -> Option<usize> {
        self.tree_index.get(t).copied()
    }

    pub fn term_for(&self, t: &LevelTree) -> Result<&ComposedTerm> {
        self.index_of(t)
            .map(|i| &self.terms[i])
            .ok_or_else(|| Error::domain("tree is not an index of this composite"))
    }

    /// JSON dump of the index: per-tree chain, size, and slot map.
    pub fn index_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|t| {
                serde_json::json!({
                    "chain": t.tree.chain(),
                    "size": t.object.size(),
                    "slots": t
                        .vertices
                        .iter()
                        .map(|v| serde_json::json!([v.level, v.index]))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "labels": self.label_set,
            "total_size": self.total.size(),
            "terms": terms,
        })
    }
}

/// Argument of the functorial action of a composite: either an object
/// slot (identity) or a morphism slot.
#[derive(Clone, Debug)]
pub enum MuMapArg {
    Id(SymmetricSequence),
    Map(SeqMor),
}

impl MuMapArg {
    fn src(&self) -> SymmetricSequence {
        match self {
            MuMapArg::Id(s) => s.clone(),
            MuMapArg::Map(f) => f.src().clone(),
        }
    }

    fn dst(&self) -> SymmetricSequence {
        match self {
            MuMapArg::Id(s) => s.clone(),
            MuMapArg::Map(f) => f.dst().clone(),
        }
    }

    fn component(&self, backend: &Backend, m: usize) -> Result<Mor> {
        match self {
            MuMapArg::Id(s) => Ok(backend.identity(s.value(m)?)),
            MuMapArg::Map(f) => Ok(f.comp(m)?.clone()),
        }
    }
}

#[derive(Default)]
struct Caches {
    composed_obj: HashMap<(Vec<u64>, FinSet), Arc<ComposedObject>>,
    composed_seq: HashMap<Vec<u64>, SymmetricSequence>,
    unit: Option<SymmetricSequence>,
}

/// Evaluation context: a backend, a working arity bound, and memo
/// tables keyed by sequence identity. Externally pure.
pub struct ComposeCtx {
    backend: Backend,
    bound: usize,
    caches: Mutex<Caches>,
}

impl ComposeCtx {
    pub fn new(backend: Backend, bound: usize) -> Self {
        ComposeCtx {
            backend,
            bound,
            caches: Mutex::new(Caches::default()),
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The interned unit sequence of this context.
    pub fn unit_seq(&self) -> SymmetricSequence {
        let mut caches = self.caches.lock().unwrap();
        if caches.unit.is_none() {
            caches.unit = Some(
                SymmetricSequence::unit(self.backend, self.bound)
                    .expect("unit sequence construction cannot fail"),
            );
        }
        caches.unit.clone().unwrap()
    }

    fn guard_seqs(&self, fs: &[SymmetricSequence]) -> Result<()> {
        if fs.is_empty() {
            return Err(Error::domain("composition products need at least one factor"));
        }
        for f in fs {
            if f.backend() != self.backend {
                return Err(Error::MixedBackends(
                    "sequence backend differs from the context".into(),
                ));
            }
            if f.bound() < self.bound {
                return Err(Error::Truncation {
                    arity: self.bound,
                    bound: f.bound(),
                });
            }
        }
        Ok(())
    }

    /// The summand of a single tree: the tensor of `fs[level-1]` values
    /// over the tree's internal vertices.
    pub fn term_object(&self, fs: &[SymmetricSequence], t: &LevelTree) -> Result<Obj> {
        self.guard_seqs(fs)?;
        if fs.len() != t.level() {
            return Err(Error::domain(format!(
                "{} sequences cannot fill a {}-level tree",
                fs.len(),
                t.level()
            )));
        }
        let factors = self.term_factors(fs, t)?;
        self.backend.tensor(&factors)
    }

    fn term_factors(&self, fs: &[SymmetricSequence], t: &LevelTree) -> Result<Vec<Obj>> {
        t.internal_vertices()
            .into_iter()
            .map(|v| {
                let inputs = t.vertex_input_count(v)?;
                Ok(fs[v.level - 1].value(inputs)?.clone())
            })
            .collect()
    }

    /// The full indexed coproduct over n-level trees.
    pub fn compose(&self, fs: &[SymmetricSequence], a: &FinSet) -> Result<Arc<ComposedObject>> {
        self.guard_seqs(fs)?;
        let key = (fs.iter().map(|f| f.id()).collect::<Vec<_>>(), a.clone());
        if let Some(hit) = self.caches.lock().unwrap().composed_obj.get(&key) {
            return Ok(hit.clone());
        }
        let n = fs.len();
        let trees = enumerate_level_trees(a, n)?;
        let mut vertices_per_tree = Vec::with_capacity(trees.len());
        let mut factors_per_tree = Vec::with_capacity(trees.len());
        let mut objects = Vec::with_capacity(trees.len());
        for t in &trees {
            let vertices = t.internal_vertices();
            let factors = self.term_factors(fs, t)?;
            let object = self.backend.tensor(&factors)?;
            vertices_per_tree.push(vertices);
            factors_per_tree.push(factors);
            objects.push(object);
        }
        let (total, injections) = self.backend.coproduct(&objects)?;
        let mut terms = Vec::with_capacity(trees.len());
        let mut tree_index = HashMap::with_capacity(trees.len());
        for (i, t) in trees.into_iter().enumerate() {
            tree_index.insert(t.clone(), i);
            terms.push(ComposedTerm {
                tree: t,
                vertices: vertices_per_tree[i].clone(),
                factors: factors_per_tree[i].clone(),
                object: objects[i].clone(),
                injection: injections[i].clone(),
            });
        }
        let co = Arc::new(ComposedObject {
            label_set: a.clone(),
            total,
            terms,
            tree_index,
        });
        // First insert wins, so concurrent builders all hand out the
        // same decomposition.
        let mut caches = self.caches.lock().unwrap();
        Ok(caches.composed_obj.entry(key).or_insert(co).clone())
    }

    /// Materialize the composite of a list of sequences as a sequence of
    /// its own, with transports as actions. A single factor is returned
    /// unchanged, so unary composition is the identity.
    pub fn compose_seq(&self, fs: &[SymmetricSequence]) -> Result<SymmetricSequence> {
        self.guard_seqs(fs)?;
        if fs.len() == 1 {
            return Ok(fs[0].clone());
        }
        let key: Vec<u64> = fs.iter().map(|f| f.id()).collect();
        if let Some(hit) = self.caches.lock().unwrap().composed_seq.get(&key) {
            return Ok(hit.clone());
        }
        let mut values = Vec::with_capacity(self.bound);
        let mut gens = Vec::with_capacity(self.bound);
        for m in 1..=self.bound {
            let a = FinSet::canonical(m);
            values.push(self.compose(fs, &a)?.total.clone());
            let mut arity_gens = Vec::with_capacity(m.saturating_sub(1));
            for i in 0..m.saturating_sub(1) {
                let pairs: Vec<(u32, u32)> = (1..=m as u32)
                    .map(|x| {
                        let y = if x == i as u32 + 1 {
                            x + 1
                        } else if x == i as u32 + 2 {
                            x - 1
                        } else {
                            x
                        };
                        (x, y)
                    })
                    .collect();
                let sigma = SetBijection::new(a.clone(), a.clone(), &pairs)?;
                arity_gens.push(self.transport_iso(fs, &sigma)?);
            }
            gens.push(arity_gens);
        }
        let name = format!(
            "({})",
            fs.iter().map(|f| f.name()).collect::<Vec<_>>().join("*")
        );
        let seq = SymmetricSequence::new(self.backend, name, values, gens)?;
        // First insert wins: the composite's identity must be stable
        // across threads so that diagram legs meet the same sequence.
        let mut caches = self.caches.lock().unwrap();
        Ok(caches.composed_seq.entry(key).or_insert(seq).clone())
    }

    /// The transport isomorphism of a composite along a bijection of
    /// label sets, assembled from tree relabelling and factor actions.
    pub fn transport_iso(&self, fs: &[SymmetricSequence], sigma: &SetBijection) -> Result<Mor> {
        self.guard_seqs(fs)?;
        let src = self.compose(fs, sigma.src())?;
        let dst = self.compose(fs, sigma.dst())?;
        let sigma_inv = sigma.inverse();
        let mut comps = Vec::with_capacity(src.terms.len());
        for term in &src.terms {
            let t2 = term.tree.relabel(sigma)?;
            let dterm = dst.term_for(&t2)?;
            // Per-factor action along the induced permutation of inputs.
            let mut factor_maps = Vec::with_capacity(term.vertices.len());
            for &v in &term.vertices {
                let inputs = input_blocks(&term.tree, v)?;
                let image_block = {
                    let mut im: Vec<u32> = term
                        .tree
                        .vertex_block(v)
                        .iter()
                        .map(|&x| sigma.apply(x))
                        .collect();
                    im.sort_unstable();
                    im
                };
                let v2 = find_vertex(&t2, v.level, &image_block)?;
                let inputs2 = input_blocks(&t2, v2)?;
                let perm: Vec<usize> = inputs
                    .iter()
                    .map(|b| {
                        let mut image: Vec<u32> = b.iter().map(|&x| sigma.apply(x)).collect();
                        image.sort_unstable();
                        inputs2
                            .iter()
                            .position(|c| *c == image)
                            .expect("relabelled block is an input of the image vertex")
                    })
                    .collect();
                let p = Perm::from_images(perm)?;
                factor_maps.push(fs[v.level - 1].action(inputs.len(), &p)?.clone());
            }
            let acted = self.backend.tensor_mor(&factor_maps)?;
            // Reorder slots from the source tree's order to the image
            // tree's order.
            let acted_factors: Vec<Obj> = factor_maps.iter().map(|f| f.dst().clone()).collect();
            let groups: Vec<Vec<usize>> = dterm
                .vertices
                .iter()
                .map(|&v2| {
                    let mut pre: Vec<u32> = t2
                        .vertex_block(v2)
                        .iter()
                        .map(|&y| sigma_inv.apply(y))
                        .collect();
                    pre.sort_unstable();
                    let v = find_vertex(&term.tree, v2.level, &pre).expect("preimage vertex");
                    vec![term.slot_of(v)]
                })
                .collect();
            let regroup = self.backend.tensor_regroup(&acted_factors, &groups)?;
            let comp = self
                .backend
                .compose_all(&[&acted, &regroup, &dterm.injection])?;
            comps.push(comp);
        }
        self.backend.copair(&src.total, &comps)
    }

    fn unicity_components(
        &self,
        fs: &[SymmetricSequence],
        k: usize,
        a: &FinSet,
    ) -> Result<(Arc<ComposedObject>, Vec<Mor>)> {
        self.guard_seqs(fs)?;
        let n = fs.len();
        if k > n {
            return Err(Error::domain(format!("unit slot {k} out of range 0..={n}")));
        }
        let mut fs2 = fs.to_vec();
        fs2.insert(k, self.unit_seq());
        let src = self.compose(fs, a)?;
        let dst = self.compose(&fs2, a)?;
        let mut comps = Vec::with_capacity(src.terms.len());
        for term in &src.terms {
            let tk = term.tree.insert_unit_level(k)?;
            let dterm = dst.term_for(&tk)?;
            let mask: Vec<bool> = dterm.vertices.iter().map(|v| v.level == k + 1).collect();
            let ins = self.backend.unit_insertion(&term.factors, &mask)?;
            debug_assert_eq!(ins.dst(), &dterm.object);
            comps.push(self.backend.compose(&dterm.injection, &ins)?);
        }
        Ok((src, comps))
    }

    /// The unit-insertion morphism: sends the composite of `fs` into the
    /// composite with the unit sequence inserted after slot `k`.
    pub fn unicity_morphism(&self, fs: &[SymmetricSequence], k: usize, a: &FinSet) -> Result<Mor> {
        let (src, comps) = self.unicity_components(fs, k, a)?;
        self.backend.copair(&src.total, &comps)
    }

    /// Fault-injection variant: the components of two summands with
    /// equal term objects are swapped, producing a well-typed but wrong
    /// unit insertion. Summands whose trees have different level shapes
    /// are preferred, because swapping a pair that is related by a label
    /// permutation of a highly symmetric sequence can amount to a
    /// natural automorphism and leave every diagram commuting. Falls
    /// back to the honest map when no swappable pair exists.
    pub fn unicity_morphism_swapped(
        &self,
        fs: &[SymmetricSequence],
        k: usize,
        a: &FinSet,
    ) -> Result<Mor> {
        let (src, mut comps) = self.unicity_components(fs, k, a)?;
        let shape = |t: &LevelTree| -> Vec<Vec<usize>> {
            (1..=t.level())
                .map(|lv| {
                    let mut sizes: Vec<usize> = t
                        .partition_at(lv)
                        .blocks()
                        .iter()
                        .map(|b| b.len())
                        .collect();
                    sizes.sort_unstable();
                    sizes
                })
                .collect()
        };
        let mut candidate: Option<(usize, usize)> = None;
        'search: for i in 0..src.terms.len() {
            for j in i + 1..src.terms.len() {
                if src.terms[i].object == src.terms[j].object && comps[i] != comps[j] {
                    if shape(&src.terms[i].tree) != shape(&src.terms[j].tree) {
                        candidate = Some((i, j));
                        break 'search;
                    }
                    if candidate.is_none() {
                        candidate = Some((i, j));
                    }
                }
            }
        }
        if let Some((i, j)) = candidate {
            comps.swap(i, j);
        }
        self.backend.copair(&src.total, &comps)
    }

    /// Sequence-level version of [`Self::unicity_morphism_swapped`].
    pub fn unicity_seqmor_swapped(&self, fs: &[SymmetricSequence], k: usize) -> Result<SeqMor> {
        let src_seq = self.compose_seq(fs)?;
        let mut fs2 = fs.to_vec();
        fs2.insert(k, self.unit_seq());
        let dst_seq = self.compose_seq(&fs2)?;
        let comps = (1..=self.bound)
            .map(|m| self.unicity_morphism_swapped(fs, k, &FinSet::canonical(m)))
            .collect::<Result<Vec<_>>>()?;
        SeqMor::new(src_seq, dst_seq, comps)
    }

    /// The associativity morphism: collapses slots `l+1..=l+r` of the
    /// composite into a single composed slot.
    pub fn associativity_morphism(
        &self,
        fs: &[SymmetricSequence],
        l: usize,
        r: usize,
        a: &FinSet,
    ) -> Result<Mor> {
        self.guard_seqs(fs)?;
        let n = fs.len();
        if r < 1 || l + r > n {
            return Err(Error::domain(format!(
                "collapse window (l={l}, r={r}) out of range for {n} factors"
            )));
        }
        let inner = &fs[l..l + r];
        let g = self.compose_seq(inner)?;
        let mut fs2: Vec<SymmetricSequence> = fs[..l].to_vec();
        fs2.push(g);
        fs2.extend_from_slice(&fs[l + r..]);
        let src = self.compose(fs, a)?;
        let dst = self.compose(&fs2, a)?;
        let mut comps = Vec::with_capacity(src.terms.len());
        for term in &src.terms {
            let t = &term.tree;
            let t2 = t.collapse_levels(l, r)?;
            let dterm = dst.term_for(&t2)?;
            // Group source slots by destination slot; the group of a
            // surviving level-(l+1) vertex is its subtree in subtree
            // level-major order, mapped in by the inner injection.
            let mut groups: Vec<Vec<usize>> = Vec::with_capacity(dterm.vertices.len());
            let mut middle: Vec<Mor> = Vec::with_capacity(dterm.vertices.len());
            for &v2 in &dterm.vertices {
                if v2.level <= l {
                    let slot = term.slot_of(v2);
                    groups.push(vec![slot]);
                    middle.push(self.backend.identity(&term.factors[slot]));
                } else if v2.level == l + 1 {
                    let v = VertexRef {
                        level: l + 1,
                        index: v2.index,
                    };
                    let block = t.vertex_block(v);
                    let mut slots = Vec::new();
                    for lv in l + 1..=l + r {
                        let p = t.partition_at(lv);
                        for (idx, b) in p.blocks().iter().enumerate() {
                            if b.iter().all(|x| block.binary_search(x).is_ok()) {
                                slots.push(term.slot_of(VertexRef { level: lv, index: idx }));
                            }
                        }
                    }
                    let u = t.subtree_above(v, r)?;
                    let inner_co = self.compose(inner, &FinSet::canonical(u.labels().len()))?;
                    let iterm = inner_co.term_for(&u)?;
                    debug_assert_eq!(
                        iterm.factors,
                        slots
                            .iter()
                            .map(|&s| term.factors[s].clone())
                            .collect::<Vec<_>>()
                    );
                    groups.push(slots);
                    middle.push(iterm.injection.clone());
                } else {
                    let v = VertexRef {
                        level: v2.level + r - 1,
                        index: v2.index,
                    };
                    let slot = term.slot_of(v);
                    groups.push(vec![slot]);
                    middle.push(self.backend.identity(&term.factors[slot]));
                }
            }
            let regroup = self.backend.tensor_regroup(&term.factors, &groups)?;
            let mid = self.backend.tensor_mor(&middle)?;
            debug_assert_eq!(mid.dst(), &dterm.object);
            comps.push(self.backend.compose_all(&[&regroup, &mid, &dterm.injection])?);
        }
        self.backend.copair(&src.total, &comps)
    }

    /// Unit insertion as a morphism of sequences (components at every
    /// canonical arity up to the context bound).
    pub fn unicity_seqmor(&self, fs: &[SymmetricSequence], k: usize) -> Result<SeqMor> {
        let src_seq = self.compose_seq(fs)?;
        let mut fs2 = fs.to_vec();
        fs2.insert(k, self.unit_seq());
        let dst_seq = self.compose_seq(&fs2)?;
        let comps = (1..=self.bound)
            .map(|m| self.unicity_morphism(fs, k, &FinSet::canonical(m)))
            .collect::<Result<Vec<_>>>()?;
        SeqMor::new(src_seq, dst_seq, comps)
    }

    /// Level collapse as a morphism of sequences.
    pub fn associativity_seqmor(
        &self,
        fs: &[SymmetricSequence],
        l: usize,
        r: usize,
    ) -> Result<SeqMor> {
        let src_seq = self.compose_seq(fs)?;
        let g = self.compose_seq(&fs[l..l + r])?;
        let mut fs2: Vec<SymmetricSequence> = fs[..l].to_vec();
        fs2.push(g);
        fs2.extend_from_slice(&fs[l + r..]);
        let dst_seq = self.compose_seq(&fs2)?;
        let comps = (1..=self.bound)
            .map(|m| self.associativity_morphism(fs, l, r, &FinSet::canonical(m)))
            .collect::<Result<Vec<_>>>()?;
        SeqMor::new(src_seq, dst_seq, comps)
    }

    /// Functorial action of the composite on sequence morphisms.
    pub fn mu_map(&self, args: &[MuMapArg]) -> Result<SeqMor> {
        let srcs: Vec<SymmetricSequence> = args.iter().map(|a| a.src()).collect();
        let dsts: Vec<SymmetricSequence> = args.iter().map(|a| a.dst()).collect();
        let src_seq = self.compose_seq(&srcs)?;
        let dst_seq = self.compose_seq(&dsts)?;
        let mut comps = Vec::with_capacity(self.bound);
        for m in 1..=self.bound {
            let a = FinSet::canonical(m);
            let src = self.compose(&srcs, &a)?;
            let dst = self.compose(&dsts, &a)?;
            let mut term_maps = Vec::with_capacity(src.terms.len());
            for (i, term) in src.terms.iter().enumerate() {
                let factor_maps: Vec<Mor> = term
                    .vertices
                    .iter()
                    .map(|&v| {
                        let inputs = term.tree.vertex_input_count(v)?;
                        args[v.level - 1].component(&self.backend, inputs)
                    })
                    .collect::<Result<_>>()?;
                let tm = self.backend.tensor_mor(&factor_maps)?;
                debug_assert_eq!(tm.dst(), &dst.terms[i].object);
                term_maps.push(self.backend.compose(&dst.terms[i].injection, &tm)?);
            }
            comps.push(self.backend.copair(&src.total, &term_maps)?);
        }
        SeqMor::new(src_seq, dst_seq, comps)
    }
}

fn input_blocks(t: &LevelTree, v: VertexRef) -> Result<Vec<Vec<u32>>> {
    let below = t.partition_at(v.level + 1);
    Ok(t.vertex_inputs(v)?
        .into_iter()
        .map(|i| below.block(i).to_vec())
        .collect())
}

fn find_vertex(t: &LevelTree, level: usize, block: &[u32]) -> Result<VertexRef> {
    let p = t.partition_at(level);
    let index = p
        .blocks()
        .iter()
        .position(|b| b.as_slice() == block)
        .ok_or_else(|| Error::domain("no vertex with the given block"))?;
    Ok(VertexRef { level, index })
}

#[cfg(test)]
mod tests;
