//! Finite sets, unordered partitions, and labelled level trees.
//!
//! A level tree on a label set `A` is stored as its chain of nested
//! partitions: the tree with `n` internal levels keeps the partitions
//! `pi_2, ..., pi_n`, each refining its predecessor. The two sentinels
//! `pi_1 = {A}` and `pi_{n+1} = discrete` are implicit. Two labelled level
//! trees are isomorphic exactly when their chains are equal, so chain
//! equality is tree equality here.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A nonempty finite set of distinct labels, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet {
    elems: Vec<u32>,
}

impl FinSet {
    pub fn new(mut elems: Vec<u32>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::domain("finite sets here are nonempty"));
        }
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("labels must be pairwise distinct"));
        }
        Ok(FinSet { elems })
    }

    /// The canonical set `{1, ..., m}`.
    pub fn canonical(m: usize) -> Self {
        FinSet {
            elems: (1..=m as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn position(&self, x: u32) -> Option<usize> {
        self.elems.binary_search(&x).ok()
    }
}

/// A bijection between two finite sets, stored by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetBijection {
    src: FinSet,
    dst: FinSet,
    /// `src.elems()[i]` maps to `dst.elems()[map[i]]`.
    map: Vec<usize>,
}

impl SetBijection {
    pub fn new(src: FinSet, dst: FinSet, pairs: &[(u32, u32)]) -> Result<Self> {
        if src.len() != dst.len() || pairs.len() != src.len() {
            return Err(Error::NonBijective("size mismatch".into()));
        }
        let mut map = vec![usize::MAX; src.len()];
        let mut hit = vec![false; dst.len()];
        for &(x, y) in pairs {
            let i = src
                .position(x)
                .ok_or_else(|| Error::NonBijective(format!("{x} not in source")))?;
            let j = dst
                .position(y)
                .ok_or_else(|| Error::NonBijective(format!("{y} not in target")))?;
            if map[i] != usize::MAX || hit[j] {
                return Err(Error::NonBijective("duplicate assignment".into()));
            }
            map[i] = j;
            hit[j] = true;
        }
        Ok(SetBijection { src, dst, map })
    }

    pub fn identity(a: &FinSet) -> Self {
        SetBijection {
            src: a.clone(),
            dst: a.clone(),
            map: (0..a.len()).collect(),
        }
    }

    /// The unique order-preserving bijection between two sets of equal size.
    pub fn order_preserving(src: &FinSet, dst: &FinSet) -> Result<Self> {
        if src.len() != dst.len() {
            return Err(Error::NonBijective("size mismatch".into()));
        }
        Ok(SetBijection {
            src: src.clone(),
            dst: dst.clone(),
            map: (0..src.len()).collect(),
        })
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn dst(&self) -> &FinSet {
        &self.dst
    }

    pub fn apply(&self, x: u32) -> u32 {
        let i = self.src.position(x).expect("element not in source");
        self.dst.elems()[self.map[i]]
    }

    /// `other` after `self` (so `self.src -> other.dst`).
    pub fn then(&self, other: &SetBijection) -> Result<Self> {
        if self.dst != other.src {
            return Err(Error::NonBijective("sets do not line up".into()));
        }
        let map = self.map.iter().map(|&j| other.map[j]).collect();
        Ok(SetBijection {
            src: self.src.clone(),
            dst: other.dst.clone(),
            map,
        })
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        SetBijection {
            src: self.dst.clone(),
            dst: self.src.clone(),
            map,
        }
    }

    /// The permutation of `{0..m-1}` relating the canonical orders of
    /// source and target: position `i` of the source order goes to
    /// position `perm[i]` of the target order.
    pub fn index_perm(&self) -> Vec<usize> {
        self.map.clone()
    }
}

/// An unordered partition into nonempty blocks. Blocks are sorted
/// internally and ordered by their least element, so equality is
/// syntactic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    blocks: Vec<Vec<u32>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<u32>>) -> Result<Self> {
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::domain("partition blocks must be nonempty"));
        }
        let mut blocks: Vec<Vec<u32>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        let mut seen = std::collections::BTreeSet::new();
        for b in &blocks {
            for &x in b {
                if !seen.insert(x) {
                    return Err(Error::domain(format!("element {x} in two blocks")));
                }
            }
        }
        Ok(Partition { blocks })
    }

    pub fn discrete(a: &FinSet) -> Self {
        Partition {
            blocks: a.elems().iter().map(|&x| vec![x]).collect(),
        }
    }

    pub fn coarse(a: &FinSet) -> Self {
        Partition {
            blocks: vec![a.elems().to_vec()],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.blocks[i]
    }

    /// Index of the block containing `x`.
    pub fn block_of(&self, x: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&x).is_ok())
    }

    pub fn ground(&self) -> FinSet {
        let elems = self.blocks.iter().flatten().copied().collect();
        FinSet::new(elems).expect("partition blocks are nonempty")
    }

    pub fn covers(&self, a: &FinSet) -> bool {
        self.ground() == *a
    }

    /// Does every block of `self` sit inside a block of `coarser`?
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            coarser
                .block_of(b[0])
                .is_some_and(|i| b.iter().all(|&x| coarser.block(i).binary_search(&x).is_ok()))
        })
    }

    /// Relabel every element through a bijection and re-canonicalize.
    pub fn relabel(&self, sigma: &SetBijection) -> Result<Partition> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| sigma.apply(x)).collect())
            .collect();
        Partition::new(blocks)
    }
}

/// Enumerate all unordered partitions of `a`, deterministically ordered
/// lexicographically on their canonical block lists.
pub fn enumerate_partitions(a: &FinSet) -> Result<Vec<Partition>> {
    if a.len() == 0 {
        return Err(Error::domain("cannot partition an empty set"));
    }
    // Restricted growth strings: elem i is assigned block index rgs[i]
    // with rgs[i] <= max(rgs[..i]) + 1. Block order by least element is
    // then the order of first occurrence.
    let n = a.len();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, maxv: usize, rgs: &mut Vec<usize>, a: &FinSet, out: &mut Vec<Partition>) {
        if i == a.len() {
            let nb = maxv + 1;
            let mut blocks = vec![Vec::new(); nb];
            for (k, &b) in rgs.iter().enumerate() {
                blocks[b].push(a.elems()[k]);
            }
            out.push(Partition { blocks });
            return;
        }
        for v in 0..=maxv + 1 {
            rgs[i] = v;
            rec(i + 1, maxv.max(v), rgs, a, out);
        }
    }
    rgs[0] = 0;
    rec(1, 0, &mut rgs, a, &mut out);
    out.sort();
    Ok(out)
}

/// All partitions refining `p`, each obtained by independently
/// partitioning the blocks of `p`.
pub fn enumerate_refinements(p: &Partition) -> Result<Vec<Partition>> {
    let per_block: Vec<Vec<Partition>> = p
        .blocks()
        .iter()
        .map(|b| enumerate_partitions(&FinSet::new(b.clone())?))
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for choices in &per_block {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for partial in &out {
            for c in choices {
                let mut blocks = partial.clone();
                blocks.extend(c.blocks().iter().cloned());
                next.push(blocks);
            }
        }
        out = next;
    }
    let mut parts: Vec<Partition> = out
        .into_iter()
        .map(|blocks| Partition::new(blocks).expect("refinement blocks are valid"))
        .collect();
    parts.sort();
    parts.dedup();
    Ok(parts)
}

/// A reference to an internal (non-leaf) vertex of a level tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexRef {
    /// Level in `1..=n` (the root is level 1).
    pub level: usize,
    /// Index of the vertex's block within the level's partition.
    pub index: usize,
}

/// An `A`-labelled level tree with `n >= 1` internal levels, stored as
/// the chain `(pi_2, ..., pi_n)` of nested partitions of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelTree {
    labels: FinSet,
    chain: Vec<Partition>,
}

impl LevelTree {
    pub fn new(labels: FinSet, chain: Vec<Partition>) -> Result<Self> {
        let mut prev = Partition::coarse(&labels);
        for p in &chain {
            if !p.covers(&labels) {
                return Err(Error::domain("chain entry does not cover the label set"));
            }
            if !p.refines(&prev) {
                return Err(Error::domain("chain entries must successively refine"));
            }
            prev = p.clone();
        }
        Ok(LevelTree { labels, chain })
    }

    pub fn labels(&self) -> &FinSet {
        &self.labels
    }

    /// Number of internal levels `n` (leaves sit at level `n + 1`).
    pub fn level(&self) -> usize {
        self.chain.len() + 1
    }

    pub fn chain(&self) -> &[Partition] {
        &self.chain
    }

    /// The partition at level `k`, including the sentinels `k = 1`
    /// (one block) and `k = n + 1` (discrete).
    pub fn partition_at(&self, k: usize) -> Partition {
        let n = self.level();
        assert!(k >= 1 && k <= n + 1, "level {k} out of range");
        if k == 1 {
            Partition::coarse(&self.labels)
        } else if k == n + 1 {
            Partition::discrete(&self.labels)
        } else {
            self.chain[k - 2].clone()
        }
    }

    /// Internal vertices in level-major order (level 1 first, blocks in
    /// canonical order within a level).
    pub fn internal_vertices(&self) -> Vec<VertexRef> {
        let mut out = Vec::new();
        for level in 1..=self.level() {
            for index in 0..self.partition_at(level).num_blocks() {
                out.push(VertexRef { level, index });
            }
        }
        out
    }

    pub fn vertex_block(&self, v: VertexRef) -> Vec<u32> {
        self.partition_at(v.level).block(v.index).to_vec()
    }

    /// The set `J(v)` of incoming edges of a non-leaf vertex, returned
    /// as the indices of the level-`(k+1)` blocks contained in `v`'s
    /// block, in canonical order.
    pub fn vertex_inputs(&self, v: VertexRef) -> Result<Vec<usize>> {
        let n = self.level();
        if v.level > n {
            return Err(Error::domain(
                "leaves have no incoming edges; the expression F(J(v)) does not make sense",
            ));
        }
        let here = self.partition_at(v.level);
        if v.index >= here.num_blocks() {
            return Err(Error::domain("vertex index out of range"));
        }
        let block = here.block(v.index);
        let below = self.partition_at(v.level + 1);
        Ok((0..below.num_blocks())
            .filter(|&j| below.block(j).iter().all(|x| block.binary_search(x).is_ok()))
            .collect())
    }

    pub fn vertex_input_count(&self, v: VertexRef) -> Result<usize> {
        Ok(self.vertex_inputs(v)?.len())
    }

    /// The tree obtained by adding an extra level of single-input
    /// vertices between levels `k` and `k + 1` (`0 <= k <= n`).
    pub fn insert_unit_level(&self, k: usize) -> Result<LevelTree> {
        let n = self.level();
        if k > n {
            return Err(Error::domain(format!("insertion slot {k} out of range 0..={n}")));
        }
        let mut ext: Vec<Partition> = Vec::with_capacity(n + 2);
        ext.push(Partition::coarse(&self.labels));
        ext.extend(self.chain.iter().cloned());
        ext.push(Partition::discrete(&self.labels));
        let dup = ext[k].clone();
        ext.insert(k + 1, dup);
        let chain = ext[1..ext.len() - 1].to_vec();
        LevelTree::new(self.labels.clone(), chain)
    }

    /// The tree obtained by collapsing levels: the chain drops entries
    /// `pi_{l+2}, ..., pi_{l+r}` (`0 <= l < l + r <= n`). For `r = 1`
    /// nothing is removed.
    pub fn collapse_levels(&self, l: usize, r: usize) -> Result<LevelTree> {
        let n = self.level();
        if r < 1 || l + r > n {
            return Err(Error::domain(format!(
                "collapse indices (l={l}, r={r}) out of range for an {n}-level tree"
            )));
        }
        let mut ext: Vec<Partition> = Vec::with_capacity(n + 1);
        ext.push(Partition::coarse(&self.labels));
        ext.extend(self.chain.iter().cloned());
        ext.push(Partition::discrete(&self.labels));
        // ext[i] is pi_{i+1}; remove pi_{l+2}..pi_{l+r} = ext[l+1..=l+r-1].
        ext.drain(l + 1..l + r);
        let chain = ext[1..ext.len() - 1].to_vec();
        LevelTree::new(self.labels.clone(), chain)
    }

    /// The `r`-level tree sitting above a level-`(l+1)` vertex `v`,
    /// labelled canonically by `{1..|J|}` where `J` is the set of
    /// level-`(l+r+1)` vertices above `v`.
    pub fn subtree_above(&self, v: VertexRef, r: usize) -> Result<LevelTree> {
        let n = self.level();
        let l = v.level - 1;
        if r < 1 || l + r > n {
            return Err(Error::domain(format!(
                "subtree indices (level {lv}, r={r}) out of range for an {n}-level tree",
                lv = v.level
            )));
        }
        let block = self.vertex_block(v);
        let top = self.partition_at(l + r + 1);
        // J = blocks of pi_{l+r+1} inside v's block, in canonical order.
        let j_blocks: Vec<&Vec<u32>> = top
            .blocks()
            .iter()
            .filter(|b| b.iter().all(|x| block.binary_search(x).is_ok()))
            .collect();
        let size = j_blocks.len();
        let labels = FinSet::canonical(size);
        // Chain entry rho_j groups the J-labels by membership in pi_{l+j}.
        let mut chain = Vec::with_capacity(r - 1);
        for j in 2..=r {
            let mid = self.partition_at(l + j);
            let mut groups: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
            for (idx, jb) in j_blocks.iter().enumerate() {
                let owner = mid.block_of(jb[0]).expect("chain refines");
                groups.entry(owner).or_default().push(idx as u32 + 1);
            }
            chain.push(Partition::new(groups.into_values().collect())?);
        }
        LevelTree::new(labels, chain)
    }

    /// Relabel the tree along a bijection of label sets.
    pub fn relabel(&self, sigma: &SetBijection) -> Result<LevelTree> {
        if *sigma.src() != self.labels {
            return Err(Error::NonBijective("bijection source does not match label set".into()));
        }
        let chain = self
            .chain
            .iter()
            .map(|p| p.relabel(sigma))
            .collect::<Result<_>>()?;
        LevelTree::new(sigma.dst().clone(), chain)
    }

    /// DOT rendering of the tree graph, leaves included.
    pub fn to_dot(&self) -> String {
        let n = self.level();
        let mut s = String::from("digraph tree {\n  rankdir=BT;\n");
        let name = |level: usize, idx: usize| format!("v{level}_{idx}");
        for level in 1..=n + 1 {
            let p = self.partition_at(level);
            for (i, b) in p.blocks().iter().enumerate() {
                let label: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                let shape = if level == n + 1 { "plaintext" } else { "circle" };
                s.push_str(&format!(
                    "  {} [label=\"{}\", shape={}];\n",
                    name(level, i),
                    label.join(","),
                    shape
                ));
            }
        }
        for level in 2..=n + 1 {
            let p = self.partition_at(level);
            let up = self.partition_at(level - 1);
            for (i, b) in p.blocks().iter().enumerate() {
                let parent = up.block_of(b[0]).expect("chain refines");
                s.push_str(&format!("  {} -> {};\n", name(level, i), name(level - 1, parent)));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Enumerate all `n`-level trees on `a` (all refinement chains of
/// length `n - 1`), deterministically ordered.
pub fn enumerate_level_trees(a: &FinSet, n: usize) -> Result<Vec<LevelTree>> {
    if n < 1 {
        return Err(Error::domain("trees have at least one level"));
    }
    let mut chains: Vec<Vec<Partition>> = vec![Vec::new()];
    for step in 0..n - 1 {
        let mut next = Vec::new();
        for c in &chains {
            let prev = if step == 0 {
                Partition::coarse(a)
            } else {
                c[step - 1].clone()
            };
            // Refinements of the coarse partition are all partitions.
            let refs = if step == 0 {
                enumerate_partitions(a)?
            } else {
                enumerate_refinements(&prev)?
            };
            for r in refs {
                let mut c2 = c.clone();
                c2.push(r);
                next.push(c2);
            }
        }
        chains = next;
    }
    let mut trees: Vec<LevelTree> = chains
        .into_iter()
        .map(|chain| LevelTree::new(a.clone(), chain))
        .collect::<Result<_>>()?;
    trees.sort();
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent Bell-number oracle via the Bell triangle.
    fn bell(n: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                let last = *next.last().unwrap();
                next.push(last + x);
            }
            row = next;
        }
        row[0]
    }

    /// Brute-force partition enumeration: insert elements one at a time
    /// into an existing block or a fresh one, then dedup canonically.
    fn brute_partitions(a: &FinSet) -> Vec<Partition> {
        let mut acc: Vec<Vec<Vec<u32>>> = vec![vec![]];
        for &x in a.elems() {
            let mut next = Vec::new();
            for p in &acc {
                for i in 0..p.len() {
                    let mut q = p.clone();
                    q[i].push(x);
                    next.push(q);
                }
                let mut q = p.clone();
                q.push(vec![x]);
                next.push(q);
            }
            acc = next;
        }
        let mut out: Vec<Partition> = acc
            .into_iter()
            .map(|blocks| Partition::new(blocks).unwrap())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Brute-force chain oracle: all (n-1)-tuples of partitions filtered
    /// by the refinement condition.
    fn brute_level_trees(a: &FinSet, n: usize) -> Vec<LevelTree> {
        let parts = brute_partitions(a);
        let mut chains: Vec<Vec<Partition>> = vec![Vec::new()];
        for _ in 0..n - 1 {
            let mut next = Vec::new();
            for c in &chains {
                for p in &parts {
                    let ok = match c.last() {
                        None => true,
                        Some(prev) => p.refines(prev),
                    };
                    if ok {
                        let mut c2 = c.clone();
                        c2.push(p.clone());
                        next.push(c2);
                    }
                }
            }
            chains = next;
        }
        let mut trees: Vec<LevelTree> = chains
            .into_iter()
            .map(|chain| LevelTree::new(a.clone(), chain).unwrap())
            .collect();
        trees.sort();
        trees
    }

    #[test]
    fn partition_counts_match_bell_oracle() {
        for m in 1..=6 {
            let a = FinSet::canonical(m);
            let got = enumerate_partitions(&a).unwrap().len() as u64;
            assert_eq!(got, bell(m), "Bell({m})");
        }
        assert_eq!(enumerate_partitions(&FinSet::canonical(2)).unwrap().len(), 2);
        assert_eq!(enumerate_partitions(&FinSet::canonical(1)).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(&FinSet::canonical(3)).unwrap().len(), 5);
        assert_eq!(enumerate_partitions(&FinSet::canonical(4)).unwrap().len(), 15);
    }

    #[test]
    fn partition_enumeration_matches_brute_force() {
        for m in 1..=5 {
            let a = FinSet::canonical(m);
            assert_eq!(enumerate_partitions(&a).unwrap(), brute_partitions(&a));
        }
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(FinSet::new(vec![]).is_err());
    }

    #[test]
    fn level_tree_counts() {
        let a2 = FinSet::canonical(2);
        let a3 = FinSet::canonical(3);
        for (a, n, want) in [(&a2, 1usize, 1usize), (&a2, 2, 2), (&a2, 3, 3), (&a3, 3, 12)] {
            let got = enumerate_level_trees(a, n).unwrap();
            assert_eq!(got.len(), want, "|L_{n}| on {} labels", a.len());
            assert_eq!(got, brute_level_trees(a, n), "against chain oracle");
        }
        // A singleton admits exactly one chain at every level.
        for n in 1..=5 {
            assert_eq!(enumerate_level_trees(&FinSet::canonical(1), n).unwrap().len(), 1);
        }
        assert!(enumerate_level_trees(&a2, 0).is_err());
    }

    #[test]
    fn two_level_trees_biject_with_partitions() {
        for m in 1..=5 {
            let a = FinSet::canonical(m);
            let trees = enumerate_level_trees(&a, 2).unwrap();
            let parts = enumerate_partitions(&a).unwrap();
            assert_eq!(trees.len(), parts.len());
            let chains: Vec<&Partition> = trees.iter().map(|t| &t.chain()[0]).collect();
            let expect: Vec<&Partition> = parts.iter().collect();
            assert_eq!(chains, expect);
        }
    }

    #[test]
    fn chains_always_refine() {
        for m in 1..=4 {
            let a = FinSet::canonical(m);
            for n in 1..=4 {
                for t in enumerate_level_trees(&a, n).unwrap() {
                    for k in 1..=t.level() {
                        let finer = t.partition_at(k + 1);
                        assert!(finer.refines(&t.partition_at(k)));
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_inputs_examples() {
        let a = FinSet::canonical(2);
        let disc = LevelTree::new(a.clone(), vec![Partition::discrete(&a)]).unwrap();
        let root = VertexRef { level: 1, index: 0 };
        assert_eq!(disc.vertex_inputs(root).unwrap().len(), 2);

        let coarse = LevelTree::new(a.clone(), vec![Partition::coarse(&a)]).unwrap();
        assert_eq!(coarse.vertex_inputs(root).unwrap().len(), 1);

        let three = LevelTree::new(
            a.clone(),
            vec![Partition::coarse(&a), Partition::discrete(&a)],
        )
        .unwrap();
        let mid = VertexRef { level: 2, index: 0 };
        assert_eq!(three.vertex_inputs(mid).unwrap().len(), 2);

        // Leaves reject the query.
        let leaf = VertexRef { level: 4, index: 0 };
        assert!(three.vertex_inputs(leaf).is_err());
    }

    #[test]
    fn insert_unit_level_examples() {
        let a = FinSet::canonical(2);
        let t = LevelTree::new(a.clone(), vec![Partition::discrete(&a)]).unwrap();

        let k2 = t.insert_unit_level(2).unwrap();
        assert_eq!(k2.chain(), &[Partition::discrete(&a), Partition::discrete(&a)]);

        let k0 = t.insert_unit_level(0).unwrap();
        assert_eq!(k0.chain(), &[Partition::coarse(&a), Partition::discrete(&a)]);

        let k1 = t.insert_unit_level(1).unwrap();
        assert_eq!(k1.chain(), &[Partition::discrete(&a), Partition::discrete(&a)]);
        // The distinct role of k=1 vs k=2: the new level sits at k+1, and
        // each of its vertices has exactly one input.
        for (k, tk) in [(1usize, &k1), (2, &k2)] {
            let p = tk.partition_at(k + 1);
            for index in 0..p.num_blocks() {
                let v = VertexRef { level: k + 1, index };
                assert_eq!(tk.vertex_input_count(v).unwrap(), 1, "k={k}");
            }
        }
        assert!(t.insert_unit_level(3).is_err());
    }

    #[test]
    fn collapse_levels_examples() {
        let a = FinSet::canonical(2);
        let t = LevelTree::new(
            a.clone(),
            vec![Partition::coarse(&a), Partition::discrete(&a)],
        )
        .unwrap();

        // r = 1 leaves the tree unchanged.
        assert_eq!(t.collapse_levels(0, 1).unwrap(), t);
        assert_eq!(t.collapse_levels(2, 1).unwrap(), t);

        let c12 = t.collapse_levels(1, 2).unwrap();
        assert_eq!(c12.chain(), &[Partition::coarse(&a)]);

        let c02 = t.collapse_levels(0, 2).unwrap();
        assert_eq!(c02.chain(), &[Partition::discrete(&a)]);

        assert!(t.collapse_levels(2, 2).is_err());
    }

    #[test]
    fn collapse_after_insert_recovers_chain() {
        // Inserting a unit level at slot k duplicates one chain entry;
        // collapsing a width-2 window that covers either copy recovers
        // the original chain. The two windows are (l = k-1) and (l = k),
        // each defined on part of the k range and agreeing where both
        // are.
        for m in 1..=3 {
            let a = FinSet::canonical(m);
            for n in 1..=3 {
                for t in enumerate_level_trees(&a, n).unwrap() {
                    for k in 0..=n {
                        let tk = t.insert_unit_level(k).unwrap();
                        let mut recovered = false;
                        if k >= 1 {
                            assert_eq!(tk.collapse_levels(k - 1, 2).unwrap(), t);
                            recovered = true;
                        }
                        if k + 2 <= n + 1 {
                            assert_eq!(tk.collapse_levels(k, 2).unwrap(), t);
                            recovered = true;
                        }
                        assert!(recovered, "at least one collapse window exists");
                    }
                }
            }
        }
    }

    #[test]
    fn subtree_above_examples() {
        let a = FinSet::canonical(2);
        let t = LevelTree::new(
            a.clone(),
            vec![Partition::coarse(&a), Partition::discrete(&a)],
        )
        .unwrap();
        // r = 1 gives the unique one-level tree on J(v).
        let root = VertexRef { level: 1, index: 0 };
        let u = t.subtree_above(root, 1).unwrap();
        assert_eq!(u.level(), 1);
        assert_eq!(u.labels().len(), 1);

        let v = VertexRef { level: 2, index: 0 };
        let u = t.subtree_above(v, 2).unwrap();
        assert_eq!(u.level(), 2);
        assert_eq!(u.labels().len(), 2);
        assert_eq!(u.chain()[0], Partition::discrete(&FinSet::canonical(2)));

        let a3 = FinSet::canonical(3);
        let t3 = LevelTree::new(
            a3.clone(),
            vec![
                Partition::new(vec![vec![1, 2], vec![3]]).unwrap(),
                Partition::discrete(&a3),
            ],
        )
        .unwrap();
        let v12 = VertexRef { level: 2, index: 0 };
        let u = t3.subtree_above(v12, 2).unwrap();
        assert_eq!(u.labels().len(), 2);
        assert_eq!(u.chain()[0], Partition::discrete(&FinSet::canonical(2)));
    }

    #[test]
    fn subtree_reassembly_reconstructs_tree() {
        // Check: grafting the subtrees above level l+1 onto the collapsed
        // tree reproduces the middle chain entries of the original.
        for m in 1..=3 {
            let a = FinSet::canonical(m);
            for n in 1..=4 {
                for t in enumerate_level_trees(&a, n).unwrap() {
                    for l in 0..n {
                        for r in 1..=n - l {
                            let collapsed = t.collapse_levels(l, r).unwrap();
                            // Union of relabelled subtree chains must equal
                            // the dropped middle of t's chain.
                            let p_top = t.partition_at(l + r + 1);
                            let vs = t.partition_at(l + 1);
                            for j in 2..=r {
                                let mut blocks: Vec<Vec<u32>> = Vec::new();
                                for index in 0..vs.num_blocks() {
                                    let v = VertexRef { level: l + 1, index };
                                    let u = t.subtree_above(v, r).unwrap();
                                    let block = t.vertex_block(v);
                                    let j_blocks: Vec<Vec<u32>> = p_top
                                        .blocks()
                                        .iter()
                                        .filter(|b| b.iter().all(|x| block.binary_search(x).is_ok()))
                                        .cloned()
                                        .collect();
                                    for rb in u.partition_at(j).blocks() {
                                        let mut blk = Vec::new();
                                        for &lab in rb {
                                            blk.extend(j_blocks[(lab - 1) as usize].clone());
                                        }
                                        blocks.push(blk);
                                    }
                                }
                                let rebuilt = Partition::new(blocks).unwrap();
                                assert_eq!(rebuilt, t.partition_at(l + j), "middle level {j}");
                            }
                            // Outer levels survive in the collapsed tree.
                            for k in 2..=l + 1 {
                                assert_eq!(collapsed.partition_at(k), t.partition_at(k));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn relabel_examples() {
        let a = FinSet::canonical(2);
        let t = LevelTree::new(a.clone(), vec![Partition::discrete(&a)]).unwrap();
        let id = SetBijection::identity(&a);
        assert_eq!(t.relabel(&id).unwrap(), t);

        let swap = SetBijection::new(a.clone(), a.clone(), &[(1, 2), (2, 1)]).unwrap();
        assert_eq!(t.relabel(&swap).unwrap(), t, "discrete partition is symmetric");

        let a3 = FinSet::canonical(3);
        let abc = FinSet::new(vec![10, 20, 30]).unwrap();
        let sigma = SetBijection::new(a3.clone(), abc.clone(), &[(1, 10), (2, 20), (3, 30)]).unwrap();
        let t3 = LevelTree::new(
            a3,
            vec![Partition::new(vec![vec![1, 2], vec![3]]).unwrap()],
        )
        .unwrap();
        let got = t3.relabel(&sigma).unwrap();
        assert_eq!(
            got.chain()[0],
            Partition::new(vec![vec![10, 20], vec![30]]).unwrap()
        );
    }

    #[test]
    fn relabel_is_functorial() {
        let a = FinSet::canonical(3);
        let s1 = SetBijection::new(a.clone(), a.clone(), &[(1, 2), (2, 3), (3, 1)]).unwrap();
        let s2 = SetBijection::new(a.clone(), a.clone(), &[(1, 1), (2, 3), (3, 2)]).unwrap();
        let composite = s1.then(&s2).unwrap();
        for n in 1..=3 {
            for t in enumerate_level_trees(&a, n).unwrap() {
                let lhs = t.relabel(&composite).unwrap();
                let rhs = t.relabel(&s1).unwrap().relabel(&s2).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn dot_output_mentions_every_vertex() {
        let a = FinSet::canonical(2);
        let t = LevelTree::new(a.clone(), vec![Partition::discrete(&a)]).unwrap();
        let dot = t.to_dot();
        assert!(dot.contains("digraph"));
        assert!(dot.contains("v1_0"));
        assert!(dot.contains("v3_1"));
    }

    #[test]
    fn tree_serialization_roundtrip() {
        let a = FinSet::canonical(3);
        let t = LevelTree::new(
            a.clone(),
            vec![
                Partition::new(vec![vec![1, 2], vec![3]]).unwrap(),
                Partition::discrete(&a),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("[[[1,2],[3]]"), "chain as list of list of lists: {json}");
        let back: LevelTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    proptest! {
        #[test]
        fn prop_partitions_are_canonical(m in 1usize..5) {
            let a = FinSet::canonical(m);
            for p in enumerate_partitions(&a).unwrap() {
                prop_assert!(p.covers(&a));
                for b in p.blocks() {
                    prop_assert!(!b.is_empty());
                    prop_assert!(b.windows(2).all(|w| w[0] < w[1]));
                }
                prop_assert!(p.blocks().windows(2).all(|w| w[0][0] < w[1][0]));
            }
        }

        #[test]
        fn prop_relabel_respects_composition(perm1 in proptest::sample::select(vec![
            vec![1u32,2,3], vec![1,3,2], vec![2,1,3], vec![2,3,1], vec![3,1,2], vec![3,2,1],
        ]), perm2 in proptest::sample::select(vec![
            vec![1u32,2,3], vec![1,3,2], vec![2,1,3], vec![2,3,1], vec![3,1,2], vec![3,2,1],
        ])) {
            let a = FinSet::canonical(3);
            let mk = |p: &Vec<u32>| {
                let pairs: Vec<(u32, u32)> = (1..=3u32).zip(p.iter().copied()).collect();
                SetBijection::new(a.clone(), a.clone(), &pairs).unwrap()
            };
            let s1 = mk(&perm1);
            let s2 = mk(&perm2);
            for t in enumerate_level_trees(&a, 2).unwrap() {
                let lhs = t.relabel(&s1.then(&s2).unwrap()).unwrap();
                let rhs = t.relabel(&s1).unwrap().relabel(&s2).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
