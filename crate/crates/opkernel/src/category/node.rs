//! Structural object layer shared by the backends.
//!
//! An object is a tree built from atoms by tensor, coproduct and
//! product nodes. The same shapes serve both base categories: in the
//! rational-linear base the size of a node is its dimension, in the
//! pointed base it is the cardinality (with element 0 always the
//! basepoint). Elements and basis vectors are addressed by flat index
//! through mixed-radix arithmetic, so even large composite objects are
//! never materialized as element lists.

use std::sync::Arc;

/// The underlying exact category a node is interpreted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseKind {
    /// Finite-dimensional rational vector spaces.
    Linear,
    /// Finite pointed sets.
    Pointed,
}

#[derive(Debug)]
pub enum Shape {
    Atom(Vec<String>),
    Tensor(Vec<Arc<Node>>),
    Coprod(Vec<Arc<Node>>),
    Prod(Vec<Arc<Node>>),
}

#[derive(Debug)]
pub struct Node {
    pub base: BaseKind,
    pub shape: Shape,
    /// Dimension (Linear) or cardinality (Pointed).
    pub size: usize,
}

impl Node {
    pub fn atom(base: BaseKind, labels: Vec<String>) -> Arc<Node> {
        let size = labels.len();
        Arc::new(Node {
            base,
            shape: Shape::Atom(labels),
            size,
        })
    }

    pub fn tensor(base: BaseKind, children: Vec<Arc<Node>>) -> Arc<Node> {
        let size = match base {
            BaseKind::Linear => children.iter().map(|c| c.size).product(),
            BaseKind::Pointed => {
                children
                    .iter()
                    .map(|c| c.size.saturating_sub(1))
                    .product::<usize>()
                    + 1
            }
        };
        Arc::new(Node {
            base,
            shape: Shape::Tensor(children),
            size,
        })
    }

    pub fn coprod(base: BaseKind, children: Vec<Arc<Node>>) -> Arc<Node> {
        let size = match base {
            BaseKind::Linear => children.iter().map(|c| c.size).sum(),
            BaseKind::Pointed => {
                children
                    .iter()
                    .map(|c| c.size.saturating_sub(1))
                    .sum::<usize>()
                    + 1
            }
        };
        Arc::new(Node {
            base,
            shape: Shape::Coprod(children),
            size,
        })
    }

    pub fn prod(base: BaseKind, children: Vec<Arc<Node>>) -> Arc<Node> {
        debug_assert_eq!(base, BaseKind::Pointed, "products are built in the pointed base");
        let size = children.iter().map(|c| c.size).product();
        Arc::new(Node {
            base,
            shape: Shape::Prod(children),
            size,
        })
    }

    pub fn children(&self) -> &[Arc<Node>] {
        match &self.shape {
            Shape::Atom(_) => &[],
            Shape::Tensor(c) | Shape::Coprod(c) | Shape::Prod(c) => c,
        }
    }

    /// Leaves of the maximal tensor decomposition: non-tensor nodes in
    /// left-to-right order. A non-tensor node is its own single leaf.
    pub fn tensor_leaves(self: &Arc<Node>) -> Vec<Arc<Node>> {
        match &self.shape {
            Shape::Tensor(children) => children.iter().flat_map(|c| c.tensor_leaves()).collect(),
            _ => vec![self.clone()],
        }
    }

    /// The per-leaf radix in the given base: dimension for Linear,
    /// non-basepoint count for Pointed.
    pub fn radix(&self) -> usize {
        match self.base {
            BaseKind::Linear => self.size,
            BaseKind::Pointed => self.size.saturating_sub(1),
        }
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.base != other.base || self.size != other.size {
            return false;
        }
        match (&self.shape, &other.shape) {
            (Shape::Atom(a), Shape::Atom(b)) => a == b,
            (Shape::Tensor(a), Shape::Tensor(b))
            | (Shape::Coprod(a), Shape::Coprod(b))
            | (Shape::Prod(a), Shape::Prod(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b.iter())
                        .all(|(x, y)| Arc::ptr_eq(x, y) || **x == **y)
            }
            _ => false,
        }
    }
}

impl Eq for Node {}

/// Row-major mixed radix: the first digit is most significant.
pub fn encode(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    let mut acc = 0;
    for (d, r) in digits.iter().zip(radices) {
        debug_assert!(d < r);
        acc = acc * r + d;
    }
    acc
}

pub fn decode(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, r) in radices.iter().enumerate().rev() {
        out[slot] = idx % r;
        idx /= r;
    }
    debug_assert_eq!(idx, 0);
    out
}

/// Decode a flat index of a nested tensor into per-leaf digits,
/// appended to `out` in leaf order.
pub fn nested_decode(node: &Arc<Node>, idx: usize, out: &mut Vec<usize>) {
    match &node.shape {
        Shape::Tensor(children) => {
            let radices: Vec<usize> = children
                .iter()
                .map(|c| match node.base {
                    BaseKind::Linear => c.size,
                    BaseKind::Pointed => c.size.saturating_sub(1),
                })
                .collect();
            let digits = decode(idx, &radices);
            for (c, d) in children.iter().zip(digits) {
                nested_decode(c, d, out);
            }
        }
        _ => out.push(idx),
    }
}

/// Encode per-leaf digits (consumed from `digits`) into the flat index
/// of a nested tensor.
pub fn nested_encode(node: &Arc<Node>, digits: &mut std::slice::Iter<'_, usize>) -> usize {
    match &node.shape {
        Shape::Tensor(children) => {
            let mut acc = 0;
            for c in children {
                let r = match node.base {
                    BaseKind::Linear => c.size,
                    BaseKind::Pointed => c.size.saturating_sub(1),
                };
                acc = acc * r + nested_encode(c, digits);
            }
            acc
        }
        _ => *digits.next().expect("digit stream long enough"),
    }
}
