//! Unrolling trees, mean-pruning, canonical codes and padded forests.

use crate::graph::LabeledGraph;
use crate::scalar::Scalar;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap on the number of vertices an explicit tree or forest may hold.
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnrollError {
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("forests need graphs of order at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("construction needs {needed} vertices, cap is {cap}")]
    VertexCap { needed: usize, cap: usize },
}

/// Labeled rooted tree stored as an arena; vertex 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree<T> {
    d: usize,
    labels: Vec<T>,
    children: Vec<Vec<usize>>,
}

impl<T: Scalar> RootedTree<T> {
    pub fn leaf(label: &[T]) -> Self {
        Self {
            d: label.len(),
            labels: label.to_vec(),
            children: vec![Vec::new()],
        }
    }

    /// Appends a new child of `parent` and returns its id.
    pub fn push_child(&mut self, parent: usize, label: &[T]) -> usize {
        assert_eq!(label.len(), self.d, "label dimension");
        let id = self.children.len();
        self.labels.extend_from_slice(label);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn label(&self, v: usize) -> &[T] {
        &self.labels[v * self.d..(v + 1) * self.d]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((v, k)) = stack.pop() {
            best = best.max(k);
            stack.extend(self.children[v].iter().map(|&c| (c, k + 1)));
        }
        best
    }

    /// Copy of the subtree rooted at `v`.
    pub fn subtree(&self, v: usize) -> Self {
        let mut out = Self::leaf(self.label(v));
        let mut stack = vec![(v, 0usize)];
        while let Some((src, dst)) = stack.pop() {
            for &c in &self.children[src] {
                let id = out.push_child(dst, self.label(c));
                stack.push((c, id));
            }
        }
        out
    }

    fn code_of(&self, v: usize, out: &mut Vec<u8>) {
        out.push(b'(');
        for &x in self.label(v) {
            out.extend_from_slice(&x.key_bits().to_be_bytes());
        }
        let mut codes: Vec<Vec<u8>> = self.children[v]
            .iter()
            .map(|&c| {
                let mut s = Vec::new();
                self.code_of(c, &mut s);
                s
            })
            .collect();
        codes.sort_unstable();
        for c in codes {
            out.extend_from_slice(&c);
        }
        out.push(b')');
    }

    /// Isomorphism-invariant encoding: label bytes followed by sorted child codes.
    ///
    /// Labels have a fixed width, so the encoding parses unambiguously and equal codes
    /// mean isomorphic labeled rooted trees.
    pub fn canonical_code(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.code_of(0, &mut out);
        out
    }

    /// Parenthesised text form `(label(child)(child)...)`, labels comma-separated.
    pub fn to_debug_string(&self) -> String {
        fn rec<T: Scalar>(t: &RootedTree<T>, v: usize, out: &mut String) {
            out.push('(');
            let parts: Vec<String> = t.label(v).iter().map(|x| format!("{x}")).collect();
            out.push_str(&parts.join(","));
            for &c in t.children(v) {
                rec(t, c, out);
            }
            out.push(')');
        }
        let mut s = String::new();
        rec(self, 0, &mut s);
        s
    }
}

/// Unrolling tree of `g` at `u` with depth `depth`, under the default vertex cap.
pub fn unroll<T: Scalar>(g: &LabeledGraph<T>, u: usize, depth: usize) -> Result<RootedTree<T>, UnrollError> {
    unroll_capped(g, u, depth, DEFAULT_VERTEX_CAP)
}

pub fn unroll_capped<T: Scalar>(
    g: &LabeledGraph<T>,
    u: usize,
    depth: usize,
    cap: usize,
) -> Result<RootedTree<T>, UnrollError> {
    if u >= g.n() {
        return Err(UnrollError::BadVertex(u));
    }
    let mut tree = RootedTree::leaf(g.feature(u));
    let mut frontier = vec![(0usize, u)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (node, v) in frontier {
            for &w in g.neighbors(v) {
                if tree.len() >= cap {
                    return Err(UnrollError::VertexCap {
                        needed: tree.len() + 1,
                        cap,
                    });
                }
                let id = tree.push_child(node, g.feature(w));
                next.push((id, w));
            }
        }
        frontier = next;
    }
    Ok(tree)
}

/// Recursive form used while pruning.
struct Node<T> {
    label: Vec<T>,
    children: Vec<Node<T>>,
}

fn to_node<T: Scalar>(t: &RootedTree<T>, v: usize) -> Node<T> {
    Node {
        label: t.label(v).to_vec(),
        children: t.children(v).iter().map(|&c| to_node(t, c)).collect(),
    }
}

fn node_code<T: Scalar>(n: &Node<T>) -> Vec<u8> {
    let mut out = vec![b'('];
    for &x in &n.label {
        out.extend_from_slice(&x.key_bits().to_be_bytes());
    }
    let mut codes: Vec<Vec<u8>> = n.children.iter().map(node_code).collect();
    codes.sort_unstable();
    for c in codes {
        out.extend_from_slice(&c);
    }
    out.push(b')');
    out
}

/// Prunes bottom-up; returns the pruned node and its code.
fn prune_node<T: Scalar>(n: Node<T>) -> (Node<T>, Vec<u8>) {
    let pruned: Vec<(Node<T>, Vec<u8>)> = n.children.into_iter().map(prune_node).collect();
    let mut mult: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for (_, code) in &pruned {
        *mult.entry(code.clone()).or_default() += 1;
    }
    let c = mult.values().fold(0usize, |acc, &m| acc.gcd(&m));
    let mut keep: BTreeMap<Vec<u8>, usize> = mult.into_iter().map(|(k, m)| (k, m / c.max(1))).collect();
    let mut children = Vec::new();
    let mut codes = Vec::new();
    for (child, code) in pruned {
        let left = keep.get_mut(&code).expect("code counted");
        if *left > 0 {
            *left -= 1;
            codes.push(code);
            children.push(child);
        }
    }
    codes.sort_unstable();
    let mut code = vec![b'('];
    for &x in &n.label {
        code.extend_from_slice(&x.key_bits().to_be_bytes());
    }
    for c in codes {
        code.extend_from_slice(&c);
    }
    code.push(b')');
    (
        Node {
            label: n.label,
            children,
        },
        code,
    )
}

fn from_node<T: Scalar>(n: &Node<T>) -> RootedTree<T> {
    let mut t = RootedTree::leaf(&n.label);
    let mut stack = vec![(n, 0usize)];
    while let Some((src, dst)) = stack.pop() {
        for c in &src.children {
            let id = t.push_child(dst, &c.label);
            stack.push((c, id));
        }
    }
    t
}

/// Mean-pruning: at every vertex, divides the multiplicities of child-subtree types
/// by their gcd, from the deepest level upwards.
pub fn mean_prune<T: Scalar>(t: &RootedTree<T>) -> RootedTree<T> {
    let (node, _) = prune_node(to_node(t, 0));
    from_node(&node)
}

/// Canonical code of `t` computed through the pruning recursion (test helper).
pub fn pruned_code<T: Scalar>(t: &RootedTree<T>) -> Vec<u8> {
    prune_node(to_node(t, 0)).1
}

#[doc(hidden)]
pub fn node_code_of<T: Scalar>(t: &RootedTree<T>) -> Vec<u8> {
    node_code(&to_node(t, 0))
}

/// Which unrolling a forest is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForestMode {
    Sum,
    Mean,
}

/// `n` complete `(n-1)`-ary trees of depth `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedForest<T> {
    pub trees: Vec<RootedTree<T>>,
    /// Mean mode only: `s(v)` per tree vertex; features were divided by it.
    pub scaling: Option<Vec<Vec<u64>>>,
}

/// Vertices in a complete `(n-1)`-ary tree of depth `depth`, if it fits in `usize`.
pub fn padded_tree_size(n: usize, depth: usize) -> Option<usize> {
    let b = n.checked_sub(1)?;
    let mut total: usize = 1;
    let mut level: usize = 1;
    for _ in 0..depth {
        level = level.checked_mul(b)?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// Builds the padded unrolling forest of `g` (mean-pruned and scaled in mean mode).
pub fn build_forest<T: Scalar>(
    g: &LabeledGraph<T>,
    depth: usize,
    mode: ForestMode,
) -> Result<PaddedForest<T>, UnrollError> {
    build_forest_capped(g, depth, mode, DEFAULT_VERTEX_CAP)
}

pub fn build_forest_capped<T: Scalar>(
    g: &LabeledGraph<T>,
    depth: usize,
    mode: ForestMode,
    cap: usize,
) -> Result<PaddedForest<T>, UnrollError> {
    let n = g.n();
    if n < 2 {
        return Err(UnrollError::OrderTooSmall(n));
    }
    let needed = padded_tree_size(n, depth)
        .and_then(|s| s.checked_mul(n))
        .unwrap_or(usize::MAX);
    if needed > cap {
        return Err(UnrollError::VertexCap { needed, cap });
    }
    let zero = vec![T::zero(); g.d()];
    let mut trees = Vec::with_capacity(n);
    let mut scalings = Vec::with_capacity(n);
    for u in 0..n {
        let base = unroll(g, u, depth)?;
        let base = match mode {
            ForestMode::Sum => base,
            ForestMode::Mean => mean_prune(&base),
        };
        let mut out = RootedTree::leaf(base.label(0));
        let mut scale = vec![1u64];
        // (source vertex or None for padding, destination id, level)
        let mut stack = vec![(Some(0usize), 0usize, 0usize)];
        while let Some((src, dst, level)) = stack.pop() {
            if level == depth {
                continue;
            }
            let real: &[usize] = src.map_or(&[], |s| base.children(s));
            let k = real.len() as u64;
            let child_scale = scale[dst] * k.max(1);
            for slot in 0..n - 1 {
                let (child_src, label) = match real.get(slot) {
                    Some(&c) => {
                        let lab: Vec<T> = match mode {
                            ForestMode::Sum => base.label(c).to_vec(),
                            ForestMode::Mean => {
                                let s = T::lit(child_scale as f64);
                                base.label(c).iter().map(|&x| x / s).collect()
                            }
                        };
                        (Some(c), lab)
                    }
                    None => (None, zero.clone()),
                };
                let id = out.push_child(dst, &label);
                scale.push(child_scale);
                stack.push((child_src, id, level + 1));
            }
        }
        trees.push(out);
        scalings.push(scale);
    }
    Ok(PaddedForest {
        trees,
        scaling: (mode == ForestMode::Mean).then_some(scalings),
    })
}
