//! Labeled undirected graphs and collections of them.

use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {{{0},{1}}} is not present")]
    EdgeAbsent(usize, usize),
    #[error("edge {{{0},{1}}} is already present")]
    EdgePresent(usize, usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("feature vector has length {got}, expected {expected}")]
    BadDimension { expected: usize, got: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("cannot pad a graph of order {order} to order {target}")]
    TargetTooSmall { order: usize, target: usize },
    #[error("feature dimensions differ: {0} vs {1}")]
    FeatureDimMismatch(usize, usize),
    #[error("feature dimension must be at least 1")]
    ZeroDimension,
}

/// A single-element modification of a graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit<T> {
    DeleteEdge(usize, usize),
    AddEdge(usize, usize),
    SetFeature(usize, Vec<T>),
}

/// Undirected simple graph with a `d`-dimensional feature vector per vertex.
///
/// Vertices are `0..n`. Edges are stored once as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct LabeledGraph<T> {
    n: usize,
    d: usize,
    edges: BTreeSet<(usize, usize)>,
    features: Vec<T>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl<T: Scalar> LabeledGraph<T> {
    /// Builds a graph from an edge list and one feature row per vertex.
    ///
    /// Duplicate edges (in either orientation) collapse to one.
    pub fn new(
        n: usize,
        d: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        features: Vec<Vec<T>>,
    ) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::ZeroDimension);
        }
        if features.len() != n {
            return Err(GraphError::BadVertex(features.len().min(n)));
        }
        let mut flat = Vec::with_capacity(n * d);
        for row in &features {
            if row.len() != d {
                return Err(GraphError::BadDimension {
                    expected: d,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::BadVertex(u));
            }
            if v >= n {
                return Err(GraphError::BadVertex(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert(ordered(u, v));
        }
        Ok(Self::assemble(n, d, set, flat))
    }

    fn assemble(n: usize, d: usize, edges: BTreeSet<(usize, usize)>, features: Vec<T>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self {
            n,
            d,
            edges,
            features,
            adj,
        }
    }

    /// Graph whose every vertex carries the one-dimensional feature `[1]`.
    pub fn unlabeled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, 1, edges, vec![vec![T::one()]; n])
    }

    /// Graph with one-hot features `e_{labels[v]}` in dimension `d`.
    pub fn one_hot(
        n: usize,
        d: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: &[usize],
    ) -> Result<Self, GraphError> {
        if labels.len() != n {
            return Err(GraphError::BadVertex(labels.len().min(n)));
        }
        let mut rows = Vec::with_capacity(n);
        for &l in labels {
            if l >= d {
                return Err(GraphError::BadDimension { expected: d, got: l + 1 });
            }
            let mut row = vec![T::zero(); d];
            row[l] = T::one();
            rows.push(row);
        }
        Self::new(n, d, edges, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&ordered(u, v))
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn feature(&self, v: usize) -> &[T] {
        &self.features[v * self.d..(v + 1) * self.d]
    }

    pub fn features(&self) -> impl Iterator<Item = &[T]> {
        self.features.chunks_exact(self.d)
    }

    /// True when every feature row is a standard basis vector.
    pub fn is_one_hot(&self) -> bool {
        self.features().all(|row| {
            row.iter().filter(|&&x| x == T::one()).count() == 1
                && row.iter().all(|&x| x == T::one() || x == T::zero())
        })
    }

    /// Index of the 1 in a one-hot row, `None` for any other row.
    pub fn label_index(&self, v: usize) -> Option<usize> {
        let row = self.feature(v);
        let mut hit = None;
        for (i, &x) in row.iter().enumerate() {
            if x == T::one() && hit.is_none() {
                hit = Some(i);
            } else if x != T::zero() {
                return None;
            }
        }
        hit
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        a
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::BadVertex(v))
        }
    }

    /// Returns a copy with one edge or one feature changed.
    pub fn edit(&self, op: &Edit<T>) -> Result<Self, GraphError> {
        match op {
            Edit::DeleteEdge(u, v) => {
                self.check_vertex(*u)?;
                self.check_vertex(*v)?;
                let mut edges = self.edges.clone();
                if !edges.remove(&ordered(*u, *v)) {
                    return Err(GraphError::EdgeAbsent(*u, *v));
                }
                Ok(Self::assemble(self.n, self.d, edges, self.features.clone()))
            }
            Edit::AddEdge(u, v) => {
                self.check_vertex(*u)?;
                self.check_vertex(*v)?;
                if u == v {
                    return Err(GraphError::SelfLoop(*u));
                }
                let mut edges = self.edges.clone();
                if !edges.insert(ordered(*u, *v)) {
                    return Err(GraphError::EdgePresent(*u, *v));
                }
                Ok(Self::assemble(self.n, self.d, edges, self.features.clone()))
            }
            Edit::SetFeature(v, x) => {
                self.check_vertex(*v)?;
                if x.len() != self.d {
                    return Err(GraphError::BadDimension {
                        expected: self.d,
                        got: x.len(),
                    });
                }
                let mut features = self.features.clone();
                features[v * self.d..(v + 1) * self.d].copy_from_slice(x);
                Ok(Self::assemble(self.n, self.d, self.edges.clone(), features))
            }
        }
    }

    /// Appends isolated vertices with the all-zero feature up to order `target`.
    pub fn pad_to_order(&self, target: usize) -> Result<Self, GraphError> {
        if target < self.n {
            return Err(GraphError::TargetTooSmall {
                order: self.n,
                target,
            });
        }
        let mut features = self.features.clone();
        features.resize(target * self.d, T::zero());
        Ok(Self::assemble(target, self.d, self.edges.clone(), features))
    }

    /// `self ∪̇ other`, with `other`'s vertices shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, GraphError> {
        if self.d != other.d {
            return Err(GraphError::FeatureDimMismatch(self.d, other.d));
        }
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        let mut features = self.features.clone();
        features.extend_from_slice(&other.features);
        Ok(Self::assemble(self.n + other.n, self.d, edges, features))
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length");
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| ordered(perm[u], perm[v]))
            .collect();
        let mut features = vec![T::zero(); self.features.len()];
        for v in 0..self.n {
            let p = perm[v];
            features[p * self.d..(p + 1) * self.d].copy_from_slice(self.feature(v));
        }
        Self::assemble(self.n, self.d, edges, features)
    }

    /// Converts the feature scalar type.
    pub fn cast<U: Scalar>(&self) -> LabeledGraph<U> {
        let features = self
            .features
            .iter()
            .map(|&x| U::lit(x.to_f64_lossy()))
            .collect();
        LabeledGraph::assemble(self.n, self.d, self.edges.clone(), features)
    }

    /// Rebuilds adjacency lists after deserialization.
    pub fn reindexed(self) -> Self {
        Self::assemble(self.n, self.d, self.edges, self.features)
    }
}

/// An ordered set of graphs with binary class labels and source identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCollection<T> {
    pub graphs: Vec<LabeledGraph<T>>,
    pub labels: Vec<u8>,
    pub sources: Vec<String>,
}

impl<T: Scalar> GraphCollection<T> {
    /// Collection with label 0 and source `"{prefix}{index}"` for every graph.
    pub fn from_graphs(graphs: Vec<LabeledGraph<T>>, prefix: &str) -> Self {
        let k = graphs.len();
        Self {
            graphs,
            labels: vec![0; k],
            sources: (0..k).map(|i| format!("{prefix}{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.graphs.iter().map(LabeledGraph::n).max().unwrap_or(0)
    }

    /// Pads every graph to the same order (the maximum when `target` is `None`).
    pub fn padded(&self, target: Option<usize>) -> Result<Self, GraphError> {
        let n = target.unwrap_or_else(|| self.max_order());
        let graphs = self
            .graphs
            .iter()
            .map(|g| g.pad_to_order(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            graphs,
            labels: self.labels.clone(),
            sources: self.sources.clone(),
        })
    }

    /// Canonical JSON serialization used for determinism checks.
    pub fn to_canonical_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a, T> {
            source: &'a str,
            label: u8,
            graph: &'a LabeledGraph<T>,
        }
        let entries: Vec<_> = self
            .graphs
            .iter()
            .zip(&self.labels)
            .zip(&self.sources)
            .map(|((graph, &label), source)| Entry {
                source,
                label,
                graph,
            })
            .collect();
        serde_json::to_string(&entries).expect("graphs serialize")
    }
}

/// Common small graphs used in examples and tests.
pub mod named {
    use super::LabeledGraph;
    use crate::scalar::Scalar;

    pub fn path<T: Scalar>(n: usize) -> LabeledGraph<T> {
        LabeledGraph::unlabeled(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle<T: Scalar>(n: usize) -> LabeledGraph<T> {
        LabeledGraph::unlabeled(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete<T: Scalar>(n: usize) -> LabeledGraph<T> {
        LabeledGraph::unlabeled(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("valid complete graph")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star<T: Scalar>(leaves: usize) -> LabeledGraph<T> {
        LabeledGraph::unlabeled(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid star")
    }

    pub fn empty<T: Scalar>(n: usize) -> LabeledGraph<T> {
        LabeledGraph::unlabeled(n, []).expect("valid empty graph")
    }
}
