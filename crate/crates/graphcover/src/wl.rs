//! 1-WL colour refinement and its mean variant (1-MWL).
//!
//! Several graphs are always refined together on their disjoint union, so colour ids
//! are comparable across graphs.

use crate::graph::{GraphCollection, LabeledGraph};
use crate::scalar::Scalar;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Number of refinement rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rounds {
    Iter(usize),
    /// Run until the partition stops being refined.
    Stable,
}

/// Neighbour aggregation used by the refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WlMode {
    /// Multiset of neighbour colours.
    Wl,
    /// Relative frequencies of neighbour colours.
    Mwl,
}

/// Colours of all vertices after `iteration` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub iteration: usize,
    pub colors: Vec<u32>,
}

impl Coloring {
    pub fn class_count(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

/// Frequency set of a neighbour multiset: `(colour, multiplicity / degree)`, sorted by colour.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreqSet(pub Vec<(u32, Ratio<i64>)>);

impl FreqSet {
    pub fn from_colors(neighbors: &mut [u32]) -> Self {
        neighbors.sort_unstable();
        let deg = neighbors.len() as i64;
        let mut out: Vec<(u32, Ratio<i64>)> = Vec::new();
        for &c in neighbors.iter() {
            match out.last_mut() {
                Some((last, r)) if *last == c => *r += Ratio::new(1, deg),
                _ => out.push((c, Ratio::new(1, deg))),
            }
        }
        FreqSet(out)
    }
}

#[derive(Hash, PartialEq, Eq)]
enum Signature {
    Multiset(u32, Vec<u32>),
    Freq(u32, FreqSet),
}

/// Result of refining one or more graphs jointly.
#[derive(Debug, Clone)]
pub struct JointRefinement {
    /// `colorings[t]` covers the vertices of every graph, graph by graph.
    pub colorings: Vec<Coloring>,
    offsets: Vec<usize>,
}

impl JointRefinement {
    /// Index of the last computed iteration.
    pub fn last(&self) -> usize {
        self.colorings.len() - 1
    }

    pub fn graph_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Colours of graph `gi` at iteration `t`.
    pub fn colors(&self, t: usize, gi: usize) -> &[u32] {
        &self.colorings[t].colors[self.offsets[gi]..self.offsets[gi + 1]]
    }

    /// Sorted colour histogram of graph `gi` at iteration `t`.
    pub fn histogram(&self, t: usize, gi: usize) -> Vec<(u32, usize)> {
        let mut c = self.colors(t, gi).to_vec();
        c.sort_unstable();
        let mut out: Vec<(u32, usize)> = Vec::new();
        for x in c {
            match out.last_mut() {
                Some((last, k)) if *last == x => *k += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

fn feature_key<T: Scalar>(row: &[T]) -> Vec<u64> {
    row.iter().map(|&x| x.key_bits()).collect()
}

/// Refines the disjoint union of `graphs`.
pub fn refine<T: Scalar>(graphs: &[&LabeledGraph<T>], mode: WlMode, rounds: Rounds) -> JointRefinement {
    let mut offsets = vec![0usize];
    for g in graphs {
        offsets.push(offsets.last().unwrap() + g.n());
    }
    let total = *offsets.last().unwrap();
    let mut adj: Vec<&[usize]> = Vec::with_capacity(total);
    let mut shift = Vec::with_capacity(total);
    let mut next_id = 0u32;
    let mut initial = Vec::with_capacity(total);
    let mut feat_table: HashMap<Vec<u64>, u32> = HashMap::new();
    for (gi, g) in graphs.iter().enumerate() {
        for v in 0..g.n() {
            adj.push(g.neighbors(v));
            shift.push(offsets[gi]);
            let id = *feat_table.entry(feature_key(g.feature(v))).or_insert_with(|| {
                next_id += 1;
                next_id - 1
            });
            initial.push(id);
        }
    }

    let mut colorings = vec![Coloring {
        iteration: 0,
        colors: initial,
    }];
    let limit = match rounds {
        Rounds::Iter(l) => l,
        Rounds::Stable => usize::MAX,
    };
    let mut prev_classes = colorings[0].class_count();
    let mut t = 0;
    while t < limit {
        let prev = &colorings[t].colors;
        let mut table: HashMap<Signature, u32> = HashMap::new();
        let mut colors = Vec::with_capacity(total);
        for v in 0..total {
            let mut nb: Vec<u32> = adj[v].iter().map(|&w| prev[w + shift[v]]).collect();
            let sig = match mode {
                WlMode::Wl => {
                    nb.sort_unstable();
                    Signature::Multiset(prev[v], nb)
                }
                WlMode::Mwl => Signature::Freq(prev[v], FreqSet::from_colors(&mut nb)),
            };
            let id = *table.entry(sig).or_insert_with(|| {
                next_id += 1;
                next_id - 1
            });
            colors.push(id);
        }
        t += 1;
        let coloring = Coloring { iteration: t, colors };
        let classes = coloring.class_count();
        colorings.push(coloring);
        if rounds == Rounds::Stable && classes == prev_classes {
            break;
        }
        prev_classes = classes;
    }
    JointRefinement { colorings, offsets }
}

/// 1-WL colourings `C_0..C_T` of a single graph.
pub fn wl1_refine<T: Scalar>(g: &LabeledGraph<T>, rounds: Rounds) -> Vec<Coloring> {
    refine(&[g], WlMode::Wl, rounds).colorings
}

/// 1-MWL colourings `C_0..C_T` of a single graph.
pub fn mwl1_refine<T: Scalar>(g: &LabeledGraph<T>, rounds: Rounds) -> Vec<Coloring> {
    refine(&[g], WlMode::Mwl, rounds).colorings
}

/// True when the joint refinement never separates the colour histograms of `g` and `h`.
pub fn joint_indistinguishable<T: Scalar>(
    g: &LabeledGraph<T>,
    h: &LabeledGraph<T>,
    mode: WlMode,
    rounds: Rounds,
) -> bool {
    let r = refine(&[g, h], mode, rounds);
    (0..=r.last()).all(|t| r.histogram(t, 0) == r.histogram(t, 1))
}

pub fn wl1_joint_indistinguishable<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, rounds: Rounds) -> bool {
    joint_indistinguishable(g, h, WlMode::Wl, rounds)
}

pub fn mwl1_joint_indistinguishable<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, rounds: Rounds) -> bool {
    joint_indistinguishable(g, h, WlMode::Mwl, rounds)
}

/// Iteration at which the joint refinement of `graphs` stabilises.
pub fn stable_depth<T: Scalar>(graphs: &[&LabeledGraph<T>], mode: WlMode) -> usize {
    refine(graphs, mode, Rounds::Stable).last()
}

/// Partition of a collection into refinement-equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    /// Member indices per class, classes ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Class index of every graph.
    pub class_of: Vec<usize>,
}

impl Quotient {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Smallest index in each class.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }
}

/// Groups graphs that the refinement cannot tell apart after `rounds`.
pub fn quotient_classes<T: Scalar>(coll: &GraphCollection<T>, mode: WlMode, rounds: Rounds) -> Quotient {
    let refs: Vec<&LabeledGraph<T>> = coll.graphs.iter().collect();
    quotient_of(&refs, mode, rounds)
}

pub fn quotient_of<T: Scalar>(graphs: &[&LabeledGraph<T>], mode: WlMode, rounds: Rounds) -> Quotient {
    let r = refine(graphs, mode, rounds);
    let t = r.last();
    let mut index: HashMap<(usize, Vec<(u32, usize)>), usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(graphs.len());
    for gi in 0..graphs.len() {
        // Graphs of different order never share a class.
        let key = (graphs[gi].n(), r.histogram(t, gi));
        let c = *index.entry(key).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(gi);
        class_of.push(c);
    }
    Quotient { classes, class_of }
}
