//! Forest distance and mean-Forest distance.
//!
//! Padded unrolling forests are exponentially large, but every subtree is determined
//! by a vertex, its level and (in mean mode) its scale. Subtrees are therefore
//! hash-consed into one DAG per level, shared by every graph of a collection. Tree
//! distances between all node pairs of a level are tabulated bottom-up; each entry
//! is an assignment between the two child lists where a real child facing a padding
//! slot pays its whole subtree mass.

use super::{MetricError, Omega};
use crate::graph::LabeledGraph;
use crate::scalar::{euclidean, norm2, Scalar};
use crate::solvers::assignment;
use crate::unrolling::ForestMode;
use num_integer::Integer;
use rayon::prelude::*;
use std::collections::HashMap;

/// Default limit on DAG nodes in any single level.
pub const DEFAULT_LEVEL_CAP: usize = 40_000;

struct Level<T> {
    labels: Vec<Vec<T>>,
    children: Vec<Vec<usize>>,
    mass: Vec<T>,
    /// Row-major `len × len` tree distances.
    td: Vec<T>,
}

impl<T: Scalar> Level<T> {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn td(&self, a: usize, b: usize) -> T {
        self.td[a * self.len() + b]
    }
}

/// Tree distances between all subtrees occurring in a set of graphs' padded forests.
pub struct ForestEngine<T> {
    depth: usize,
    order: usize,
    levels: Vec<Level<T>>,
    roots: Vec<Vec<usize>>,
}

type TypeKey = (usize, Vec<u64>, Vec<(usize, u64)>);

struct Builder<'a, T> {
    mode: ForestMode,
    depth: usize,
    omega: &'a Omega,
    cap: usize,
    // Unscaled subtree types: (remaining depth, label, child multiset).
    type_ids: HashMap<TypeKey, usize>,
    type_label: Vec<Vec<T>>,
    type_children: Vec<Vec<(usize, u64)>>,
    type_remaining: Vec<usize>,
    // Scaled level nodes.
    node_ids: Vec<HashMap<(Vec<u64>, Vec<usize>), usize>>,
    levels: Vec<Level<T>>,
    expanded: HashMap<(usize, u64), usize>,
}

fn label_key<T: Scalar>(x: &[T]) -> Vec<u64> {
    x.iter().map(|v| v.key_bits()).collect()
}

impl<T: Scalar> Builder<'_, T> {
    fn intern_type(&mut self, remaining: usize, label: &[T], mut kids: Vec<usize>) -> usize {
        kids.sort_unstable();
        let mut multiset: Vec<(usize, u64)> = Vec::new();
        for k in kids {
            match multiset.last_mut() {
                Some((t, m)) if *t == k => *m += 1,
                _ => multiset.push((k, 1)),
            }
        }
        if self.mode == ForestMode::Mean {
            let g = multiset.iter().fold(0u64, |acc, &(_, m)| acc.gcd(&m));
            for (_, m) in multiset.iter_mut() {
                *m /= g.max(1);
            }
        }
        let key = (remaining, label_key(label), multiset);
        if let Some(&id) = self.type_ids.get(&key) {
            return id;
        }
        let id = self.type_label.len();
        self.type_label.push(label.to_vec());
        self.type_children.push(key.2.clone());
        self.type_remaining.push(remaining);
        self.type_ids.insert(key, id);
        id
    }

    /// Root types of every vertex of `g`.
    fn graph_types(&mut self, g: &LabeledGraph<T>) -> Vec<usize> {
        let n = g.n();
        let mut prev: Vec<usize> = (0..n).map(|v| self.intern_type(0, g.feature(v), Vec::new())).collect();
        for r in 1..=self.depth {
            prev = (0..n)
                .map(|v| {
                    let kids = g.neighbors(v).iter().map(|&w| prev[w]).collect();
                    self.intern_type(r, g.feature(v), kids)
                })
                .collect();
        }
        prev
    }

    /// Level node for type `t` at scale `s`.
    fn expand(&mut self, t: usize, s: u64) -> Result<usize, MetricError> {
        if let Some(&id) = self.expanded.get(&(t, s)) {
            return Ok(id);
        }
        let level = self.depth - self.type_remaining[t];
        let count: u64 = self.type_children[t].iter().map(|&(_, m)| m).sum();
        let child_scale = match self.mode {
            ForestMode::Sum => 1,
            ForestMode::Mean => s.checked_mul(count.max(1)).ok_or(MetricError::ScaleOverflow)?,
        };
        let mut kids = Vec::new();
        for (c, m) in self.type_children[t].clone() {
            let id = self.expand(c, child_scale)?;
            kids.extend(std::iter::repeat_n(id, m as usize));
        }
        kids.sort_unstable();
        let label: Vec<T> = if s == 1 {
            self.type_label[t].clone()
        } else {
            let sc = T::lit(s as f64);
            self.type_label[t].iter().map(|&x| x / sc).collect()
        };
        let key = (label_key(&label), kids);
        let id = match self.node_ids[level].get(&key) {
            Some(&id) => id,
            None => {
                let lvl = &mut self.levels[level];
                let id = lvl.labels.len();
                if id >= self.cap {
                    return Err(MetricError::TooLarge { level, cap: self.cap });
                }
                let below: T = if level < self.depth {
                    key.1.iter().map(|&k| self.levels[level + 1].mass[k]).sum()
                } else {
                    T::zero()
                };
                let lvl = &mut self.levels[level];
                lvl.mass.push(T::lit(self.omega.at(level)) * norm2(&label) + below);
                lvl.labels.push(label);
                lvl.children.push(key.1.clone());
                self.node_ids[level].insert(key, id);
                id
            }
        };
        self.expanded.insert((t, s), id);
        Ok(id)
    }
}

/// Optimal matching of two child lists inside `slots` padded positions.
fn transport<T: Scalar>(below: &Level<T>, ca: &[usize], cb: &[usize], slots: usize) -> T {
    if ca.is_empty() {
        return cb.iter().map(|&c| below.mass[c]).sum();
    }
    if cb.is_empty() {
        return ca.iter().map(|&c| below.mass[c]).sum();
    }
    if ca == cb {
        return T::zero();
    }
    let (a, b) = (ca.len(), cb.len());
    let s = (a + b).min(slots).max(a).max(b);
    let mut cost = vec![vec![T::zero(); s]; s];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = match (i < a, j < b) {
                (true, true) => below.td(ca[i], cb[j]),
                (true, false) => below.mass[ca[i]],
                (false, true) => below.mass[cb[j]],
                (false, false) => T::zero(),
            };
        }
    }
    assignment(&cost).expect("finite square costs").cost
}

/// Renumbers every level by content so ids do not depend on insertion order.
fn canonicalise<T: Scalar>(levels: &mut [Level<T>], roots: &mut [Vec<usize>]) {
    let mut remap_below: Option<Vec<usize>> = None;
    for lvl in levels.iter_mut().rev() {
        if let Some(map) = &remap_below {
            for kids in lvl.children.iter_mut() {
                for c in kids.iter_mut() {
                    *c = map[*c];
                }
                kids.sort_unstable();
            }
        }
        let mut order: Vec<usize> = (0..lvl.len()).collect();
        order.sort_by(|&x, &y| {
            label_key(&lvl.labels[x])
                .cmp(&label_key(&lvl.labels[y]))
                .then_with(|| lvl.children[x].cmp(&lvl.children[y]))
        });
        let mut map = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            map[old] = new;
        }
        lvl.labels = order.iter().map(|&o| std::mem::take(&mut lvl.labels[o])).collect();
        lvl.children = order.iter().map(|&o| std::mem::take(&mut lvl.children[o])).collect();
        lvl.mass = order.iter().map(|&o| lvl.mass[o]).collect();
        remap_below = Some(map);
    }
    if let Some(map) = remap_below {
        for r in roots.iter_mut() {
            for x in r.iter_mut() {
                *x = map[*x];
            }
            r.sort_unstable();
        }
    }
}

impl<T: Scalar> ForestEngine<T> {
    /// Builds the engine for `graphs`, all padded (implicitly) to the largest order.
    pub fn new(graphs: &[&LabeledGraph<T>], depth: usize, mode: ForestMode, omega: &Omega) -> Result<Self, MetricError> {
        Self::with_cap(graphs, depth, mode, omega, DEFAULT_LEVEL_CAP)
    }

    pub fn with_cap(
        graphs: &[&LabeledGraph<T>],
        depth: usize,
        mode: ForestMode,
        omega: &Omega,
        cap: usize,
    ) -> Result<Self, MetricError> {
        omega.validate()?;
        if let Some(first) = graphs.first() {
            if let Some(g) = graphs.iter().find(|g| g.d() != first.d()) {
                return Err(MetricError::DimMismatch {
                    left: first.d(),
                    right: g.d(),
                });
            }
        }
        let order = graphs.iter().map(|g| g.n()).max().unwrap_or(0).max(2);
        let mut b = Builder {
            mode,
            depth,
            omega,
            cap,
            type_ids: HashMap::new(),
            type_label: Vec::new(),
            type_children: Vec::new(),
            type_remaining: Vec::new(),
            node_ids: vec![HashMap::new(); depth + 1],
            levels: (0..=depth)
                .map(|_| Level {
                    labels: Vec::new(),
                    children: Vec::new(),
                    mass: Vec::new(),
                    td: Vec::new(),
                })
                .collect(),
            expanded: HashMap::new(),
        };
        let mut roots = Vec::with_capacity(graphs.len());
        for g in graphs {
            let types = b.graph_types(g);
            let r = types.into_iter().map(|t| b.expand(t, 1)).collect::<Result<Vec<_>, _>>()?;
            roots.push(r);
        }
        let mut levels = b.levels;
        canonicalise(&mut levels, &mut roots);
        for k in (0..=depth).rev() {
            let w = T::lit(omega.at(k));
            let (upper, lower) = levels.split_at_mut(k + 1);
            let lvl = &upper[k];
            let below = lower.first();
            let m = lvl.len();
            let rows: Vec<Vec<T>> = (0..m)
                .into_par_iter()
                .map(|a| {
                    (0..m)
                        .map(|b| {
                            if b <= a {
                                return T::zero();
                            }
                            let own = w * euclidean(&lvl.labels[a], &lvl.labels[b]);
                            match below {
                                Some(bl) => own + transport(bl, &lvl.children[a], &lvl.children[b], order - 1),
                                None => own,
                            }
                        })
                        .collect()
                })
                .collect();
            let mut td = vec![T::zero(); m * m];
            for a in 0..m {
                for b in a + 1..m {
                    td[a * m + b] = rows[a][b];
                    td[b * m + a] = rows[a][b];
                }
            }
            upper[k].td = td;
        }
        Ok(Self {
            depth,
            order,
            levels,
            roots,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of graphs the engine was built for.
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Distinct subtrees per level.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    /// Distance between graphs `i` and `j` of the build set.
    pub fn distance(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::zero();
        }
        let (i, j) = if self.roots[i] <= self.roots[j] { (i, j) } else { (j, i) };
        transport(&self.levels[0], &self.roots[i], &self.roots[j], self.order)
    }

    /// Total weighted label mass of graph `i`'s forest (its distance to an all-zero graph).
    pub fn mass(&self, i: usize) -> T {
        self.roots[i].iter().map(|&r| self.levels[0].mass[r]).sum()
    }
}

fn check_pair<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> Result<(), MetricError> {
    if g.n() != h.n() {
        return Err(MetricError::OrderMismatch {
            left: g.n(),
            right: h.n(),
        });
    }
    if g.d() != h.d() {
        return Err(MetricError::DimMismatch {
            left: g.d(),
            right: h.d(),
        });
    }
    if g.n() < 2 {
        return Err(MetricError::OrderTooSmall(g.n()));
    }
    Ok(())
}

/// `FD_{L,ω}(g, h)`.
pub fn forest_distance<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, depth: usize, omega: &Omega) -> Result<T, MetricError> {
    check_pair(g, h)?;
    Ok(ForestEngine::new(&[g, h], depth, ForestMode::Sum, omega)?.distance(0, 1))
}

/// Mean-Forest distance `FD^m_L(g, h)`.
pub fn mean_forest_distance<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, depth: usize) -> Result<T, MetricError> {
    check_pair(g, h)?;
    Ok(ForestEngine::new(&[g, h], depth, ForestMode::Mean, &Omega::One)?.distance(0, 1))
}
