//! Labeled tree distance in the 1-norm: exact over permutations, and its
//! doubly stochastic relaxation.
//!
//! Both minimise `‖A S − S B‖₁ + Σ S_ij ‖x_i − y_j‖₂` over `S`.

use super::MetricError;
use crate::graph::LabeledGraph;
use crate::scalar::{euclidean, Scalar};
use crate::solvers::{solve_lp, LpProblem, Relation};

/// Largest order searched exhaustively.
pub const PERM_EXACT_LIMIT: usize = 10;

fn check<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> Result<(), MetricError> {
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
    Ok(())
}

fn label_costs<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> Vec<Vec<T>> {
    (0..g.n())
        .map(|i| (0..h.n()).map(|j| euclidean(g.feature(i), h.feature(j))).collect())
        .collect()
}

struct Search<'a, T> {
    a: &'a [Vec<u8>],
    b: &'a [Vec<u8>],
    cost: &'a [Vec<T>],
    deg_a: Vec<usize>,
    deg_b: Vec<usize>,
    order: Vec<usize>,
    image: Vec<usize>,
    used: Vec<bool>,
    best: T,
}

impl<T: Scalar> Search<'_, T> {
    fn bound(&self, step: usize) -> T {
        let n = self.order.len();
        let mut lb = T::zero();
        for &i in &self.order[step..] {
            let mut m: Option<T> = None;
            for j in 0..n {
                if !self.used[j] {
                    let c = self.cost[i][j] + T::lit(self.deg_a[i].abs_diff(self.deg_b[j]) as f64);
                    if m.is_none_or(|x| c < x) {
                        m = Some(c);
                    }
                }
            }
            lb += m.unwrap_or(T::zero());
        }
        lb
    }

    fn run(&mut self, step: usize, partial: T) {
        let n = self.order.len();
        if step == n {
            if partial < self.best {
                self.best = partial;
            }
            return;
        }
        if partial + self.bound(step) >= self.best {
            return;
        }
        let i = self.order[step];
        for j in 0..n {
            if self.used[j] {
                continue;
            }
            let mut mismatch = 0usize;
            for &k in &self.order[..step] {
                if self.a[i][k] != self.b[j][self.image[k]] {
                    mismatch += 2;
                }
            }
            let next = partial + T::lit(mismatch as f64) + self.cost[i][j];
            if next >= self.best {
                continue;
            }
            self.used[j] = true;
            self.image[i] = j;
            self.run(step + 1, next);
            self.used[j] = false;
        }
    }
}

/// Orders a pair canonically so that `f(g, h)` and `f(h, g)` run the same computation.
fn oriented<'a, T: Scalar>(g: &'a LabeledGraph<T>, h: &'a LabeledGraph<T>) -> (&'a LabeledGraph<T>, &'a LabeledGraph<T>) {
    let key = |x: &LabeledGraph<T>| {
        let bits: Vec<u64> = x.features().flat_map(|f| f.iter().map(|v| v.key_bits())).collect();
        (x.adjacency_matrix(), bits)
    };
    if key(g) <= key(h) {
        (g, h)
    } else {
        (h, g)
    }
}

/// Exact `min_P ‖A(g) P − P A(h)‖₁ + tr(Pᵀ C)` over permutation matrices, by branch and bound.
pub fn delta_perm_1<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> Result<T, MetricError> {
    check(g, h)?;
    let (g, h) = oriented(g, h);
    let n = g.n();
    if n > PERM_EXACT_LIMIT {
        return Err(MetricError::TooLargeForExact(n));
    }
    let a = g.adjacency_matrix();
    let b = h.adjacency_matrix();
    let cost = label_costs(g, h);
    let deg_a: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let deg_b: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(deg_a[v]));
    // Identity-like starting incumbent: the sorted-degree pairing.
    let mut by_deg: Vec<usize> = (0..n).collect();
    by_deg.sort_by_key(|&v| std::cmp::Reverse(deg_b[v]));
    let mut start = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        start[i] = by_deg[k];
    }
    let mut initial = T::zero();
    for i in 0..n {
        initial += cost[i][start[i]];
        for l in 0..n {
            if a[i][l] != b[start[i]][start[l]] {
                initial += T::one();
            }
        }
    }
    let mut s = Search {
        a: &a,
        b: &b,
        cost: &cost,
        deg_a,
        deg_b,
        order,
        image: vec![0; n],
        used: vec![false; n],
        best: initial,
    };
    s.run(0, T::zero());
    Ok(s.best)
}

/// `min_{S ∈ D_n} ‖A(g) S − S A(h)‖₁ + tr(Sᵀ C)`, solved as a linear program.
pub fn delta_ds_1<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> Result<T, MetricError> {
    check(g, h)?;
    let (g, h) = oriented(g, h);
    let n = g.n();
    if n == 0 {
        return Ok(T::zero());
    }
    let a = g.adjacency_matrix();
    let b = h.adjacency_matrix();
    let cost = label_costs(g, h);
    let s = |i: usize, j: usize| i * n + j;
    let t = |i: usize, j: usize| n * n + i * n + j;
    let mut objective = vec![T::zero(); 2 * n * n];
    for i in 0..n {
        for j in 0..n {
            objective[s(i, j)] = cost[i][j];
            objective[t(i, j)] = T::one();
        }
    }
    let mut p = LpProblem::new(objective);
    for i in 0..n {
        for l in 0..n {
            // (A S − S B)_il = Σ_k A_ik S_kl − Σ_k S_ik B_kl
            let mut terms: Vec<(usize, T)> = Vec::new();
            for k in 0..n {
                if a[i][k] == 1 {
                    terms.push((s(k, l), T::one()));
                }
                if b[k][l] == 1 {
                    terms.push((s(i, k), -T::one()));
                }
            }
            let mut plus = terms.clone();
            plus.push((t(i, l), -T::one()));
            p.add_sparse(&plus, Relation::Le, T::zero());
            let mut minus: Vec<(usize, T)> = terms.into_iter().map(|(v, c)| (v, -c)).collect();
            minus.push((t(i, l), -T::one()));
            p.add_sparse(&minus, Relation::Le, T::zero());
        }
    }
    for i in 0..n {
        let row: Vec<(usize, T)> = (0..n).map(|j| (s(i, j), T::one())).collect();
        p.add_sparse(&row, Relation::Eq, T::one());
        let col: Vec<(usize, T)> = (0..n).map(|j| (s(j, i), T::one())).collect();
        p.add_sparse(&col, Relation::Eq, T::one());
    }
    Ok(solve_lp(&p)?.value.max(T::zero()))
}
