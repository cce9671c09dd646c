//! Tree Mover's distance on explicit unrolling trees.
//!
//! Written independently of the forest engine: every optimal transport between
//! subtree multisets is solved as a linear program over doubly stochastic plans.

use super::{MetricError, Omega};
use crate::graph::LabeledGraph;
use crate::scalar::{euclidean, Scalar};
use crate::solvers::{solve_lp, LpProblem, Relation};
use crate::unrolling::{unroll, RootedTree};
use std::collections::HashMap;

/// Uniform optimal transport between two equal-size multisets with cost matrix `c`.
fn ot<T: Scalar>(c: &[Vec<T>]) -> Result<T, MetricError> {
    let m = c.len();
    if m == 0 {
        return Ok(T::zero());
    }
    let mut p = LpProblem::new(c.iter().flatten().copied().collect());
    for i in 0..m {
        let row: Vec<(usize, T)> = (0..m).map(|j| (i * m + j, T::one())).collect();
        p.add_sparse(&row, Relation::Eq, T::one());
        let col: Vec<(usize, T)> = (0..m).map(|j| (j * m + i, T::one())).collect();
        p.add_sparse(&col, Relation::Eq, T::one());
    }
    Ok(solve_lp(&p)?.value)
}

/// A tree vertex, or a blank single-vertex tree.
#[derive(Clone, Copy)]
enum Side {
    Vertex(usize),
    Blank,
}

struct Tmd<'a, T> {
    a: &'a RootedTree<T>,
    b: &'a RootedTree<T>,
    code_a: Vec<usize>,
    code_b: Vec<usize>,
    height_a: Vec<usize>,
    height_b: Vec<usize>,
    omega: &'a Omega,
    memo: HashMap<(Option<usize>, Option<usize>), T>,
}

/// Vertex codes interned into `ids`, plus vertex heights counted in vertices.
fn codes<T: Scalar>(t: &RootedTree<T>, ids: &mut HashMap<Vec<u8>, usize>) -> (Vec<usize>, Vec<usize>) {
    let mut order = vec![0usize];
    let mut i = 0;
    while i < order.len() {
        order.extend_from_slice(t.children(order[i]));
        i += 1;
    }
    let mut code = vec![0usize; t.len()];
    let mut height = vec![1usize; t.len()];
    for &v in order.iter().rev() {
        let mut key: Vec<u8> = t.label(v).iter().flat_map(|x| x.key_bits().to_be_bytes()).collect();
        let mut kids: Vec<usize> = t.children(v).iter().map(|&c| code[c]).collect();
        kids.sort_unstable();
        for k in kids {
            key.extend_from_slice(&(k as u64).to_be_bytes());
        }
        height[v] = 1 + t.children(v).iter().map(|&c| height[c]).max().unwrap_or(0);
        let next = ids.len();
        code[v] = *ids.entry(key).or_insert(next);
    }
    (code, height)
}

impl<T: Scalar> Tmd<'_, T> {
    fn td(&mut self, x: Side, y: Side) -> Result<T, MetricError> {
        let key = (
            match x {
                Side::Vertex(v) => Some(self.code_a[v]),
                Side::Blank => None,
            },
            match y {
                Side::Vertex(v) => Some(self.code_b[v]),
                Side::Blank => None,
            },
        );
        if let Some(&d) = self.memo.get(&key) {
            return Ok(d);
        }
        let dim = self.a.dim();
        let zero = vec![T::zero(); dim];
        let (la, ka, ha): (&[T], &[usize], usize) = match x {
            Side::Vertex(v) => (self.a.label(v), self.a.children(v), self.height_a[v]),
            Side::Blank => (&zero, &[], 1),
        };
        let (lb, kb, hb): (&[T], &[usize], usize) = match y {
            Side::Vertex(v) => (self.b.label(v), self.b.children(v), self.height_b[v]),
            Side::Blank => (&zero, &[], 1),
        };
        let (ka, kb) = (ka.to_vec(), kb.to_vec());
        let mut d = euclidean(la, lb);
        let depth = ha.max(hb);
        if depth > 1 {
            let m = ka.len().max(kb.len());
            let mut cost = vec![vec![T::zero(); m]; m];
            for (i, row) in cost.iter_mut().enumerate() {
                for (j, c) in row.iter_mut().enumerate() {
                    let xi = ka.get(i).map_or(Side::Blank, |&v| Side::Vertex(v));
                    let yj = kb.get(j).map_or(Side::Blank, |&v| Side::Vertex(v));
                    *c = self.td(xi, yj)?;
                }
            }
            d += T::lit(self.omega.at(depth)) * ot(&cost)?;
        }
        self.memo.insert(key, d);
        Ok(d)
    }
}

/// `TMD^L_ω(g, h)`: transport between the two multisets of depth-`L` unrolling trees.
///
/// Here `ω` is indexed by tree height counted in vertices, so a single vertex has
/// height 1.
pub fn tmd<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, depth: usize, omega: &Omega) -> Result<T, MetricError> {
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
    omega.validate()?;
    // All trees of one graph hang under a virtual root so codes are shared.
    let forest = |x: &LabeledGraph<T>| -> Result<(RootedTree<T>, Vec<usize>), MetricError> {
        let mut t = RootedTree::leaf(&vec![T::zero(); x.d()]);
        let mut roots = Vec::new();
        for u in 0..x.n() {
            let tree = unroll(x, u, depth)?;
            let mut map = vec![0usize; tree.len()];
            map[0] = t.push_child(0, tree.label(0));
            roots.push(map[0]);
            let mut stack = vec![0usize];
            while let Some(v) = stack.pop() {
                for &c in tree.children(v) {
                    map[c] = t.push_child(map[v], tree.label(c));
                    stack.push(c);
                }
            }
        }
        Ok((t, roots))
    };
    let (ta, ra) = forest(g)?;
    let (tb, rb) = forest(h)?;
    let mut ids = HashMap::new();
    let (code_a, height_a) = codes(&ta, &mut ids);
    let (code_b, height_b) = codes(&tb, &mut ids);
    let mut st = Tmd {
        a: &ta,
        b: &tb,
        code_a,
        code_b,
        height_a,
        height_b,
        omega,
        memo: HashMap::new(),
    };
    let mut cost = vec![vec![T::zero(); ra.len()]; rb.len()];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = st.td(Side::Vertex(ra[i]), Side::Vertex(rb[j]))?;
        }
    }
    ot(&cost)
}
