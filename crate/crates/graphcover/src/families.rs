//! Graph families: all graphs of an order, Otter trees, the partition-path family
//! and bounded-degree labeled graphs, plus the edit trees used to cover them.

use crate::graph::{Edit, GraphCollection, LabeledGraph};
use crate::scalar::Scalar;
use crate::wl::{quotient_of, Quotient, Rounds, WlMode};
use std::collections::{BTreeMap, HashMap, VecDeque};
use thiserror::Error;

/// Largest order enumerated by brute-force canonical forms.
pub const MAX_BRUTE_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family too large to enumerate: {0}")]
    TooLarge(String),
    #[error("invalid family parameter: {0}")]
    BadParameter(String),
}

/// A graph class to enumerate up to isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    /// Unlabeled graphs on exactly `n` vertices.
    AllGraphs(usize),
    /// Unlabeled graphs on `1..=n` vertices.
    AllGraphsUpTo(usize),
    /// Full binary rooted trees with the given (odd) number of vertices.
    OtterTrees(usize),
    /// A path on `n` vertices joined by one edge to a disjoint union of paths on `n` vertices.
    PartitionPaths(usize),
    /// Graphs on `n` vertices with one-hot features in dimension `d` and maximum degree `q`.
    BoundedDegreeLabeled { n: usize, d: usize, q: usize },
}

/// Vertex colours of the stable colour refinement, numbered by sorted signature so
/// they are invariant under relabeling.
fn invariant_colors<T: Scalar>(g: &LabeledGraph<T>) -> Vec<usize> {
    let n = g.n();
    let keys: Vec<Vec<u64>> = (0..n).map(|v| g.feature(v).iter().map(|x| x.key_bits()).collect()).collect();
    let rank = |sigs: &[Vec<u64>]| -> Vec<usize> {
        let mut sorted: Vec<&Vec<u64>> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        sigs.iter().map(|s| sorted.binary_search(&s).expect("present")).collect()
    };
    let mut colors = rank(&keys);
    let mut classes = colors.iter().max().map_or(0, |m| m + 1);
    loop {
        let sigs: Vec<Vec<u64>> = (0..n)
            .map(|v| {
                let mut s: Vec<u64> = g.neighbors(v).iter().map(|&w| colors[w] as u64).collect();
                s.sort_unstable();
                s.insert(0, colors[v] as u64);
                s
            })
            .collect();
        let next = rank(&sigs);
        let count = next.iter().max().map_or(0, |m| m + 1);
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

struct Canon<'a> {
    adj: &'a [Vec<u8>],
    blocks: Vec<usize>,
    pool: Vec<Vec<usize>>,
    current: Vec<usize>,
    rows: Vec<u64>,
    best_rows: Vec<u64>,
    best_perm: Vec<usize>,
    found: bool,
}

impl Canon<'_> {
    fn search(&mut self, pos: usize) {
        let n = self.blocks.len();
        if pos == n {
            if !self.found || self.rows < self.best_rows {
                self.best_rows = self.rows.clone();
                self.best_perm = self.current.clone();
                self.found = true;
            }
            return;
        }
        let b = self.blocks[pos];
        for k in 0..self.pool[b].len() {
            let v = self.pool[b][k];
            if v == usize::MAX {
                continue;
            }
            let mut row = 0u64;
            for q in 0..pos {
                if self.adj[v][self.current[q]] == 1 {
                    row |= 1 << (63 - q);
                }
            }
            self.rows.push(row);
            if self.found && self.rows[..] > self.best_rows[..=pos] {
                self.rows.pop();
                continue;
            }
            self.pool[b][k] = usize::MAX;
            self.current.push(v);
            self.search(pos + 1);
            self.current.pop();
            self.pool[b][k] = v;
            self.rows.pop();
        }
    }
}

/// Isomorphism-invariant key and the canonically relabeled graph.
///
/// Vertices are first ordered by refined colour; the adjacency rows are then
/// minimised over all orderings inside colour classes.
pub fn canonical_form<T: Scalar>(g: &LabeledGraph<T>) -> (Vec<u64>, LabeledGraph<T>) {
    let n = g.n();
    assert!(n <= 64, "canonical form limited to 64 vertices");
    let colors = invariant_colors(g);
    let mut by_color: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        by_color.entry(colors[v]).or_default().push(v);
    }
    let pool: Vec<Vec<usize>> = by_color.into_values().collect();
    let blocks: Vec<usize> = pool.iter().enumerate().flat_map(|(b, vs)| std::iter::repeat_n(b, vs.len())).collect();
    let adj = g.adjacency_matrix();
    let mut c = Canon {
        adj: &adj,
        blocks,
        pool,
        current: Vec::with_capacity(n),
        rows: Vec::with_capacity(n),
        best_rows: Vec::new(),
        best_perm: Vec::new(),
        found: false,
    };
    c.search(0);
    // best_perm[position] = vertex; relabel vertex -> position.
    let mut perm = vec![0usize; n];
    for (pos, &v) in c.best_perm.iter().enumerate() {
        perm[v] = pos;
    }
    let relabeled = g.permuted(&perm);
    let mut key = vec![n as u64, g.d() as u64];
    for v in 0..n {
        key.extend(relabeled.feature(v).iter().map(|x| x.key_bits()));
    }
    key.extend_from_slice(&c.best_rows);
    (key, relabeled)
}

/// Whether two graphs are isomorphic (feature-preserving).
pub fn isomorphic<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>) -> bool {
    g.n() == h.n() && g.d() == h.d() && g.edge_count() == h.edge_count() && canonical_form(g).0 == canonical_form(h).0
}

/// Breadth-first closure of `start` under `moves`, deduplicated by canonical form.
fn closure<T: Scalar>(
    start: LabeledGraph<T>,
    moves: impl Fn(&LabeledGraph<T>) -> Vec<LabeledGraph<T>>,
) -> Vec<LabeledGraph<T>> {
    let (k, g) = canonical_form(&start);
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::from([(k, 0)]);
    let mut out = vec![g];
    let mut i = 0;
    while i < out.len() {
        for h in moves(&out[i]) {
            let (k, h) = canonical_form(&h);
            if !seen.contains_key(&k) {
                seen.insert(k, out.len());
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

fn non_edges<T: Scalar>(g: &LabeledGraph<T>) -> Vec<(usize, usize)> {
    let n = g.n();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect()
}

fn additions<T: Scalar>(g: &LabeledGraph<T>, max_degree: usize) -> Vec<LabeledGraph<T>> {
    non_edges(g)
        .into_iter()
        .filter(|&(u, v)| g.degree(u) < max_degree && g.degree(v) < max_degree)
        .map(|(u, v)| g.edit(&Edit::AddEdge(u, v)).expect("non-edge"))
        .collect()
}

fn relabelings<T: Scalar>(g: &LabeledGraph<T>) -> Vec<LabeledGraph<T>> {
    let d = g.d();
    let mut out = Vec::new();
    for v in 0..g.n() {
        let cur = g.label_index(v);
        for l in 0..d {
            if Some(l) != cur {
                let mut x = vec![T::zero(); d];
                x[l] = T::one();
                out.push(g.edit(&Edit::SetFeature(v, x)).expect("valid vertex"));
            }
        }
    }
    out
}

fn sort_by_size<T: Scalar>(mut gs: Vec<LabeledGraph<T>>) -> Vec<LabeledGraph<T>> {
    gs.sort_by_cached_key(|g| (g.edge_count(), canonical_form(g).0));
    gs
}

/// Unlabeled graphs of order `n`, one per isomorphism class, by edge count.
pub fn all_graphs<T: Scalar>(n: usize) -> Result<Vec<LabeledGraph<T>>, FamilyError> {
    if n > 7 {
        return Err(FamilyError::TooLarge(format!("all graphs on {n} vertices (limit 7)")));
    }
    Ok(sort_by_size(closure(LabeledGraph::unlabeled(n, []).expect("empty graph"), |g| {
        additions(g, usize::MAX)
    })))
}

/// Rooted canonical code of a tree given as child lists.
fn rooted_code(children: &[Vec<usize>], v: usize) -> String {
    let mut kids: Vec<String> = children[v].iter().map(|&c| rooted_code(children, c)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Full binary rooted trees on `vertices` vertices (odd, at least 1), as graphs with
/// the root at vertex 0.
pub fn otter_trees<T: Scalar>(vertices: usize) -> Result<Vec<LabeledGraph<T>>, FamilyError> {
    if vertices % 2 == 0 || vertices == 0 {
        return Err(FamilyError::BadParameter(format!("Otter trees need an odd order, got {vertices}")));
    }
    if vertices > 21 {
        return Err(FamilyError::TooLarge(format!("Otter trees on {vertices} vertices (limit 21)")));
    }
    let mut level: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::from([("()".to_string(), vec![Vec::new()])]);
    for _ in 0..(vertices - 1) / 2 {
        let mut next = BTreeMap::new();
        for tree in level.values() {
            for leaf in (0..tree.len()).filter(|&v| tree[v].is_empty()) {
                let mut t = tree.clone();
                let a = t.len();
                t.push(Vec::new());
                t.push(Vec::new());
                t[leaf] = vec![a, a + 1];
                next.entry(rooted_code(&t, 0)).or_insert(t);
            }
        }
        level = next;
    }
    Ok(level
        .values()
        .map(|t| {
            let edges: Vec<(usize, usize)> = t.iter().enumerate().flat_map(|(v, cs)| cs.iter().map(move |&c| (v, c))).collect();
            LabeledGraph::unlabeled(t.len(), edges).expect("valid tree")
        })
        .collect())
}

/// Wedderburn–Etherington number `WE(k)`: unordered full binary trees with `k` leaves.
fn we(k: usize, memo: &mut Vec<u128>) -> u128 {
    while memo.len() <= k {
        let m = memo.len();
        let v = match m {
            0 => 0,
            1 => 1,
            _ if m % 2 == 1 => (1..=m / 2).map(|i| memo[i] * memo[m - i]).sum(),
            _ => {
                let h = memo[m / 2];
                h * (h + 1) / 2 + (1..m / 2).map(|i| memo[i] * memo[m - i]).sum::<u128>()
            }
        };
        memo.push(v);
    }
    memo[k]
}

/// `w_j`: Otter trees with `j` internal vertices, i.e. on `2j + 1` vertices.
pub fn wedderburn_etherington(j: usize) -> u128 {
    we(j + 1, &mut Vec::new())
}

/// Partitions of `n` with parts in descending order, starting from `[n]`.
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// The partition-path family with its grouping by partition.
#[derive(Debug, Clone)]
pub struct PartitionPathFamily<T> {
    pub graphs: GraphCollection<T>,
    pub partitions: Vec<Vec<usize>>,
    /// Member indices for each partition, in partition order.
    pub groups: Vec<Vec<usize>>,
}

/// For every partition `P` of `n` and `j = 1..⌈n/2⌉`: the path on vertices
/// `0..n`, the paths of `P` on `n..2n` (largest first) and the edge joining the
/// first minimum-degree vertex of the largest part to path vertex `j - 1`.
pub fn partition_path_family<T: Scalar>(n: usize) -> Result<PartitionPathFamily<T>, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameter("partition paths need n >= 1".into()));
    }
    if n > 14 {
        return Err(FamilyError::TooLarge(format!("partition paths for n = {n} (limit 14)")));
    }
    let partitions = integer_partitions(n);
    let mut graphs = Vec::new();
    let mut sources = Vec::new();
    let mut groups = Vec::new();
    for (pi, p) in partitions.iter().enumerate() {
        let mut base: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        let mut start = n;
        for &part in p {
            base.extend((1..part).map(|i| (start + i - 1, start + i)));
            start += part;
        }
        // Largest part first: its first vertex has the minimum degree in it.
        let u = n;
        let mut members = Vec::new();
        for j in 1..=n.div_ceil(2) {
            let mut edges = base.clone();
            edges.push((j - 1, u));
            members.push(graphs.len());
            sources.push(format!("F{n}:{}:{j}", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+")));
            graphs.push(LabeledGraph::unlabeled(2 * n, edges).expect("valid construction"));
        }
        groups.push(members);
        let _ = pi;
    }
    let labels = vec![0; graphs.len()];
    Ok(PartitionPathFamily {
        graphs: GraphCollection { graphs, labels, sources },
        partitions,
        groups,
    })
}

/// Graphs of order `n` with one-hot labels in `d` dimensions and maximum degree `q`.
pub fn bounded_degree_labeled<T: Scalar>(n: usize, d: usize, q: usize) -> Result<Vec<LabeledGraph<T>>, FamilyError> {
    if d == 0 {
        return Err(FamilyError::BadParameter("feature dimension must be positive".into()));
    }
    if n > 7 {
        return Err(FamilyError::TooLarge(format!("labeled graphs on {n} vertices (limit 7)")));
    }
    let start = LabeledGraph::one_hot(n, d, [], &vec![0; n]).expect("uniform labels");
    Ok(sort_by_size(closure(start, |g| {
        let mut m = additions(g, q);
        m.extend(relabelings(g));
        m
    })))
}

/// One representative per isomorphism class of `spec`.
pub fn enumerate<T: Scalar>(spec: FamilySpec) -> Result<GraphCollection<T>, FamilyError> {
    let (graphs, prefix) = match spec {
        FamilySpec::AllGraphs(n) => (all_graphs(n)?, format!("G{n}")),
        FamilySpec::AllGraphsUpTo(n) => {
            let mut all = Vec::new();
            for k in 1..=n {
                all.extend(all_graphs(k)?);
            }
            (all, format!("G<={n}"))
        }
        FamilySpec::OtterTrees(v) => (otter_trees(v)?, format!("T{v}")),
        FamilySpec::PartitionPaths(n) => return Ok(partition_path_family(n)?.graphs),
        FamilySpec::BoundedDegreeLabeled { n, d, q } => (bounded_degree_labeled(n, d, q)?, format!("G{n},{d},{q}")),
    };
    Ok(GraphCollection::from_graphs(graphs, &prefix))
}

/// Rooted tree over the refinement classes of a family; each child class is one
/// edit away from its parent class.
#[derive(Debug, Clone)]
pub struct CoverTree<T> {
    pub graphs: GraphCollection<T>,
    pub quotient: Quotient,
    pub root: usize,
    /// Parent class of every class (`None` for the root).
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
}

impl<T> CoverTree<T> {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of tree edges between two classes.
    pub fn tree_distance(&self, mut a: usize, mut b: usize) -> usize {
        let mut steps = 0;
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root");
            steps += 1;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root");
            steps += 1;
        }
        while a != b {
            a = self.parent[a].expect("non-root");
            b = self.parent[b].expect("non-root");
            steps += 2;
        }
        steps
    }
}

/// Edit tree over the 1-WL classes (after `rounds`) of `AllGraphs(n)` (rooted at
/// the complete graph, children by edge deletion) or `BoundedDegreeLabeled` (rooted
/// at the uniformly labeled empty graph, children by edge addition or relabeling).
pub fn cover_tree<T: Scalar>(spec: FamilySpec, rounds: Rounds) -> Result<CoverTree<T>, FamilyError> {
    let graphs = enumerate::<T>(spec)?;
    let (root_graph, moves): (LabeledGraph<T>, Box<dyn Fn(&LabeledGraph<T>) -> Vec<LabeledGraph<T>>>) = match spec {
        FamilySpec::AllGraphs(n) => (
            crate::graph::named::complete(n),
            Box::new(|g: &LabeledGraph<T>| {
                g.edges().map(|(u, v)| g.edit(&Edit::DeleteEdge(u, v)).expect("edge")).collect()
            }),
        ),
        FamilySpec::BoundedDegreeLabeled { n, d, q } => (
            LabeledGraph::one_hot(n, d, [], &vec![0; n]).expect("uniform labels"),
            Box::new(move |g: &LabeledGraph<T>| {
                let mut m = additions(g, q);
                m.extend(relabelings(g));
                m
            }),
        ),
        _ => {
            return Err(FamilyError::BadParameter(
                "cover trees are built for AllGraphs and BoundedDegreeLabeled".into(),
            ))
        }
    };
    let index: HashMap<Vec<u64>, usize> = graphs
        .graphs
        .iter()
        .enumerate()
        .map(|(i, g)| (canonical_form(g).0, i))
        .collect();
    let refs: Vec<&LabeledGraph<T>> = graphs.graphs.iter().collect();
    let quotient = quotient_of(&refs, WlMode::Wl, rounds);
    let m = quotient.len();
    let root = quotient.class_of[index[&canonical_form(&root_graph).0]];
    let mut parent = vec![None; m];
    let mut depth = vec![0usize; m];
    let mut seen = vec![false; m];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        for &gi in &quotient.classes[c] {
            for h in moves(&graphs.graphs[gi]) {
                let k = quotient.class_of[index[&canonical_form(&h).0]];
                if !seen[k] {
                    seen[k] = true;
                    parent[k] = Some(c);
                    depth[k] = depth[c] + 1;
                    queue.push_back(k);
                }
            }
        }
    }
    if let Some(c) = seen.iter().position(|&s| !s) {
        return Err(FamilyError::BadParameter(format!("class {c} unreachable from the root")));
    }
    let mut children = vec![Vec::new(); m];
    for (c, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(c);
        }
    }
    Ok(CoverTree {
        graphs,
        quotient,
        root,
        parent,
        children,
        depth,
    })
}

/// Groups the classes of `tree` so that members of a group are at most `2k` tree
/// edges apart: repeatedly take the deepest unassigned class, climb `k` edges and
/// collect every unassigned class below that ancestor.
pub fn merge_cover<T>(tree: &CoverTree<T>, k: usize) -> Vec<Vec<usize>> {
    let m = tree.len();
    let mut assigned = vec![false; m];
    let mut groups = Vec::new();
    loop {
        let next = (0..m).filter(|&c| !assigned[c]).max_by(|&a, &b| tree.depth[a].cmp(&tree.depth[b]).then(b.cmp(&a)));
        let Some(mut anchor) = next else {
            break;
        };
        for _ in 0..k {
            match tree.parent[anchor] {
                Some(p) => anchor = p,
                None => break,
            }
        }
        let mut group = Vec::new();
        let mut stack = vec![anchor];
        while let Some(c) = stack.pop() {
            if !assigned[c] {
                assigned[c] = true;
                group.push(c);
            }
            stack.extend(tree.children[c].iter().copied());
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    type G = LabeledGraph<f64>;

    #[test]
    fn canonical_form_is_invariant() {
        let g = G::one_hot(5, 2, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)], &[0, 1, 0, 1, 1]).unwrap();
        let (k, c) = canonical_form(&g);
        for perm in [[4, 3, 2, 1, 0], [1, 2, 3, 4, 0], [2, 0, 4, 1, 3]] {
            let (k2, c2) = canonical_form(&g.permuted(&perm));
            assert_eq!(k, k2);
            assert_eq!(c, c2);
        }
        assert!(!isomorphic(&cycle::<f64>(6), &cycle(3).disjoint_union(&cycle(3)).unwrap()));
    }

    #[test]
    fn small_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| all_graphs::<f64>(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
        assert!(all_graphs::<f64>(8).is_err());
    }

    #[test]
    fn otter_counts_match_recurrence() {
        for j in 1..=6 {
            let trees = otter_trees::<f64>(2 * j + 1).unwrap();
            assert_eq!(trees.len() as u128, wedderburn_etherington(j));
        }
        let w: Vec<u128> = (1..=10).map(wedderburn_etherington).collect();
        assert_eq!(w, vec![1, 1, 2, 3, 6, 11, 23, 46, 98, 207]);
        assert!(otter_trees::<f64>(4).is_err());
    }

    #[test]
    fn partitions() {
        assert_eq!(integer_partitions(1), vec![vec![1]]);
        assert_eq!(integer_partitions(4), vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(integer_partitions(5).len(), 7);
    }

    #[test]
    fn partition_path_groups() {
        let f = partition_path_family::<f64>(4).unwrap();
        assert_eq!(f.groups.len(), 5);
        assert!(f.groups.iter().all(|g| g.len() == 2));
        for grp in &f.groups {
            let g = &f.graphs.graphs[grp[0]];
            assert_eq!(g.n(), 8);
            assert!(!isomorphic(g, &f.graphs.graphs[grp[1]]));
        }
    }

    #[test]
    fn bounded_degree_family() {
        let gs = bounded_degree_labeled::<f64>(3, 2, 1).unwrap();
        // Degree <= 1 on 3 vertices: empty or one edge; labels up to symmetry.
        // Empty: 4 label multisets. One edge: edge pair labels {00,01,11} x isolated {0,1} = 6.
        assert_eq!(gs.len(), 10);
        assert!(gs.iter().all(|g| g.max_degree() <= 1 && g.is_one_hot()));
    }

    #[test]
    fn cover_tree_for_four_vertices() {
        let t = cover_tree::<f64>(FamilySpec::AllGraphs(4), Rounds::Stable).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.parent[t.root], None);
        for c in 0..t.len() {
            if let Some(p) = t.parent[c] {
                let gc = &t.graphs.graphs[t.quotient.classes[c][0]];
                let gp = &t.graphs.graphs[t.quotient.classes[p][0]];
                assert_eq!(gc.edge_count() + 1, gp.edge_count());
            }
        }
        for k in 1..=3 {
            let groups = merge_cover(&t, k);
            assert!(groups.len() <= t.len().div_ceil(k + 1));
            for g in &groups {
                for &a in g {
                    for &b in g {
                        assert!(t.tree_distance(a, b) <= 2 * k);
                    }
                }
            }
        }
        assert_eq!(merge_cover(&t, 10).len(), 1);
    }
}
