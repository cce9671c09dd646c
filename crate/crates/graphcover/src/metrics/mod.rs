//! Graph pseudo-metrics and pairwise distance matrices.

mod delta;
mod forest;
mod tmd;

pub use delta::{delta_ds_1, delta_perm_1, PERM_EXACT_LIMIT};
pub use forest::{forest_distance, mean_forest_distance, ForestEngine, DEFAULT_LEVEL_CAP};
pub use tmd::tmd;

use crate::graph::{GraphCollection, LabeledGraph};
use crate::scalar::Scalar;
use crate::solvers::SolverError;
use crate::unrolling::{ForestMode, UnrollError};
use crate::wl::{stable_depth, wl1_joint_indistinguishable, Rounds, WlMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("graphs have different orders ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("graphs have different feature dimensions ({left} vs {right})")]
    DimMismatch { left: usize, right: usize },
    #[error("forest distances need order at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("exact permutation search is limited to order {PERM_EXACT_LIMIT}, got {0}")]
    TooLargeForExact(usize),
    #[error("level {level} of the subtree DAG exceeds {cap} nodes")]
    TooLarge { level: usize, cap: usize },
    #[error("mean-forest scale factor overflows u64")]
    ScaleOverflow,
    #[error("level weights must be finite and positive")]
    BadOmega,
    #[error("metric needs a finite depth")]
    NeedsFiniteDepth,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error("pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        source: Box<MetricError>,
    },
}

/// Level weights `ω`; the last listed weight repeats for deeper levels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub enum Omega {
    #[default]
    One,
    Levels(Vec<f64>),
}

impl Omega {
    pub fn at(&self, level: usize) -> f64 {
        match self {
            Omega::One => 1.0,
            Omega::Levels(w) if w.is_empty() => 1.0,
            Omega::Levels(w) => w[level.min(w.len() - 1)],
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match self {
            Omega::Levels(w) if w.iter().any(|&x| !(x.is_finite() && x > 0.0)) => Err(MetricError::BadOmega),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Fd,
    Tmd,
    MeanFd,
    DeltaPerm1,
    DeltaDs1,
    WlTrivial,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::Fd,
        MetricKind::Tmd,
        MetricKind::MeanFd,
        MetricKind::DeltaPerm1,
        MetricKind::DeltaDs1,
        MetricKind::WlTrivial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Fd => "fd",
            MetricKind::Tmd => "tmd",
            MetricKind::MeanFd => "mean-fd",
            MetricKind::DeltaPerm1 => "delta-perm1",
            MetricKind::DeltaDs1 => "delta-ds1",
            MetricKind::WlTrivial => "wl-trivial",
        }
    }

    /// Whether the metric depends on a depth or iteration count.
    pub fn uses_depth(self) -> bool {
        !matches!(self, MetricKind::DeltaPerm1 | MetricKind::DeltaDs1)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        if lower == "wl" {
            return Ok(Self::WlTrivial);
        }
        Self::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
                format!("unknown metric `{s}`; expected one of {}", names.join(", "))
            })
    }
}

/// Which pseudo-metric to evaluate, with its depth and level weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Depth `L` (forest metrics) or WL iterations; `Stable` resolves to the joint
    /// stabilisation round of the graphs being compared.
    pub depth: Rounds,
    pub omega: Omega,
}

impl MetricSpec {
    pub fn new(kind: MetricKind, depth: usize) -> Self {
        Self {
            kind,
            depth: Rounds::Iter(depth),
            omega: Omega::One,
        }
    }
}

fn resolve_depth<T: Scalar>(spec: &MetricSpec, graphs: &[&LabeledGraph<T>]) -> usize {
    match spec.depth {
        Rounds::Iter(l) => l,
        Rounds::Stable => {
            let mode = if spec.kind == MetricKind::MeanFd { WlMode::Mwl } else { WlMode::Wl };
            stable_depth(graphs, mode)
        }
    }
}

/// 0 when 1-WL cannot separate `g` and `h` within `rounds`, else 1.
pub fn wl_trivial_metric<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, rounds: Rounds) -> T {
    if wl1_joint_indistinguishable(g, h, rounds) {
        T::zero()
    } else {
        T::one()
    }
}

/// Distance between two graphs under `spec`.
pub fn distance<T: Scalar>(g: &LabeledGraph<T>, h: &LabeledGraph<T>, spec: &MetricSpec) -> Result<T, MetricError> {
    let depth = || resolve_depth(spec, &[g, h]);
    match spec.kind {
        MetricKind::Fd => forest_distance(g, h, depth(), &spec.omega),
        MetricKind::Tmd => tmd(g, h, depth(), &spec.omega),
        MetricKind::MeanFd => mean_forest_distance(g, h, depth()),
        MetricKind::DeltaPerm1 => delta_perm_1(g, h),
        MetricKind::DeltaDs1 => delta_ds_1(g, h),
        MetricKind::WlTrivial => {
            if g.n() != h.n() {
                return Err(MetricError::OrderMismatch {
                    left: g.n(),
                    right: h.n(),
                });
            }
            Ok(wl_trivial_metric(g, h, spec.depth))
        }
    }
}

/// Symmetric matrix of pairwise distances over a collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix<T> {
    pub spec: MetricSpec,
    /// Depth actually used once `Stable` is resolved.
    pub resolved_depth: Option<usize>,
    pub sources: Vec<String>,
    /// Row-major `len × len` values.
    pub values: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// Largest `d(i,k) − d(i,j) − d(j,k)` over all triples (zero if none is violated).
    pub fn max_triangle_violation(&self) -> T {
        let n = self.len();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.get(i, k) - self.get(i, j) - self.get(j, k));
                }
            }
        }
        worst
    }

    /// One line per graph, comma-separated, full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for i in 0..self.len() {
            w.write_record(self.row(i).iter().map(|x| format!("{x:?}")))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distance matrix serializes")
    }
}

/// All pairwise distances of `coll` under `spec`; the collection must share one order.
pub fn distance_matrix<T: Scalar>(coll: &GraphCollection<T>, spec: &MetricSpec) -> Result<DistanceMatrix<T>, MetricError> {
    spec.omega.validate()?;
    let graphs: Vec<&LabeledGraph<T>> = coll.graphs.iter().collect();
    let m = graphs.len();
    if let Some(first) = graphs.first() {
        for g in &graphs {
            if g.n() != first.n() {
                return Err(MetricError::OrderMismatch {
                    left: first.n(),
                    right: g.n(),
                });
            }
            if g.d() != first.d() {
                return Err(MetricError::DimMismatch {
                    left: first.d(),
                    right: g.d(),
                });
            }
        }
    }
    let resolved = spec.kind.uses_depth().then(|| resolve_depth(spec, &graphs));
    let fixed = MetricSpec {
        depth: resolved.map_or(spec.depth, Rounds::Iter),
        ..spec.clone()
    };
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let values: Vec<T> = match spec.kind {
        MetricKind::Fd | MetricKind::MeanFd => {
            if let Some(g) = graphs.iter().find(|g| g.n() < 2) {
                return Err(MetricError::OrderTooSmall(g.n()));
            }
            let mode = if spec.kind == MetricKind::Fd { ForestMode::Sum } else { ForestMode::Mean };
            let omega = if spec.kind == MetricKind::Fd { spec.omega.clone() } else { Omega::One };
            let engine = ForestEngine::new(&graphs, resolved.unwrap_or(0), mode, &omega)?;
            pairs.par_iter().map(|&(i, j)| engine.distance(i, j)).collect()
        }
        _ => pairs
            .par_iter()
            .map(|&(i, j)| {
                distance(graphs[i], graphs[j], &fixed).map_err(|e| MetricError::Pair {
                    i,
                    j,
                    source: Box::new(e),
                })
            })
            .collect::<Result<_, _>>()?,
    };
    let mut full = vec![T::zero(); m * m];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        full[i * m + j] = v;
        full[j * m + i] = v;
    }
    Ok(DistanceMatrix {
        spec: spec.clone(),
        resolved_depth: resolved,
        sources: coll.sources.clone(),
        values: full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn trio() -> GraphCollection<f64> {
        let c6 = cycle::<f64>(6);
        let two_c3 = cycle::<f64>(3).disjoint_union(&cycle(3)).unwrap();
        GraphCollection::from_graphs(vec![c6, two_c3, path(6)], "t")
    }

    #[test]
    fn zero_block_for_wl_equivalent_graphs() {
        for kind in [MetricKind::Fd, MetricKind::MeanFd, MetricKind::Tmd, MetricKind::DeltaDs1, MetricKind::WlTrivial] {
            let dm = distance_matrix(&trio(), &MetricSpec::new(kind, 2)).unwrap();
            assert!(dm.get(0, 1).abs() < 1e-7, "{kind}");
            // Mean aggregation sees only uniform neighbour frequencies on unlabeled graphs.
            if kind != MetricKind::MeanFd {
                assert!(dm.get(0, 2) > 0.0 && dm.get(1, 2) > 0.0, "{kind}");
            }
            assert_eq!(dm.get(2, 2), 0.0);
        }
    }

    #[test]
    fn identical_graphs_give_zero_matrix() {
        let coll = GraphCollection::from_graphs(vec![star::<f64>(3); 4], "s");
        let dm = distance_matrix(&coll, &MetricSpec::new(MetricKind::Fd, 3)).unwrap();
        assert!(dm.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn wl_trivial_values() {
        let g = complete::<f64>(3).disjoint_union(&empty(1)).unwrap();
        assert_eq!(wl_trivial_metric(&g, &star(3), Rounds::Iter(1)), 1.0);
        assert_eq!(wl_trivial_metric(&g, &g, Rounds::Iter(1)), 0.0);
        let t = trio();
        assert_eq!(wl_trivial_metric(&t.graphs[0], &t.graphs[1], Rounds::Stable), 0.0);
    }

    #[test]
    fn stable_depth_resolution_and_output() {
        let spec = MetricSpec {
            kind: MetricKind::Fd,
            depth: Rounds::Stable,
            omega: Omega::One,
        };
        let dm = distance_matrix(&trio(), &spec).unwrap();
        assert!(dm.resolved_depth.is_some());
        let mut buf = Vec::new();
        dm.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back: DistanceMatrix<f64> = serde_json::from_str(&dm.to_json()).unwrap();
        assert_eq!(back, dm);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in MetricKind::ALL {
            assert_eq!(k.name().parse::<MetricKind>().unwrap(), k);
        }
        assert!("cut".parse::<MetricKind>().is_err());
    }

    #[test]
    fn mismatched_collection_is_rejected() {
        let coll = GraphCollection::from_graphs(vec![path::<f64>(3), path(4)], "p");
        assert!(distance_matrix(&coll, &MetricSpec::new(MetricKind::Fd, 1)).is_err());
    }
}
