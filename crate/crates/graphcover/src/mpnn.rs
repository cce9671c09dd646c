//! Forward passes of message-passing networks with Lipschitz bookkeeping.
//!
//! Layers map row vectors: `h ↦ ReLU(h W)`. The graph embedding is
//! `h_G = ψ(mean_v h_v)` with `ψ` a bias-free ReLU stack, and a feed-forward head
//! turns `h_G` into a scalar (no activation on its last layer).

use crate::graph::{GraphCollection, LabeledGraph};
use crate::metrics::{ForestEngine, MetricError, Omega};
use crate::scalar::{norm2, Scalar};
use crate::unrolling::ForestMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpnnError {
    #[error("graph feature dimension {got} does not match model input {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("collection is empty")]
    EmptyCollection,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Entries uniform on `[-a, a]` with `a = sqrt(6 / (rows + cols))`.
    pub fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = (6.0 / (rows + cols) as f64).sqrt();
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| T::lit(rng.gen_range(-a..=a))).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `x M` for a row vector `x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != T::zero() {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += xi * w;
                }
            }
        }
        out
    }

    /// `[self; other]`: rows of `other` appended below.
    pub fn stacked(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column counts");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Largest singular value by 50 power iterations on `Mᵀ M`, inflated by 1%.
    pub fn spectral_norm_bound(&self) -> T {
        if self.data.iter().all(|&x| x == T::zero()) {
            return T::zero();
        }
        // Deterministic start with no special alignment.
        let mut v: Vec<T> = (0..self.cols).map(|j| T::one() + T::lit(0.1 * j as f64)).collect();
        let mut sigma = T::zero();
        for _ in 0..50 {
            // u = M v (column vector form), w = Mᵀ u.
            let u: Vec<T> = (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
                .collect();
            let w = self.apply(&u);
            let nw = norm2(&w);
            if nw == T::zero() {
                break;
            }
            sigma = nw.sqrt();
            v = w.iter().map(|&x| x / nw).collect();
        }
        // Rayleigh quotient of the final iterate is a lower estimate; take the larger.
        let u: Vec<T> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect();
        sigma.max(norm2(&u)) * T::lit(1.01)
    }
}

fn relu<T: Scalar>(x: &mut [T]) {
    for v in x.iter_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

/// Neighbour aggregation of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    /// `h_v ← ReLU((1/n) Σ_{u∈N(v)} h_u W2)`.
    OrderNormalizedSum,
    /// `h_v ← ReLU(h_v W1 + Σ_{u∈N(v)} h_u W2)`.
    SumAgg,
    /// `h_v ← ReLU(h_v W1 + (1/|N(v)|) Σ_{u∈N(v)} h_u W2)`; isolated vertices aggregate zero.
    MeanAgg,
}

impl LayerKind {
    pub const ALL: [LayerKind; 3] = [LayerKind::OrderNormalizedSum, LayerKind::SumAgg, LayerKind::MeanAgg];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer<T> {
    pub w1: Matrix<T>,
    pub w2: Matrix<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpnnModel<T> {
    pub kind: LayerKind,
    pub layers: Vec<Layer<T>>,
    /// `ψ`: ReLU after every matrix.
    pub readout: Vec<Matrix<T>>,
    /// Scalar head: ReLU between matrices, none after the last.
    pub head: Vec<Matrix<T>>,
    pub seed: u64,
}

/// Result of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward<T> {
    pub vertices: Vec<Vec<T>>,
    pub graph: Vec<T>,
    pub output: T,
}

/// Lipschitz constants of a model, all upper bounds in the 2-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBudget {
    pub layers: Vec<f64>,
    pub psi: f64,
    pub fnn: f64,
    /// Combinatorial factor `C(L)` for `L` layers.
    pub c_l: f64,
    /// `C(L) · L_ψ · Π L_φ`.
    pub product: f64,
}

/// `C(L) = binom(L, ⌊L/2⌋)`.
pub fn c_of_depth(l: usize) -> f64 {
    let k = l / 2;
    (0..k).fold(1.0, |acc, i| acc * (l - i) as f64 / (i + 1) as f64).round()
}

impl<T: Scalar> MpnnModel<T> {
    /// Random model with layer widths `dims` (`dims[0]` is the input dimension),
    /// readout widths `readout` and head widths `head` (ending in 1).
    pub fn random(kind: LayerKind, dims: &[usize], readout: &[usize], head: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|w| Layer {
                w1: Matrix::glorot(w[0], w[1], &mut rng),
                w2: Matrix::glorot(w[0], w[1], &mut rng),
            })
            .collect();
        let last = *dims.last().expect("at least the input dimension");
        let mut stack = |widths: &[usize]| -> Vec<Matrix<T>> {
            let mut prev = last;
            let mut out = Vec::new();
            for &w in widths {
                out.push(Matrix::glorot(prev, w, &mut rng));
                prev = w;
            }
            out
        };
        let readout_m = stack(readout);
        let head_in = readout.last().copied().unwrap_or(last);
        let mut prev = head_in;
        let mut head_m = Vec::new();
        for &w in head {
            head_m.push(Matrix::glorot(prev, w, &mut rng));
            prev = w;
        }
        Self {
            kind,
            layers,
            readout: readout_m,
            head: head_m,
            seed,
        }
    }

    /// `depth` layers of width `hidden`, a one-layer readout and a two-layer head.
    pub fn standard(kind: LayerKind, input: usize, hidden: usize, depth: usize, seed: u64) -> Self {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(hidden, depth));
        Self::random(kind, &dims, &[hidden], &[hidden, 1], seed)
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or_else(|| self.readout.first().map_or(0, |m| m.rows), |l| l.w1.rows)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn forward(&self, g: &LabeledGraph<T>) -> Result<Forward<T>, MpnnError> {
        if g.d() != self.input_dim() {
            return Err(MpnnError::DimMismatch {
                expected: self.input_dim(),
                got: g.d(),
            });
        }
        let n = g.n();
        let mut h: Vec<Vec<T>> = (0..n).map(|v| g.feature(v).to_vec()).collect();
        for layer in &self.layers {
            let msgs: Vec<Vec<T>> = h.iter().map(|x| layer.w2.apply(x)).collect();
            let next: Vec<Vec<T>> = (0..n)
                .map(|v| {
                    let nb = g.neighbors(v);
                    let mut agg = vec![T::zero(); layer.w2.cols];
                    for &u in nb {
                        for (a, &m) in agg.iter_mut().zip(&msgs[u]) {
                            *a += m;
                        }
                    }
                    let mut out = match self.kind {
                        LayerKind::OrderNormalizedSum => {
                            let s = T::one() / T::lit(n as f64);
                            agg.iter().map(|&a| a * s).collect::<Vec<T>>()
                        }
                        LayerKind::SumAgg => {
                            let own = layer.w1.apply(&h[v]);
                            own.iter().zip(&agg).map(|(&a, &b)| a + b).collect()
                        }
                        LayerKind::MeanAgg => {
                            let own = layer.w1.apply(&h[v]);
                            let s = if nb.is_empty() {
                                T::zero()
                            } else {
                                T::one() / T::lit(nb.len() as f64)
                            };
                            own.iter().zip(&agg).map(|(&a, &b)| a + b * s).collect()
                        }
                    };
                    relu(&mut out);
                    out
                })
                .collect();
            h = next;
        }
        let width = h.first().map_or(self.input_dim(), Vec::len);
        let mut pooled = vec![T::zero(); width];
        for row in &h {
            for (p, &x) in pooled.iter_mut().zip(row) {
                *p += x;
            }
        }
        if n > 0 {
            let s = T::lit(n as f64);
            for p in pooled.iter_mut() {
                *p /= s;
            }
        }
        let mut graph = pooled;
        for m in &self.readout {
            graph = m.apply(&graph);
            relu(&mut graph);
        }
        let mut out = graph.clone();
        for (i, m) in self.head.iter().enumerate() {
            out = m.apply(&out);
            if i + 1 < self.head.len() {
                relu(&mut out);
            }
        }
        Ok(Forward {
            vertices: h,
            graph,
            output: out.first().copied().unwrap_or(T::zero()),
        })
    }

    /// Per-layer, readout and head constants with `C(L)` and their product.
    pub fn lipschitz_bound(&self) -> LipschitzBudget {
        let layers: Vec<f64> = self
            .layers
            .iter()
            .map(|l| {
                let m = match self.kind {
                    LayerKind::OrderNormalizedSum => l.w2.clone(),
                    _ => l.w1.stacked(&l.w2),
                };
                m.spectral_norm_bound().to_f64_lossy()
            })
            .collect();
        let psi: f64 = self.readout.iter().map(|m| m.spectral_norm_bound().to_f64_lossy()).product();
        let fnn: f64 = self.head.iter().map(|m| m.spectral_norm_bound().to_f64_lossy()).product();
        let c_l = c_of_depth(self.layers.len());
        let product = c_l * psi * layers.iter().product::<f64>();
        LipschitzBudget {
            layers,
            psi,
            fnn,
            c_l,
            product,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// Pearson correlation; `None` when either coordinate has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Scatter of (forest distance, output distance) for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub seed: u64,
    pub depth: usize,
    pub pairs: Vec<(usize, usize)>,
    pub points: Vec<(f64, f64)>,
    /// `None` when undefined (no spread in either coordinate).
    pub r: Option<f64>,
}

impl Correlation {
    pub fn degenerate(&self) -> bool {
        self.r.is_none()
    }

    /// `fd,output_distance` per line.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["fd", "output_distance"])?;
        for &(a, b) in &self.points {
            w.write_record([format!("{a:?}"), format!("{b:?}")])?;
        }
        w.flush()
    }
}

/// For each model, samples `pairs` random pairs of the (padded) collection and
/// compares `FD_depth` with the distance between graph embeddings.
pub fn correlate<T: Scalar>(
    models: &[MpnnModel<T>],
    coll: &GraphCollection<T>,
    depth: usize,
    pairs: usize,
    seed: u64,
) -> Result<Vec<Correlation>, MpnnError> {
    if coll.is_empty() {
        return Err(MpnnError::EmptyCollection);
    }
    let padded = coll.padded(None).map_err(|_| MpnnError::EmptyCollection)?;
    let refs: Vec<&LabeledGraph<T>> = padded.graphs.iter().collect();
    let mode = match models.first().map(|m| m.kind) {
        Some(LayerKind::MeanAgg) => ForestMode::Mean,
        _ => ForestMode::Sum,
    };
    let engine = ForestEngine::new(&refs, depth, mode, &Omega::One)?;
    let m = padded.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<(usize, usize)> = (0..pairs)
        .map(|_| {
            let i = rng.gen_range(0..m);
            let j = if m > 1 {
                (i + rng.gen_range(1..m)) % m
            } else {
                i
            };
            (i, j)
        })
        .collect();
    let fds: Vec<f64> = sample.iter().map(|&(i, j)| engine.distance(i, j).to_f64_lossy()).collect();
    models
        .iter()
        .map(|model| {
            let emb: Vec<Vec<T>> = padded
                .graphs
                .par_iter()
                .map(|g| model.forward(g).map(|f| f.graph))
                .collect::<Result<_, _>>()?;
            let out: Vec<f64> = sample
                .iter()
                .map(|&(i, j)| crate::scalar::euclidean(&emb[i], &emb[j]).to_f64_lossy())
                .collect();
            Ok(Correlation {
                seed: model.seed,
                depth,
                pairs: sample.clone(),
                points: fds.iter().copied().zip(out.iter().copied()).collect(),
                r: pearson(&fds, &out),
            })
        })
        .collect()
}
