//! Closed-form generalization bounds from robustness and covering arguments.
//!
//! Every evaluator returns a [`BoundReport`] whose `value` is the exact sum of its
//! empirical, robustness and concentration terms.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use thiserror::Error;

/// Growth constant of Otter trees.
pub const OTTER_B: f64 = 2.4832;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("delta must lie in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("{name} must be a finite number >= {min}, got {value}")]
    BadCount { name: &'static str, value: f64, min: f64 },
    #[error("cells hold {total} samples but the sample has only {sample}")]
    CellOverflow { total: f64, sample: f64 },
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("parameter conflict: {0}")]
    ParamConflict(String),
    #[error("this bound needs a gamma-inverse table")]
    MissingGammaInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: String,
    pub inputs: BTreeMap<String, Value>,
    pub value: f64,
    pub empirical_term: f64,
    pub robustness_term: f64,
    pub concentration_term: f64,
    pub warnings: Vec<String>,
}

impl BoundReport {
    fn new(formula: &str, inputs: Vec<(&str, Value)>, empirical: f64, robustness: f64, concentration: f64) -> Self {
        Self {
            formula: formula.to_string(),
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            value: empirical + robustness + concentration,
            empirical_term: empirical,
            robustness_term: robustness,
            concentration_term: concentration,
            warnings: Vec::new(),
        }
    }

    fn warn(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_delta(delta: f64) -> Result<(), BoundError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(BoundError::BadDelta(delta))
    }
}

fn check(name: &'static str, value: f64, min: f64) -> Result<(), BoundError> {
    if value.is_finite() && value >= min {
        Ok(())
    } else {
        Err(BoundError::BadCount { name, value, min })
    }
}

/// `M · sqrt((c·ln2 + 2·ln(1/δ)) / |S|)`.
fn concentration(ln2_coef: f64, loss_bound: f64, delta: f64, sample: f64) -> f64 {
    loss_bound * ((ln2_coef * LN_2 + 2.0 * (1.0 / delta).ln()) / sample).sqrt()
}

/// `ε + M·sqrt((2K ln2 + 2 ln(1/δ)) / |S|)` for a `(K, ε)`-robust algorithm.
pub fn xu_mannor_bound(k: f64, epsilon: f64, loss_bound: f64, delta: f64, sample: f64) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    check("K", k, 1.0)?;
    check("epsilon", epsilon, 0.0)?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    Ok(BoundReport::new(
        "xu_mannor",
        vec![
            ("K", json!(k)),
            ("epsilon", json!(epsilon)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
        ],
        0.0,
        epsilon,
        concentration(2.0 * k, loss_bound, delta, sample),
    ))
}

/// Per-cell robustness: first term `Σ (|N_i| / |S|) ε_i`.
pub fn extended_bound(
    cells: &[(f64, f64)],
    k: f64,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    check("K", k, 1.0)?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    let mut total = 0.0;
    let mut first = 0.0;
    for &(count, eps) in cells {
        check("cell count", count, 0.0)?;
        check("cell epsilon", eps, 0.0)?;
        total += count;
        first += count / sample * eps;
    }
    if total > sample {
        return Err(BoundError::CellOverflow { total, sample });
    }
    Ok(BoundReport::new(
        "extended",
        vec![
            ("cells", json!(cells)),
            ("K", json!(k)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
        ],
        0.0,
        first,
        concentration(2.0 * k, loss_bound, delta, sample),
    ))
}

/// Data-dependent bound on the expected loss; `occupied` counts cells holding a sample.
pub fn kawaguchi_bound(
    zeta: f64,
    occupied: f64,
    k: f64,
    epsilon: f64,
    delta: f64,
    sample: f64,
    empirical_loss: f64,
) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    check("K", k, 1.0)?;
    check("occupied cells", occupied, 1.0)?;
    if occupied > k {
        return Err(BoundError::BadCount {
            name: "occupied cells (at most K)",
            value: occupied,
            min: 1.0,
        });
    }
    check("zeta", zeta, 0.0)?;
    check("epsilon", epsilon, 0.0)?;
    check("sample size", sample, 1.0)?;
    if !empirical_loss.is_finite() {
        return Err(BoundError::BadCount {
            name: "empirical loss",
            value: empirical_loss,
            min: f64::NEG_INFINITY,
        });
    }
    let lg = (2.0 * k / delta).ln();
    let conc = zeta * ((2f64.sqrt() + 1.0) * (occupied * lg / sample).sqrt() + 2.0 * occupied * lg / sample);
    Ok(BoundReport::new(
        "kawaguchi",
        vec![
            ("zeta", json!(zeta)),
            ("occupied", json!(occupied)),
            ("K", json!(k)),
            ("epsilon", json!(epsilon)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
            ("empirical_loss", json!(empirical_loss)),
        ],
        empirical_loss,
        epsilon,
        conc,
    ))
}

/// `M·sqrt((2m ln2 + 2 ln(1/δ)) / |S|)` with `m` WL classes.
pub fn wl_classification_bound(m: f64, loss_bound: f64, delta: f64, sample: f64) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    check("m", m, 1.0)?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    Ok(BoundReport::new(
        "wl_classification",
        vec![
            ("m", json!(m)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
        ],
        0.0,
        0.0,
        concentration(2.0 * m, loss_bound, delta, sample),
    ))
}

/// `4ε + M·sqrt(((2/ε) m ln2 + 2 ln(1/δ)) / |S|)` for `0 < ε < 1`.
pub fn wl_regression_bound(
    m: f64,
    loss_bound: f64,
    delta: f64,
    sample: f64,
    epsilon: f64,
) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BoundError::BadEpsilon(epsilon));
    }
    check("m", m, 1.0)?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    Ok(BoundReport::new(
        "wl_regression",
        vec![
            ("m", json!(m)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
            ("epsilon", json!(epsilon)),
        ],
        0.0,
        4.0 * epsilon,
        concentration(2.0 / epsilon * m, loss_bound, delta, sample),
    ))
}

/// A bound evaluated over a parameter grid, with the minimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub parameter: String,
    pub points: Vec<(f64, f64)>,
    pub best_parameter: f64,
    pub best: BoundReport,
}

impl Scan {
    /// `parameter,bound` per line.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},bound\n", self.parameter);
        for (p, v) in &self.points {
            s.push_str(&format!("{p:?},{v:?}\n"));
        }
        s
    }
}

/// Evaluates `f` at every grid value; ties keep the first minimiser.
pub fn scan<F>(parameter: &str, grid: &[f64], f: F) -> Result<Scan, BoundError>
where
    F: Fn(f64) -> Result<BoundReport, BoundError>,
{
    let mut points = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, BoundReport)> = None;
    for &p in grid {
        let r = f(p)?;
        points.push((p, r.value));
        if best.as_ref().is_none_or(|(_, b)| r.value < b.value) {
            best = Some((p, r));
        }
    }
    let (best_parameter, best) = best.ok_or_else(|| BoundError::ParamConflict("empty scan grid".into()))?;
    Ok(Scan {
        parameter: parameter.to_string(),
        points,
        best_parameter,
        best,
    })
}

pub fn wl_regression_scan(m: f64, loss_bound: f64, delta: f64, sample: f64, grid: &[f64]) -> Result<Scan, BoundError> {
    scan("epsilon", grid, |e| wl_regression_bound(m, loss_bound, delta, sample, e))
}

/// `b(d, q, L) = 2 q^L (1 − q^L) / (1 − q)`, with the limit `2L` at `q = 1`.
pub fn edit_bound(q: usize, depth: usize) -> f64 {
    let qf = q as f64;
    let ql = qf.powi(depth as i32);
    if q == 1 {
        2.0 * depth as f64
    } else {
        2.0 * ql * (1.0 - ql) / (1.0 - qf)
    }
}

/// Lipschitz data entering `C̃ = (2/n) L_ℓ L_FNN C_FD`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzInputs {
    pub l_loss: f64,
    pub l_fnn: f64,
    pub c_fd: f64,
    pub n: f64,
}

impl LipschitzInputs {
    pub fn c_tilde(&self) -> f64 {
        2.0 / self.n * self.l_loss * self.l_fnn * self.c_fd
    }

    fn validate(&self) -> Result<(), BoundError> {
        check("L_loss", self.l_loss, 0.0)?;
        check("L_FNN", self.l_fnn, 0.0)?;
        check("C_FD", self.c_fd, 0.0)?;
        check("n", self.n, 1.0)
    }
}

/// How the graph space is partitioned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum ForestCover {
    /// Covering number `N` at radius `ε`.
    Covering { epsilon: f64, covering_number: f64 },
    /// Merged WL-class tree: `m` classes, merge depth `k`, edit constant `b`.
    Tree { m: f64, k: f64, b: f64 },
}

impl ForestCover {
    /// Builds the variant from optional fields; exactly one group must be complete.
    pub fn from_options(
        epsilon: Option<f64>,
        covering_number: Option<f64>,
        m: Option<f64>,
        k: Option<f64>,
        b: Option<f64>,
    ) -> Result<Self, BoundError> {
        let cov = epsilon.is_some() || covering_number.is_some();
        let tree = m.is_some() || k.is_some() || b.is_some();
        match (cov, tree) {
            (true, true) => Err(BoundError::ParamConflict(
                "give either (epsilon, covering_number) or (m, k, b), not both".into(),
            )),
            (false, false) => Err(BoundError::ParamConflict("no covering or tree parameters".into())),
            (true, false) => match (epsilon, covering_number) {
                (Some(epsilon), Some(covering_number)) => Ok(Self::Covering { epsilon, covering_number }),
                _ => Err(BoundError::ParamConflict("covering needs epsilon and covering_number".into())),
            },
            (false, true) => match (m, k, b) {
                (Some(m), Some(k), Some(b)) => Ok(Self::Tree { m, k, b }),
                _ => Err(BoundError::ParamConflict("tree variant needs m, k and b".into())),
            },
        }
    }
}

fn forest_bound(
    formula: &str,
    lip: LipschitzInputs,
    cover: ForestCover,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    lip.validate()?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    let c = lip.c_tilde();
    let (first, count) = match cover {
        ForestCover::Covering { epsilon, covering_number } => {
            check("epsilon", epsilon, 0.0)?;
            check("covering number", covering_number, 1.0)?;
            (c * epsilon, covering_number)
        }
        ForestCover::Tree { m, k, b } => {
            check("m", m, 1.0)?;
            check("k", k, 0.0)?;
            check("b", b, 0.0)?;
            (2.0 * c * b * k, m / (k + 1.0))
        }
    };
    Ok(BoundReport::new(
        formula,
        vec![
            ("lipschitz", json!(lip)),
            ("c_tilde", json!(c)),
            ("cover", json!(cover)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
        ],
        0.0,
        first,
        concentration(4.0 * count, loss_bound, delta, sample),
    ))
}

/// Forest-distance robustness bound (sum aggregation).
pub fn fd_bound(
    lip: LipschitzInputs,
    cover: ForestCover,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<BoundReport, BoundError> {
    forest_bound("fd", lip, cover, loss_bound, delta, sample)
}

/// Mean-forest-distance analogue; pass the mean-variant constants.
pub fn mean_fd_bound(
    lip: LipschitzInputs,
    cover: ForestCover,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<BoundReport, BoundError> {
    forest_bound("mean_fd", lip, cover, loss_bound, delta, sample)
}

/// Tree variant evaluated for `k = 0..=k_max`.
pub fn fd_k_scan(
    lip: LipschitzInputs,
    m: f64,
    b: f64,
    k_max: usize,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<Scan, BoundError> {
    let grid: Vec<f64> = (0..=k_max).map(|k| k as f64).collect();
    scan("k", &grid, |k| fd_bound(lip, ForestCover::Tree { m, k, b }, loss_bound, delta, sample))
}

/// Evaluates `f` on a δ grid and, if `target` is given, solves for the δ at which
/// the bound equals it (the bound is decreasing in δ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaScan {
    pub points: Vec<(f64, f64)>,
    pub target: Option<f64>,
    /// δ in (0, 1) reproducing `target` to 1e-9, when one exists.
    pub matching_delta: Option<f64>,
}

pub fn delta_scan<F>(grid: &[f64], target: Option<f64>, f: F) -> Result<DeltaScan, BoundError>
where
    F: Fn(f64) -> Result<BoundReport, BoundError>,
{
    let points = grid.iter().map(|&d| f(d).map(|r| (d, r.value))).collect::<Result<Vec<_>, _>>()?;
    let matching_delta = match target {
        None => None,
        Some(t) => {
            let (mut lo, mut hi) = (1e-300_f64, 1.0 - 1e-15);
            let (vlo, vhi) = (f(lo)?.value, f(hi)?.value);
            if !(vhi <= t && t <= vlo) {
                None
            } else {
                // Bisection in log δ.
                for _ in 0..200 {
                    let mid = (lo.ln() + (hi.ln() - lo.ln()) / 2.0).exp();
                    if f(mid)?.value > t {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let d = (lo * hi).sqrt();
                ((f(d)?.value - t).abs() <= 1e-9).then_some(d)
            }
        }
    };
    Ok(DeltaScan {
        points,
        target,
        matching_delta,
    })
}

/// User-supplied non-decreasing table for `γ̄^←`, linearly interpolated.
///
/// Below the first abscissa the first value is used (an upper bound by
/// monotonicity); above the last one the value is `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaInverse {
    pub points: Vec<(f64, f64)>,
}

impl GammaInverse {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, BoundError> {
        if points.is_empty() {
            return Err(BoundError::MissingGammaInverse);
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[1].1 < w[0].1 || w[1].0 == w[0].0 {
                return Err(BoundError::ParamConflict("gamma-inverse table must be strictly increasing in x and non-decreasing in value".into()));
            }
        }
        if points.iter().any(|p| !p.0.is_finite() || p.1.is_nan() || p.1 < 0.0) {
            return Err(BoundError::ParamConflict("gamma-inverse table has invalid entries".into()));
        }
        Ok(Self { points })
    }

    /// The identically zero function on `[0, ∞)`.
    pub fn zero() -> Self {
        Self {
            points: vec![(0.0, 0.0), (f64::MAX, 0.0)],
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let p = &self.points;
        if y <= p[0].0 {
            return p[0].1;
        }
        let last = p[p.len() - 1];
        if y > last.0 {
            return f64::INFINITY;
        }
        let i = p.partition_point(|q| q.0 < y);
        let (a, b) = (p[i - 1], p[i]);
        a.1 + (b.1 - a.1) * ((y - a.0) / (b.0 - a.0))
    }
}

/// Partition of the graph space used with the tree mover's distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum TreeBoundVariant {
    Covering { epsilon: f64, covering_number: f64 },
    TreeConstruction { k: f64, m_n: f64 },
    /// Full binary trees on `2n+1` vertices, `w_n` of them.
    Otter { k: f64, w_n: f64 },
    /// `per_order[i-1]` samples of order `i`; `m_le_n` WL classes of order at most `n`.
    UpToN { k: f64, m_le_n: f64, per_order: Vec<f64> },
}

#[allow(clippy::too_many_arguments)]
pub fn tree_distance_bound(
    gamma: Option<&GammaInverse>,
    variant: &TreeBoundVariant,
    n: f64,
    l_loss: f64,
    l_fnn: f64,
    loss_bound: f64,
    delta: f64,
    sample: f64,
) -> Result<BoundReport, BoundError> {
    let gamma = gamma.ok_or(BoundError::MissingGammaInverse)?;
    check_delta(delta)?;
    check("n", n, 1.0)?;
    check("L_loss", l_loss, 0.0)?;
    check("L_FNN", l_fnn, 0.0)?;
    check("M", loss_bound, 0.0)?;
    check("sample size", sample, 1.0)?;
    let lip = l_loss * l_fnn;
    let (formula, first, count) = match variant {
        TreeBoundVariant::Covering { epsilon, covering_number } => {
            check("epsilon", *epsilon, 0.0)?;
            check("covering number", *covering_number, 1.0)?;
            ("tree_distance_covering", lip * gamma.eval(2.0 * epsilon / (n * n)), *covering_number)
        }
        TreeBoundVariant::TreeConstruction { k, m_n } => {
            check("k", *k, 0.0)?;
            check("m_n", *m_n, 1.0)?;
            ("tree_distance_construction", lip * gamma.eval(8.0 * k / (n * n)), m_n / (k + 1.0))
        }
        TreeBoundVariant::Otter { k, w_n } => {
            check("k", *k, 0.0)?;
            check("w_n", *w_n, 1.0)?;
            let side = 2.0 * n + 1.0;
            (
                "tree_distance_otter",
                lip * gamma.eval(16.0 * k / (side * side)),
                w_n / OTTER_B.powf(2.0 * k),
            )
        }
        TreeBoundVariant::UpToN { k, m_le_n, per_order } => {
            check("k", *k, 0.0)?;
            check("m_le_n", *m_le_n, 1.0)?;
            let mut total = 0.0;
            let mut first = 0.0;
            for (idx, &c) in per_order.iter().enumerate() {
                check("per-order count", c, 0.0)?;
                let i = (idx + 1) as f64;
                total += c;
                if c > 0.0 {
                    first += c / sample * gamma.eval(8.0 * k / (i * i));
                }
            }
            if total > sample {
                return Err(BoundError::CellOverflow { total, sample });
            }
            ("tree_distance_up_to_n", lip * first, m_le_n / (k + 1.0))
        }
    };
    let mut r = BoundReport::new(
        formula,
        vec![
            ("variant", json!(variant)),
            ("n", json!(n)),
            ("L_loss", json!(l_loss)),
            ("L_FNN", json!(l_fnn)),
            ("M", json!(loss_bound)),
            ("delta", json!(delta)),
            ("sample_size", json!(sample)),
            ("gamma_inverse", json!(gamma.points)),
        ],
        0.0,
        first,
        concentration(4.0 * count, loss_bound, delta, sample),
    );
    r = r.warn("gamma-inverse is a user-supplied table, not derived");
    if first.is_infinite() {
        r = r.warn("gamma-inverse argument beyond the table; robustness term is infinite");
    }
    Ok(r)
}

/// `sqrt(2d log(eN/d) / N) + sqrt(log(1/δ) / (2N))` over the empirical loss.
///
/// When `log(eN/d) <= 0` the capacity term is reported as 0 and a warning is set.
pub fn vc_bound(d_vc: f64, delta: f64, sample: f64) -> Result<BoundReport, BoundError> {
    check_delta(delta)?;
    check("VC dimension", d_vc, 1.0)?;
    check("sample size", sample, 1.0)?;
    let lg = (std::f64::consts::E * sample / d_vc).ln();
    let capacity = (2.0 * d_vc * lg / sample).max(0.0).sqrt();
    let conc = ((1.0 / delta).ln() / (2.0 * sample)).sqrt();
    let r = BoundReport::new(
        "vc",
        vec![("d_vc", json!(d_vc)), ("delta", json!(delta)), ("sample_size", json!(sample))],
        0.0,
        capacity,
        conc,
    );
    Ok(if lg <= 0.0 {
        r.warn("log(eN/d) is not positive; capacity term is meaningless and reported as 0")
    } else {
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MUTAG: LipschitzInputs = LipschitzInputs {
        l_loss: 1.0,
        l_fnn: 1.0,
        c_fd: 0.377,
        n: 28.0,
    };

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn xu_mannor_arithmetic() {
        let e1 = (-1.0f64).exp();
        let r = xu_mannor_bound(1.0, 0.0, 1.0, e1, 2.0 * LN_2 + 2.0).unwrap();
        assert!(close(r.value, 1.0));
        let a = xu_mannor_bound(5.0, 0.0, 2.0, 0.1, 100.0).unwrap();
        let b = xu_mannor_bound(5.0, 0.0, 2.0, 0.1, 200.0).unwrap();
        assert!(close(a.concentration_term / b.concentration_term, 2f64.sqrt()));
        let m = xu_mannor_bound(278.0, 0.0, 5.890, 0.1, 150.0).unwrap();
        let expect = 5.890 * ((556.0 * LN_2 + 2.0 * 10f64.ln()) / 150.0).sqrt();
        assert!(close(m.value, expect));
        assert!(matches!(xu_mannor_bound(1.0, 0.0, 1.0, 1.0, 1.0), Err(BoundError::BadDelta(_))));
        assert!(matches!(xu_mannor_bound(0.0, 0.0, 1.0, 0.5, 1.0), Err(BoundError::BadCount { .. })));
    }

    #[test]
    fn extended_reductions() {
        let r = extended_bound(&[(100.0, 0.1), (50.0, 0.3)], 4.0, 1.0, 0.1, 150.0).unwrap();
        assert!(close(r.robustness_term, (100.0 * 0.1 + 50.0 * 0.3) / 150.0));
        let c = extended_bound(&[(100.0, 0.2), (50.0, 0.2)], 4.0, 1.0, 0.1, 150.0).unwrap();
        let x = xu_mannor_bound(4.0, 0.2, 1.0, 0.1, 150.0).unwrap();
        assert!((c.value - x.value).abs() <= 1e-12);
        let single = extended_bound(&[(150.0, 0.0)], 4.0, 1.0, 0.1, 150.0).unwrap();
        assert_eq!(single.value, single.concentration_term);
        assert!(matches!(
            extended_bound(&[(100.0, 0.1), (51.0, 0.1)], 4.0, 1.0, 0.1, 150.0),
            Err(BoundError::CellOverflow { .. })
        ));
    }

    #[test]
    fn kawaguchi_cases() {
        assert!(kawaguchi_bound(1.0, 0.0, 16.0, 0.0, 0.1, 400.0, 0.0).is_err());
        assert!(kawaguchi_bound(1.0, 17.0, 16.0, 0.0, 0.1, 400.0, 0.0).is_err());
        let z = kawaguchi_bound(0.0, 4.0, 16.0, 0.05, 0.1, 400.0, 0.3).unwrap();
        assert!(close(z.value, 0.35));
        let r = kawaguchi_bound(1.0, 4.0, 16.0, 0.0, 0.1, 400.0, 0.0).unwrap();
        let lg = 320f64.ln();
        let expect = (2f64.sqrt() + 1.0) * (4.0 * lg / 400.0).sqrt() + 8.0 * lg / 400.0;
        assert!(close(r.value, expect));
    }

    #[test]
    fn wl_bounds() {
        let r = wl_classification_bound(1.0, 1.0, 0.5, 50.0).unwrap();
        assert!(close(r.value, ((2.0 * LN_2 + 2.0 * LN_2) / 50.0).sqrt()));
        let r = wl_classification_bound(11.0, 1.0, 0.1, 100.0).unwrap();
        assert!(close(r.value, ((22.0 * LN_2 + 2.0 * 10f64.ln()) / 100.0).sqrt()));
        assert!(matches!(wl_regression_bound(3.0, 1.0, 0.1, 100.0, 1.0), Err(BoundError::BadEpsilon(_))));
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let s = wl_regression_scan(11.0, 1.0, 0.1, 1000.0, &grid).unwrap();
        assert!(s.points.iter().all(|&(_, v)| v >= s.best.value));
        assert_eq!(s.points.len(), grid.len());
        assert!(s.best_parameter > 0.01 && s.best_parameter < 0.99);
    }

    #[test]
    fn forest_bounds() {
        let eps0 = fd_bound(
            MUTAG,
            ForestCover::Covering {
                epsilon: 0.0,
                covering_number: 139.0,
            },
            5.890,
            0.1,
            150.0,
        )
        .unwrap();
        let pure = 5.890 * ((4.0 * 139.0 * LN_2 + 2.0 * 10f64.ln()) / 150.0).sqrt();
        assert!(close(eps0.value, pure) && eps0.value.is_finite());
        let tree = fd_bound(MUTAG, ForestCover::Tree { m: 12.0, k: 2.0, b: 4.0 }, 1.0, 0.1, 150.0).unwrap();
        let cov = fd_bound(
            MUTAG,
            ForestCover::Covering {
                epsilon: 8.0,
                covering_number: 4.0,
            },
            1.0,
            0.1,
            150.0,
        )
        .unwrap();
        assert!(close(tree.concentration_term, cov.concentration_term));
        assert!(close(tree.robustness_term, 2.0 * cov.robustness_term));
        let s = fd_k_scan(MUTAG, 139.0, 4.0, 10, 5.890, 0.1, 150.0).unwrap();
        assert_eq!(s.points.len(), 11);
        assert!(s.points.iter().all(|&(_, v)| v >= s.best.value));
        let m = mean_fd_bound(MUTAG, ForestCover::Tree { m: 12.0, k: 2.0, b: 4.0 }, 1.0, 0.1, 150.0).unwrap();
        assert_eq!(m.value, tree.value);
        assert_eq!(m.formula, "mean_fd");
        assert!(matches!(
            ForestCover::from_options(Some(0.0), Some(3.0), Some(3.0), None, None),
            Err(BoundError::ParamConflict(_))
        ));
        assert!(ForestCover::from_options(None, None, Some(3.0), Some(1.0), Some(4.0)).is_ok());
        assert!(ForestCover::from_options(Some(1.0), None, None, None, None).is_err());
    }

    #[test]
    fn delta_scan_finds_matches() {
        let f = |d| {
            fd_bound(
                MUTAG,
                ForestCover::Covering {
                    epsilon: 0.0,
                    covering_number: 139.0,
                },
                5.890,
                d,
                150.0,
            )
        };
        let target = f(0.05).unwrap().value;
        let s = delta_scan(&[0.01, 0.05, 0.1], Some(target), f).unwrap();
        assert!((s.matching_delta.unwrap() - 0.05).abs() < 1e-6);
        let s = delta_scan(&[0.1], Some(0.001), f).unwrap();
        assert_eq!(s.matching_delta, None);
    }

    #[test]
    fn tree_distance_variants() {
        let zero = GammaInverse::zero();
        let v = TreeBoundVariant::TreeConstruction { k: 1.0, m_n: 11.0 };
        let r = tree_distance_bound(Some(&zero), &v, 4.0, 1.0, 1.0, 1.0, 0.1, 100.0).unwrap();
        assert_eq!(r.robustness_term, 0.0);
        assert!(close(r.concentration_term, ((4.0 * 5.5 * LN_2 + 2.0 * 10f64.ln()) / 100.0).sqrt()));
        let o = TreeBoundVariant::Otter { k: 1.0, w_n: 207.0 };
        let r = tree_distance_bound(Some(&zero), &o, 10.0, 1.0, 1.0, 1.0, 0.1, 100.0).unwrap();
        let count = 207.0 / (OTTER_B * OTTER_B);
        assert!((OTTER_B * OTTER_B - 6.1663).abs() < 1e-4);
        assert!(close(r.concentration_term, ((4.0 * count * LN_2 + 2.0 * 10f64.ln()) / 100.0).sqrt()));
        assert!(matches!(
            tree_distance_bound(None, &v, 4.0, 1.0, 1.0, 1.0, 0.1, 100.0),
            Err(BoundError::MissingGammaInverse)
        ));
        let g = GammaInverse::new(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert_eq!(g.eval(0.25), 0.5);
        assert_eq!(g.eval(2.0), f64::INFINITY);
        assert!(GammaInverse::new(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
        let u = TreeBoundVariant::UpToN {
            k: 1.0,
            m_le_n: 18.0,
            per_order: vec![0.0, 0.0, 50.0, 50.0],
        };
        let r = tree_distance_bound(Some(&g), &u, 4.0, 1.0, 1.0, 1.0, 0.1, 100.0).unwrap();
        // 8/9 lies beyond nothing: interpolated at 8/9 and 8/16.
        assert!(close(r.robustness_term, 0.5 * 2.0 * (8.0 / 9.0) + 0.5 * 2.0 * 0.5));
        let c = TreeBoundVariant::Covering {
            epsilon: 4.0,
            covering_number: 3.0,
        };
        let r = tree_distance_bound(Some(&g), &c, 4.0, 2.0, 1.0, 1.0, 0.1, 100.0).unwrap();
        assert!(close(r.robustness_term, 2.0 * 1.0));
    }

    #[test]
    fn vc_cases() {
        let r = vc_bound(1.0, 0.5, 100.0).unwrap();
        let expect = (2.0 * (std::f64::consts::E * 100.0).ln() / 100.0).sqrt() + (2f64.ln() / 200.0).sqrt();
        assert!(close(r.value, expect) && r.warnings.is_empty());
        let n = 100.0;
        let r = vc_bound(n / std::f64::consts::E, 0.5, n).unwrap();
        assert!(close(r.robustness_term, (2.0 * (n / std::f64::consts::E) * 2.0 / n).sqrt()));
        let r = vc_bound(400.0, 0.5, 100.0).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn edit_constant() {
        assert_eq!(edit_bound(2, 1), 4.0);
        assert_eq!(edit_bound(2, 2), 24.0);
        assert_eq!(edit_bound(3, 1), 6.0);
        assert_eq!(edit_bound(1, 3), 6.0);
    }

    fn non_increasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1] <= w[0] + 1e-15)
    }

    fn non_decreasing(v: &[f64]) -> bool {
        v.windows(2).all(|w| w[1] >= w[0] - 1e-15)
    }

    #[test]
    fn monotonicity_scans() {
        let counts: Vec<f64> = (1..60).map(|i| i as f64).collect();
        let samples: Vec<f64> = (1..60).map(|i| 10.0 * i as f64).collect();
        let deltas: Vec<f64> = (1..60).map(|i| i as f64 / 60.0).collect();
        type Eval = Box<dyn Fn(f64, f64, f64) -> f64>;
        let g = GammaInverse::new(vec![(0.0, 0.0), (10.0, 1.0)]).unwrap();
        let evals: Vec<(&str, Eval)> = vec![
            ("xu", Box::new(|c, s, d| xu_mannor_bound(c, 0.1, 2.0, d, s).unwrap().value)),
            ("ext", Box::new(|c, s, d| extended_bound(&[(1.0, 0.3)], c, 2.0, d, s).unwrap().value)),
            ("kaw", Box::new(|c, s, d| kawaguchi_bound(1.0, 1.0, c, 0.1, d, s, 0.2).unwrap().value)),
            ("wlc", Box::new(|c, s, d| wl_classification_bound(c, 1.0, d, s).unwrap().value)),
            ("wlr", Box::new(|c, s, d| wl_regression_bound(c, 1.0, d, s, 0.3).unwrap().value)),
            (
                "fd",
                Box::new(|c, s, d| {
                    fd_bound(
                        MUTAG,
                        ForestCover::Covering {
                            epsilon: 0.5,
                            covering_number: c,
                        },
                        1.0,
                        d,
                        s,
                    )
                    .unwrap()
                    .value
                }),
            ),
            (
                "tree",
                Box::new(move |c, s, d| {
                    tree_distance_bound(
                        Some(&g),
                        &TreeBoundVariant::TreeConstruction { k: 1.0, m_n: c },
                        4.0,
                        1.0,
                        1.0,
                        1.0,
                        d,
                        s,
                    )
                    .unwrap()
                    .value
                }),
            ),
            ("vc", Box::new(|c, s, d| vc_bound(c, d, s.max(c)).unwrap().value)),
        ];
        for (name, f) in &evals {
            if *name != "vc" {
                let v: Vec<f64> = counts.iter().map(|&c| f(c, 1000.0, 0.1)).collect();
                assert!(non_decreasing(&v), "{name} in count");
                let v: Vec<f64> = samples.iter().map(|&s| f(1.0, s, 0.1)).collect();
                assert!(non_increasing(&v), "{name} in sample size");
            } else {
                let v: Vec<f64> = samples.iter().map(|&s| f(1.0, s, 0.1)).collect();
                assert!(non_increasing(&v), "vc in sample size");
            }
            let v: Vec<f64> = deltas.iter().map(|&d| f(1.0, 1000.0, d)).collect();
            assert!(non_increasing(&v), "{name} in delta");
        }
        // Report terms sum to the total.
        let r = fd_bound(MUTAG, ForestCover::Tree { m: 139.0, k: 3.0, b: 24.0 }, 5.89, 0.1, 150.0).unwrap();
        assert_eq!(r.value, r.empirical_term + r.robustness_term + r.concentration_term);
    }
}
