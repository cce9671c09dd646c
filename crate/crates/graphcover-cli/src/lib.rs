//! Experiment commands behind the `graphcover` binary.
//!
//! Each command writes its artefacts into an output directory and returns the
//! same data in memory, so tests can drive the commands without spawning a process.

use graphcover::bounds::{self, BoundError, BoundReport, DeltaScan, ForestCover, GammaInverse, LipschitzInputs, Scan, TreeBoundVariant};
use graphcover::covering::{self, CoverError};
use graphcover::families::{self, FamilyError, FamilySpec};
use graphcover::graph::GraphCollection;
use graphcover::metrics::{distance_matrix, MetricError, MetricKind, MetricSpec, Omega};
use graphcover::mpnn::{self, LayerKind, MpnnError, MpnnModel};
use graphcover::tu::{self, IngestError};
use graphcover::wl::{quotient_classes, Rounds, WlMode};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::TooLarge(_) => CliError::Resource(e.to_string()),
            FamilyError::BadParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        let msg = e.to_string();
        match root_metric_error(&e) {
            MetricError::TooLarge { .. } | MetricError::TooLargeForExact { .. } | MetricError::ScaleOverflow => {
                CliError::Resource(msg)
            }
            MetricError::BadOmega | MetricError::NeedsFiniteDepth => CliError::Config(msg),
            _ => CliError::Data(msg),
        }
    }
}

fn root_metric_error(e: &MetricError) -> &MetricError {
    match e {
        MetricError::Pair { source, .. } => root_metric_error(source),
        other => other,
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::TooLarge { .. } => CliError::Resource(e.to_string()),
            CoverError::EmptyGroup(_) => CliError::Data(e.to_string()),
        }
    }
}

impl From<MpnnError> for CliError {
    fn from(e: MpnnError) -> Self {
        match e {
            MpnnError::Metric(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Options shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub delta: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
            seed: 0,
            delta: 0.1,
        }
    }
}

/// Parses `all:N`, `all-upto:N`, `otter:V`, `partition-paths:N` or `bounded:N,D,Q`.
pub fn parse_family(s: &str) -> Result<FamilySpec, CliError> {
    let (kind, args) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("family `{s}` must look like kind:args")))?;
    let nums: Vec<usize> = args
        .split(',')
        .map(|a| a.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("family `{s}`: arguments must be non-negative integers")))?;
    let one = || -> Result<usize, CliError> {
        match nums.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::Config(format!("family `{s}` takes one argument"))),
        }
    };
    match kind {
        "all" => Ok(FamilySpec::AllGraphs(one()?)),
        "all-upto" => Ok(FamilySpec::AllGraphsUpTo(one()?)),
        "otter" => Ok(FamilySpec::OtterTrees(one()?)),
        "partition-paths" => Ok(FamilySpec::PartitionPaths(one()?)),
        "bounded" => match nums.as_slice() {
            [n, d, q] => Ok(FamilySpec::BoundedDegreeLabeled { n: *n, d: *d, q: *q }),
            _ => Err(CliError::Config(format!("family `{s}` takes n,d,q"))),
        },
        _ => Err(CliError::Config(format!(
            "unknown family `{kind}`; expected all, all-upto, otter, partition-paths or bounded"
        ))),
    }
}

/// `L` as an integer or `stable`.
pub fn parse_depth(s: &str) -> Result<Rounds, CliError> {
    if s.eq_ignore_ascii_case("stable") {
        return Ok(Rounds::Stable);
    }
    s.parse::<usize>()
        .map(Rounds::Iter)
        .map_err(|_| CliError::Config(format!("depth `{s}` must be an integer or `stable`")))
}

/// Comma-separated non-negative radii, returned ascending.
pub fn parse_radii(s: &str) -> Result<Vec<f64>, CliError> {
    let mut r: Vec<f64> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("radii `{s}` must be comma-separated numbers")))?;
    if r.is_empty() {
        return Err(CliError::Config("radius list is empty".into()));
    }
    if r.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(CliError::Config("radii must be finite and non-negative".into()));
    }
    r.sort_by(f64::total_cmp);
    Ok(r)
}

pub fn parse_metric(s: &str) -> Result<MetricKind, CliError> {
    MetricKind::from_str(s).map_err(CliError::Config)
}

/// Where the graphs of a run come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// TU-format directory; the dataset name is the directory name.
    Dataset(PathBuf),
    Family(FamilySpec),
}

impl Source {
    pub fn load(&self) -> Result<GraphCollection<f64>, CliError> {
        match self {
            Source::Dataset(dir) => {
                let name = dataset_name(dir)?;
                Ok(tu::ingest_tu_dataset(dir, &name)?)
            }
            Source::Family(spec) => Ok(families::enumerate(*spec)?),
        }
    }
}

fn dataset_name(dir: &Path) -> Result<String, CliError> {
    dir.file_name()
        .and_then(|n| n.to_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::Config(format!("cannot infer dataset name from {}", dir.display())))
}

/// Summary written by `enumerate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub family: String,
    pub count: usize,
    /// Number of 1-WL classes at the stable colouring.
    pub m: usize,
    /// `w_j` for full binary trees on `2j+1` vertices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_j: Option<u128>,
    /// `|P(n)|` for the partition-path family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<usize>,
}

fn family_label(spec: &FamilySpec) -> String {
    match spec {
        FamilySpec::AllGraphs(n) => format!("all:{n}"),
        FamilySpec::AllGraphsUpTo(n) => format!("all-upto:{n}"),
        FamilySpec::OtterTrees(v) => format!("otter:{v}"),
        FamilySpec::PartitionPaths(n) => format!("partition-paths:{n}"),
        FamilySpec::BoundedDegreeLabeled { n, d, q } => format!("bounded:{n},{d},{q}"),
    }
}

fn tu_name(spec: &FamilySpec) -> String {
    family_label(spec).replace([':', ','], "_").replace('-', "_").to_uppercase()
}

/// Enumerates a family into `out/<NAME>/` (TU format) and writes `out/census.json`.
pub fn cmd_enumerate(spec: FamilySpec, cfg: &RunConfig) -> Result<Census, CliError> {
    let coll: GraphCollection<f64> = families::enumerate(spec)?;
    let m = quotient_classes(&coll, WlMode::Wl, Rounds::Stable).len();
    let (partitions, groups) = match spec {
        FamilySpec::PartitionPaths(n) => {
            let fam = families::partition_path_family::<f64>(n)?;
            (Some(fam.partitions.len()), Some(fam.groups.len()))
        }
        _ => (None, None),
    };
    let w_j = match spec {
        FamilySpec::OtterTrees(v) if v % 2 == 1 => Some(families::wedderburn_etherington((v - 1) / 2)),
        _ => None,
    };
    let census = Census {
        family: family_label(&spec),
        count: coll.len(),
        m,
        w_j,
        partitions,
        groups,
    };
    let name = tu_name(&spec);
    tu::write_tu_dataset(&coll, &cfg.out.join(&name), &name)?;
    write_file(
        &cfg.out.join("census.json"),
        &serde_json::to_string_pretty(&census).expect("census serializes"),
    )?;
    Ok(census)
}

/// One radius of a covering curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRow {
    pub epsilon: f64,
    pub n_greedy: usize,
    /// Present when the number of distinct classes is within the exact limit.
    pub n_exact: Option<usize>,
    /// Number of metrically distinct classes (the cover size at radius 0).
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRun {
    pub metric: MetricSpec,
    pub resolved_depth: Option<usize>,
    pub order: usize,
    pub graphs: usize,
    pub diameter: f64,
    pub rows: Vec<CoverRow>,
}

impl CoverRun {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,N_greedy,N_exact,m\n");
        for r in &self.rows {
            let exact = r.n_exact.map(|x| x.to_string()).unwrap_or_default();
            s.push_str(&format!("{:?},{},{},{}\n", r.epsilon, r.n_greedy, exact, r.m));
        }
        s
    }
}

/// Pads the collection to its largest order, builds the distance matrix and
/// reports greedy (and, when small enough, exact) cover sizes per radius.
pub fn cmd_cover(
    coll: &GraphCollection<f64>,
    metric: MetricSpec,
    radii: &[f64],
    exact_limit: usize,
    cfg: &RunConfig,
) -> Result<CoverRun, CliError> {
    if radii.is_empty() {
        return Err(CliError::Config("radius list is empty".into()));
    }
    if coll.is_empty() {
        return Err(CliError::Data("no graphs to cover".into()));
    }
    let padded = coll.padded(None).map_err(|e| CliError::Data(e.to_string()))?;
    let dm = distance_matrix(&padded, &metric)?;
    let (_, class_of) = covering::metric_classes(&dm);
    let m = class_of.iter().copied().max().map_or(0, |x| x + 1);
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let curve = covering::covering_curve(&dm, &radii);
    let rows = curve
        .into_iter()
        .map(|(eps, n, _)| {
            let n_exact = if m <= exact_limit {
                Some(covering::exact_cover(&dm, eps, exact_limit)?.len())
            } else {
                None
            };
            Ok(CoverRow {
                epsilon: eps,
                n_greedy: n,
                n_exact,
                m,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let run = CoverRun {
        metric,
        resolved_depth: dm.resolved_depth,
        order: padded.max_order(),
        graphs: padded.len(),
        diameter: dm.max_value(),
        rows,
    };
    match cfg.format {
        OutputFormat::Csv => write_file(&cfg.out.join("cover.csv"), &run.to_csv())?,
        OutputFormat::Json => write_file(
            &cfg.out.join("cover.json"),
            &serde_json::to_string_pretty(&run).expect("cover run serializes"),
        )?,
    }
    Ok(run)
}

/// Settings for `correlate`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelateConfig {
    pub depths: Vec<usize>,
    pub models: usize,
    pub pairs: usize,
    pub hidden: usize,
    pub kind: LayerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelateRow {
    pub depth: usize,
    pub model_seed: u64,
    pub r: Option<f64>,
    pub degenerate: bool,
    pub lipschitz_product: f64,
}

/// Scatter data and Pearson `r` for random models at every depth.
///
/// Model `i` uses seed `seed + i`; pair sampling uses `seed` for every depth.
pub fn cmd_correlate(
    coll: &GraphCollection<f64>,
    cc: &CorrelateConfig,
    cfg: &RunConfig,
) -> Result<Vec<CorrelateRow>, CliError> {
    if cc.depths.is_empty() || cc.models == 0 {
        return Err(CliError::Config("need at least one depth and one model".into()));
    }
    if coll.is_empty() {
        return Err(CliError::Data("no graphs to correlate".into()));
    }
    let d = coll.graphs[0].d();
    let mut rows = Vec::new();
    let mut summary = String::from("depth,model_seed,r,degenerate,lipschitz_product\n");
    for &depth in &cc.depths {
        let models: Vec<MpnnModel<f64>> = (0..cc.models)
            .map(|i| MpnnModel::standard(cc.kind, d, cc.hidden, depth, cfg.seed + i as u64))
            .collect();
        let results = mpnn::correlate(&models, coll, depth, cc.pairs, cfg.seed)?;
        for (model, res) in models.iter().zip(&results) {
            let row = CorrelateRow {
                depth,
                model_seed: model.seed,
                r: res.r,
                degenerate: res.degenerate(),
                lipschitz_product: model.lipschitz_bound().product,
            };
            let r = row.r.map(|x| format!("{x:?}")).unwrap_or_default();
            summary.push_str(&format!(
                "{},{},{},{},{:?}\n",
                row.depth, row.model_seed, r, row.degenerate, row.lipschitz_product
            ));
            let stem = format!("scatter_L{depth}_seed{}", model.seed);
            match cfg.format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    res.write_csv(&mut buf).map_err(|e| CliError::Config(e.to_string()))?;
                    write_file(
                        &cfg.out.join(format!("{stem}.csv")),
                        std::str::from_utf8(&buf).expect("csv is utf-8"),
                    )?;
                }
                OutputFormat::Json => write_file(
                    &cfg.out.join(format!("{stem}.json")),
                    &serde_json::to_string_pretty(res).expect("scatter serializes"),
                )?,
            }
            write_file(&cfg.out.join(format!("model_L{depth}_seed{}.json", model.seed)), &model.to_json())?;
            rows.push(row);
        }
    }
    match cfg.format {
        OutputFormat::Csv => write_file(&cfg.out.join("correlation.csv"), &summary)?,
        OutputFormat::Json => write_file(
            &cfg.out.join("correlation.json"),
            &serde_json::to_string_pretty(&rows).expect("rows serialize"),
        )?,
    }
    Ok(rows)
}

/// Coefficient file for `bound`; only the fields a formula needs are read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub sample_size: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "M")]
    pub loss_bound: Option<f64>,
    #[serde(rename = "K")]
    pub k_cells: Option<f64>,
    pub epsilon: Option<f64>,
    pub covering_number: Option<f64>,
    pub m: Option<f64>,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<f64>,
    pub l_loss: Option<f64>,
    pub l_fnn: Option<f64>,
    pub c_fd: Option<f64>,
    pub cells: Option<Vec<(f64, f64)>>,
    pub zeta: Option<f64>,
    pub occupied: Option<f64>,
    pub empirical_loss: Option<f64>,
    pub d_vc: Option<f64>,
    pub w_n: Option<f64>,
    pub m_le_n: Option<f64>,
    pub per_order: Option<Vec<f64>>,
    pub gamma_inverse: Option<Vec<(f64, f64)>>,
    /// `covering`, `construction`, `otter` or `up-to-n` for the tree-distance bound.
    pub variant: Option<String>,
}

impl Coefficients {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed coefficient file: {e}")))
    }
}

/// Bound formulas reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    XuMannor,
    Extended,
    Kawaguchi,
    WlClassification,
    WlRegression,
    Fd,
    MeanFd,
    TreeDistance,
    Vc,
}

/// Scan options for `bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundScan {
    pub delta_grid: Vec<f64>,
    /// Value the δ-scan tries to reproduce.
    pub target: Option<f64>,
    /// For tree-parameterised forest bounds: evaluate `k = 0..=k_max`.
    pub k_max: Option<usize>,
}

impl Default for BoundScan {
    fn default() -> Self {
        Self {
            delta_grid: vec![0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 0.9, 0.99],
            target: None,
            k_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRun {
    pub report: BoundReport,
    pub delta_scan: DeltaScan,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_scan: Option<Scan>,
}

fn need(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("coefficient `{name}` is required")))
}

/// Evaluates one formula at the given δ.
pub fn evaluate_formula(formula: Formula, c: &Coefficients, delta: f64) -> Result<BoundReport, CliError> {
    let s = need(c.sample_size, "sample_size")?;
    let big_m = || need(c.loss_bound, "M");
    let lip = || -> Result<LipschitzInputs, CliError> {
        Ok(LipschitzInputs {
            l_loss: c.l_loss.unwrap_or(1.0),
            l_fnn: need(c.l_fnn, "l_fnn")?,
            c_fd: need(c.c_fd, "c_fd")?,
            n: need(c.n, "n")?,
        })
    };
    let report = match formula {
        Formula::XuMannor => bounds::xu_mannor_bound(need(c.k_cells, "K")?, c.epsilon.unwrap_or(0.0), big_m()?, delta, s)?,
        Formula::Extended => bounds::extended_bound(
            c.cells.as_deref().ok_or_else(|| CliError::Config("coefficient `cells` is required".into()))?,
            need(c.k_cells, "K")?,
            big_m()?,
            delta,
            s,
        )?,
        Formula::Kawaguchi => bounds::kawaguchi_bound(
            need(c.zeta, "zeta")?,
            need(c.occupied, "occupied")?,
            need(c.k_cells, "K")?,
            c.epsilon.unwrap_or(0.0),
            delta,
            s,
            c.empirical_loss.unwrap_or(0.0),
        )?,
        Formula::WlClassification => bounds::wl_classification_bound(need(c.m, "m")?, c.loss_bound.unwrap_or(1.0), delta, s)?,
        Formula::WlRegression => bounds::wl_regression_bound(
            need(c.m, "m")?,
            c.loss_bound.unwrap_or(1.0),
            delta,
            s,
            need(c.epsilon, "epsilon")?,
        )?,
        Formula::Fd | Formula::MeanFd => {
            let cover = ForestCover::from_options(c.epsilon, c.covering_number, c.m, c.k, c.b)?;
            if formula == Formula::Fd {
                bounds::fd_bound(lip()?, cover, big_m()?, delta, s)?
            } else {
                bounds::mean_fd_bound(lip()?, cover, big_m()?, delta, s)?
            }
        }
        Formula::TreeDistance => {
            let gamma = c.gamma_inverse.clone().map(GammaInverse::new).transpose()?;
            let variant = match c.variant.as_deref().unwrap_or("covering") {
                "covering" => TreeBoundVariant::Covering {
                    epsilon: need(c.epsilon, "epsilon")?,
                    covering_number: need(c.covering_number, "covering_number")?,
                },
                "construction" => TreeBoundVariant::TreeConstruction {
                    k: need(c.k, "k")?,
                    m_n: need(c.m, "m")?,
                },
                "otter" => TreeBoundVariant::Otter {
                    k: need(c.k, "k")?,
                    w_n: need(c.w_n, "w_n")?,
                },
                "up-to-n" => TreeBoundVariant::UpToN {
                    k: need(c.k, "k")?,
                    m_le_n: need(c.m_le_n, "m_le_n")?,
                    per_order: c
                        .per_order
                        .clone()
                        .ok_or_else(|| CliError::Config("coefficient `per_order` is required".into()))?,
                },
                other => return Err(CliError::Config(format!("unknown tree-distance variant `{other}`"))),
            };
            bounds::tree_distance_bound(
                gamma.as_ref(),
                &variant,
                need(c.n, "n")?,
                c.l_loss.unwrap_or(1.0),
                need(c.l_fnn, "l_fnn")?,
                big_m()?,
                delta,
                s,
            )?
        }
        Formula::Vc => bounds::vc_bound(need(c.d_vc, "d_vc")?, delta, s)?,
    };
    Ok(report)
}

/// Evaluates a formula at δ (file value, else `cfg.delta`), a δ-scan and an optional k-scan.
pub fn cmd_bound(formula: Formula, coeffs: &Coefficients, scan: &BoundScan, cfg: &RunConfig) -> Result<BoundRun, CliError> {
    let delta = coeffs.delta.unwrap_or(cfg.delta);
    let report = evaluate_formula(formula, coeffs, delta)?;
    let delta_scan = bounds::delta_scan(&scan.delta_grid, scan.target, |d| {
        evaluate_formula(formula, coeffs, d).map_err(|e| BoundError::ParamConflict(e.to_string()))
    })?;
    let k_scan = match (scan.k_max, formula) {
        (Some(k_max), Formula::Fd | Formula::MeanFd) => {
            let lip = LipschitzInputs {
                l_loss: coeffs.l_loss.unwrap_or(1.0),
                l_fnn: need(coeffs.l_fnn, "l_fnn")?,
                c_fd: need(coeffs.c_fd, "c_fd")?,
                n: need(coeffs.n, "n")?,
            };
            Some(bounds::fd_k_scan(
                lip,
                need(coeffs.m, "m")?,
                need(coeffs.b, "b")?,
                k_max,
                need(coeffs.loss_bound, "M")?,
                delta,
                need(coeffs.sample_size, "sample_size")?,
            )?)
        }
        (Some(_), _) => return Err(CliError::Config("k-scan applies to fd and mean-fd only".into())),
        (None, _) => None,
    };
    let run = BoundRun {
        report,
        delta_scan,
        k_scan,
    };
    write_file(
        &cfg.out.join("bound.json"),
        &serde_json::to_string_pretty(&run).expect("bound run serializes"),
    )?;
    if cfg.format == OutputFormat::Csv {
        let mut s = String::from("delta,bound\n");
        for (d, v) in &run.delta_scan.points {
            s.push_str(&format!("{d:?},{v:?}\n"));
        }
        write_file(&cfg.out.join("delta_scan.csv"), &s)?;
        if let Some(k) = &run.k_scan {
            write_file(&cfg.out.join("k_scan.csv"), &k.to_csv())?;
        }
    }
    Ok(run)
}

/// What `ingest-check` reports about a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub name: String,
    pub graphs: usize,
    pub max_order: usize,
    pub min_order: usize,
    pub feature_dim: usize,
    pub edges: usize,
    pub label_counts: [usize; 2],
}

pub fn cmd_ingest_check(dir: &Path, cfg: &RunConfig) -> Result<IngestSummary, CliError> {
    let name = dataset_name(dir)?;
    let coll: GraphCollection<f64> = tu::ingest_tu_dataset(dir, &name)?;
    let mut label_counts = [0usize; 2];
    for &y in &coll.labels {
        label_counts[usize::from(y)] += 1;
    }
    let summary = IngestSummary {
        name,
        graphs: coll.len(),
        max_order: coll.max_order(),
        min_order: coll.graphs.iter().map(|g| g.n()).min().unwrap_or(0),
        feature_dim: coll.graphs.first().map_or(0, |g| g.d()),
        edges: coll.graphs.iter().map(|g| g.edge_count()).sum(),
        label_counts,
    };
    write_file(
        &cfg.out.join("ingest.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    Ok(summary)
}

/// Metric spec for the command line; ω is always 1 here.
pub fn metric_spec(kind: MetricKind, depth: Rounds) -> MetricSpec {
    MetricSpec {
        kind,
        depth,
        omega: Omega::One,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_family("all:4").unwrap(), FamilySpec::AllGraphs(4));
        assert_eq!(
            parse_family("bounded:3,2,1").unwrap(),
            FamilySpec::BoundedDegreeLabeled { n: 3, d: 2, q: 1 }
        );
        assert!(matches!(parse_family("trees:4"), Err(CliError::Config(_))));
        assert!(parse_family("all:x").is_err());
        assert_eq!(parse_depth("stable").unwrap(), Rounds::Stable);
        assert_eq!(parse_depth("3").unwrap(), Rounds::Iter(3));
        assert_eq!(parse_radii("2,0.5,1").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_radii("").is_err());
        assert_eq!(parse_metric("wl").unwrap(), MetricKind::WlTrivial);
        assert_eq!(parse_metric("mean-fd").unwrap(), MetricKind::MeanFd);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Data(String::new()).exit_code(), 3);
        assert_eq!(CliError::Resource(String::new()).exit_code(), 4);
        let e: CliError = FamilyError::TooLarge("x".into()).into();
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn coefficient_files() {
        assert!(Coefficients::from_json("{\"sample_size\": 1, \"bogus\": 2}").is_err());
        assert!(Coefficients::from_json("not json").is_err());
        let c = Coefficients::from_json("{\"sample_size\": 150, \"M\": 5.89, \"K\": 278}").unwrap();
        let r = evaluate_formula(Formula::XuMannor, &c, 0.1).unwrap();
        assert!(r.value.is_finite());
        assert!(matches!(evaluate_formula(Formula::Fd, &c, 0.1), Err(CliError::Config(_))));
    }
}
