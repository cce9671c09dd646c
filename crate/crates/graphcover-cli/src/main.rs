use clap::{Args, Parser, Subcommand};
use graphcover::mpnn::LayerKind;
use graphcover_cli::*;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "graphcover", version, about = "Graph pseudo-metrics, covering numbers and generalization bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Confidence parameter for bounds.
    #[arg(long, global = true, default_value_t = 0.1)]
    delta: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct SourceArgs {
    /// TU-format dataset directory, named after the dataset.
    #[arg(long, conflicts_with = "family")]
    dataset: Option<PathBuf>,
    /// all:N | all-upto:N | otter:V | partition-paths:N | bounded:N,D,Q
    #[arg(long)]
    family: Option<String>,
}

impl SourceArgs {
    fn source(&self) -> Result<Source, CliError> {
        match (&self.dataset, &self.family) {
            (Some(d), None) => Ok(Source::Dataset(d.clone())),
            (None, Some(f)) => Ok(Source::Family(parse_family(f)?)),
            _ => Err(CliError::Config("give exactly one of --dataset or --family".into())),
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Sum,
    Mean,
    OrderNormalized,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a graph family as a TU dataset plus census.json.
    Enumerate {
        #[arg(long)]
        family: String,
    },
    /// Covering numbers over a radius grid.
    Cover {
        #[command(flatten)]
        source: SourceArgs,
        /// fd | tmd | mean-fd | delta-perm1 | delta-ds1 | wl
        #[arg(long, default_value = "fd")]
        metric: String,
        /// Depth L, or `stable`.
        #[arg(long, default_value = "3")]
        depth: String,
        /// Comma-separated radii.
        #[arg(long)]
        radii: String,
        /// Largest number of distinct classes for which exact covers are computed.
        #[arg(long, default_value_t = graphcover::covering::DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
    },
    /// Forest distance versus MPNN embedding distance for random models.
    Correlate {
        #[arg(long)]
        dataset: PathBuf,
        /// Comma-separated depths.
        #[arg(long, default_value = "3")]
        depths: String,
        #[arg(long, default_value_t = 5)]
        models: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 16)]
        hidden: usize,
        #[arg(long, value_enum, default_value = "sum")]
        kind: KindArg,
    },
    /// Evaluate a generalization bound from a JSON coefficient file.
    Bound {
        #[arg(long, value_enum)]
        formula: Formula,
        #[arg(long)]
        coefficients: PathBuf,
        /// Evaluate k = 0..=K for tree-parameterised forest bounds.
        #[arg(long)]
        k_max: Option<usize>,
        /// Bound value the δ-scan should try to reproduce.
        #[arg(long)]
        target: Option<f64>,
        /// Comma-separated δ grid.
        #[arg(long)]
        delta_grid: Option<String>,
    },
    /// Parse a TU dataset and summarise it.
    IngestCheck {
        #[arg(long)]
        dataset: PathBuf,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("{what} `{s}` must be a comma-separated list")))
}

fn run(cli: Cli) -> Result<String, CliError> {
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = RunConfig {
        out: cli.common.out,
        format: cli.common.format,
        seed: cli.common.seed,
        delta: cli.common.delta,
    };
    let json = |v: &dyn erased::Json| v.json();
    match cli.command {
        Command::Enumerate { family } => Ok(json(&cmd_enumerate(parse_family(&family)?, &cfg)?)),
        Command::Cover {
            source,
            metric,
            depth,
            radii,
            exact_limit,
        } => {
            let coll = source.source()?.load()?;
            let spec = metric_spec(parse_metric(&metric)?, parse_depth(&depth)?);
            let run = cmd_cover(&coll, spec, &parse_radii(&radii)?, exact_limit, &cfg)?;
            Ok(run.to_csv())
        }
        Command::Correlate {
            dataset,
            depths,
            models,
            pairs,
            hidden,
            kind,
        } => {
            let coll = Source::Dataset(dataset).load()?;
            let cc = CorrelateConfig {
                depths: parse_list(&depths, "depths")?,
                models,
                pairs,
                hidden,
                kind: match kind {
                    KindArg::Sum => LayerKind::SumAgg,
                    KindArg::Mean => LayerKind::MeanAgg,
                    KindArg::OrderNormalized => LayerKind::OrderNormalizedSum,
                },
            };
            Ok(json(&cmd_correlate(&coll, &cc, &cfg)?))
        }
        Command::Bound {
            formula,
            coefficients,
            k_max,
            target,
            delta_grid,
        } => {
            let text = std::fs::read_to_string(&coefficients)
                .map_err(|e| CliError::Config(format!("{}: {e}", coefficients.display())))?;
            let coeffs = Coefficients::from_json(&text)?;
            let mut scan = BoundScan {
                target,
                k_max,
                ..BoundScan::default()
            };
            if let Some(g) = delta_grid {
                scan.delta_grid = parse_list(&g, "delta grid")?;
            }
            Ok(json(&cmd_bound(formula, &coeffs, &scan, &cfg)?))
        }
        Command::IngestCheck { dataset } => Ok(json(&cmd_ingest_check(&dataset, &cfg)?)),
    }
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string_pretty(self).expect("serializable output")
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
