//! Command-line front end: `bench`, `grid`, `curve` and `fetch-data`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::baselines::{BoostConfig, ForestConfig, KnnConfig, TreeConfig};
use crate::builtin::{self, Builtin, DATA_DIR_ENV};
use crate::dataset::{load_dataset, Dataset};
use crate::error::{Error, Result};
use crate::evaluation::{
    cross_validate, default_kappa_values, grid_search, kappa_curve, nested_cross_validate,
    BenchmarkReport, CvOptions, KappaGrid, DEFAULT_FOLDS, DEFAULT_SEED,
};
use crate::kappa::{KappaParams, NormalizationScope};
use crate::model::{ModelKind, ModelSpec};
use crate::report::{self, CurvePoint, Format};

#[derive(Debug, Parser)]
#[command(
    name = "kappareg",
    version,
    about = "Distance-weighted regression benchmarks"
)]
pub struct Cli {
    /// Directory holding the raw data files.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,

    /// JSON run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-validate models on datasets and write per-fold results.
    Bench(RunArgs),
    /// Cross-validate the proposed model over a (κ₁, κ₂) grid.
    Grid(RunArgs),
    /// MAE against κ₂ at fixed κ₁.
    Curve(RunArgs),
    /// List data sources and verify local copies.
    FetchData(FetchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Built-in dataset name or path to a JSON spec; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dataset: Vec<String>,
    /// proposed, knn, tree, forest or boost; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Number of folds.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    /// One value, or a list such as `1..20` or `2,4,8` for `curve`.
    #[arg(long)]
    pub kappa2: Option<String>,
    /// `default`, one list for both axes, or `K1LIST:K2LIST`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Pick κ by inner CV on each outer training part (bench with --grid).
    #[arg(long)]
    pub nested_cv: bool,
    /// Record 0 for wall time so result files are byte-for-byte reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Normalize ordinal ranges over train and test rows together.
    #[arg(long)]
    pub pooled_normalization: bool,
    /// Only write the output file; no summary table or best-point line.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FetchArgs {
    #[arg(long, value_delimiter = ',')]
    pub dataset: Vec<String>,
}

/// Everything a run can take from the JSON config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub datasets: Vec<String>,
    pub models: Vec<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<KappaValues>,
    pub grid: Option<KappaGrid>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub nested_cv: bool,
    pub timing: Option<bool>,
    pub scope: Option<NormalizationScope>,
    pub knn: Option<KnnConfig>,
    pub tree: Option<TreeConfig>,
    pub forest: Option<ForestConfig>,
    pub boost: Option<BoostConfig>,
    pub quiet: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum KappaValues {
    One(f64),
    Many(Vec<f64>),
}

impl KappaValues {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            KappaValues::One(v) => vec![*v],
            KappaValues::Many(v) => v.clone(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Overlay command-line flags; flags win.
    pub fn merge(mut self, args: &RunArgs) -> Result<Self> {
        if !args.dataset.is_empty() {
            self.datasets = args.dataset.clone();
        }
        if !args.model.is_empty() {
            self.models = args.model.clone();
        }
        self.k = args.k.or(self.k);
        self.seed = args.seed.or(self.seed);
        self.kappa1 = args.kappa1.or(self.kappa1);
        if let Some(text) = &args.kappa2 {
            self.kappa2 = Some(KappaValues::Many(parse_values(text)?));
        }
        if let Some(text) = &args.grid {
            self.grid = Some(parse_grid(text)?);
        }
        if args.out.is_some() {
            self.out = args.out.clone();
        }
        self.format = args.format.or(self.format);
        self.workers = args.workers.or(self.workers);
        self.nested_cv |= args.nested_cv;
        self.quiet |= args.quiet;
        if args.no_timing {
            self.timing = Some(false);
        }
        if args.pooled_normalization {
            self.scope = Some(NormalizationScope::Pooled);
        }
        Ok(self)
    }

    fn options(&self) -> CvOptions {
        CvOptions {
            k: self.k.unwrap_or(DEFAULT_FOLDS),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            timing: self.timing.unwrap_or(true),
            workers: self.workers,
        }
    }

    fn scope(&self) -> NormalizationScope {
        self.scope.unwrap_or_default()
    }

    fn format(&self) -> Format {
        self.format
            .or_else(|| {
                let ext = self
                    .out
                    .as_ref()?
                    .extension()?
                    .to_str()?
                    .to_ascii_lowercase();
                (ext == "json").then_some(Format::Json)
            })
            .unwrap_or_default()
    }

    fn dataset_args(&self) -> Vec<String> {
        if self.datasets.is_empty() {
            builtin::names().map(str::to_string).collect()
        } else {
            self.datasets.clone()
        }
    }

    fn model_kinds(&self) -> Result<Vec<ModelKind>> {
        if self.models.is_empty() {
            return Ok(ModelKind::ALL.to_vec());
        }
        self.models.iter().map(|m| m.parse()).collect()
    }

    fn single_kappa2(&self) -> Result<Option<f64>> {
        match &self.kappa2 {
            None => Ok(None),
            Some(values) => match values.to_vec()[..] {
                [v] => Ok(Some(v)),
                _ => Err(Error::InvalidParameter(
                    "expected a single kappa2 value".into(),
                )),
            },
        }
    }

    /// Fixed κ for the proposed model: flags or config first, then the
    /// dataset's built-in default.
    fn kappa_for(&self, dataset: &str) -> Result<KappaParams> {
        let default = builtin::find(dataset).map(Builtin::kappa_params);
        let kappa1 = self.kappa1.or(default.map(|k| k.kappa1));
        let kappa2 = self.single_kappa2()?.or(default.map(|k| k.kappa2));
        match (kappa1, kappa2) {
            (Some(k1), Some(k2)) => KappaParams::new(k1, k2),
            _ => Err(Error::InvalidParameter(format!(
                "dataset {dataset} has no default kappa; pass --kappa1 and --kappa2"
            ))),
        }
    }

    fn baseline(&self, kind: ModelKind) -> ModelSpec {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        match kind {
            ModelKind::Knn => ModelSpec::Knn(self.knn.unwrap_or_default()),
            ModelKind::Tree => ModelSpec::Tree(self.tree.unwrap_or_default()),
            ModelKind::Forest => ModelSpec::Forest(self.forest.unwrap_or(ForestConfig {
                bootstrap_seed: seed,
                ..Default::default()
            })),
            ModelKind::Boost => ModelSpec::Boost(self.boost.unwrap_or_default()),
            ModelKind::Proposed => unreachable!("the proposed model needs κ"),
        }
    }
}

/// Comma list of numbers and inclusive integer ranges `a..b`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse value list {text:?}"));
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            values.extend((a..=b).map(|v| v as f64));
        } else {
            values.push(item.parse().map_err(|_| bad())?);
        }
    }
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

pub fn parse_grid(text: &str) -> Result<KappaGrid> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("default") {
        return Ok(KappaGrid::default());
    }
    let axis = |s: &str| {
        if s.trim().eq_ignore_ascii_case("default") {
            Ok(default_kappa_values())
        } else {
            parse_values(s)
        }
    };
    match text.split_once(':') {
        Some((k1, k2)) => KappaGrid::new(axis(k1)?, axis(k2)?),
        None => {
            let values = axis(text)?;
            KappaGrid::new(values.clone(), values)
        }
    }
}

fn load(arg: &str, data_dir: &Path) -> Result<Dataset> {
    let spec = builtin::resolve_spec(arg, data_dir)?;
    let mut dataset = load_dataset(&spec)?;
    if let Some(b) = builtin::find(arg) {
        dataset.name = b.name.to_string();
    }
    Ok(dataset)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            let file = File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Collects per-run failures so the remaining runs still execute.
#[derive(Default)]
struct Failures(usize);

impl Failures {
    fn record(&mut self, what: &str, err: &Error) {
        eprintln!("error: {what}: {err}");
        self.0 += 1;
    }

    fn status(&self) -> i32 {
        i32::from(self.0 > 0)
    }
}

/// Status line for human readers: stdout when results go to a file, stderr
/// when they go to stdout.
fn say(cfg: &RunConfig, line: &str) {
    if cfg.quiet {
        return;
    }
    if cfg.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

pub fn cmd_bench(cfg: &RunConfig, data_dir: &Path) -> Result<i32> {
    let kinds = cfg.model_kinds()?;
    let opts = cfg.options();
    let scope = cfg.scope();
    let mut reports: Vec<BenchmarkReport> = Vec::new();
    let mut failures = Failures::default();

    for arg in cfg.dataset_args() {
        let dataset = match load(&arg, data_dir) {
            Ok(d) => d,
            Err(e) => {
                failures.record(&format!("dataset {arg}"), &e);
                continue;
            }
        };
        for &kind in &kinds {
            let run = || -> Result<BenchmarkReport> {
                if kind != ModelKind::Proposed {
                    return cross_validate(&cfg.baseline(kind), &dataset, &opts);
                }
                match &cfg.grid {
                    Some(grid) if cfg.nested_cv => {
                        Ok(nested_cross_validate(&dataset, grid, scope, &opts)?.report)
                    }
                    Some(grid) => {
                        let best = grid_search(&dataset, grid, scope, &opts)?.best;
                        cross_validate(
                            &ModelSpec::Proposed {
                                params: best,
                                scope,
                            },
                            &dataset,
                            &opts,
                        )
                    }
                    None => {
                        let params = cfg.kappa_for(&arg)?;
                        cross_validate(&ModelSpec::Proposed { params, scope }, &dataset, &opts)
                    }
                }
            };
            match run() {
                Ok(r) => reports.push(r),
                Err(e) => failures.record(&format!("{} on {}", kind, dataset.name), &e),
            }
        }
    }

    let mut out = open_out(cfg.out.as_deref())?;
    report::write_results(&mut out, &reports, cfg.format())?;
    out.flush().map_err(|e| Error::io("<output>", e))?;
    say(cfg, report::aggregate_table(&reports).trim_end());
    Ok(failures.status())
}

pub fn cmd_grid(cfg: &RunConfig, data_dir: &Path) -> Result<i32> {
    let grid = cfg.grid.clone().unwrap_or_default();
    let opts = cfg.options();
    let mut results = Vec::new();
    let mut failures = Failures::default();
    for arg in cfg.dataset_args() {
        match load(&arg, data_dir).and_then(|d| grid_search(&d, &grid, cfg.scope(), &opts)) {
            Ok(r) => {
                say(cfg, &report::best_line(&r)[2..]);
                results.push(r);
            }
            Err(e) => failures.record(&format!("grid on {arg}"), &e),
        }
    }
    let mut out = open_out(cfg.out.as_deref())?;
    report::write_surfaces(&mut out, &results, cfg.format())?;
    out.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(failures.status())
}

pub fn cmd_curve(cfg: &RunConfig, data_dir: &Path) -> Result<i32> {
    let opts = cfg.options();
    let kappa2_values = match &cfg.kappa2 {
        Some(v) => v.to_vec(),
        None => (1..=20).map(f64::from).collect(),
    };
    let mut points = Vec::new();
    let mut failures = Failures::default();
    for arg in cfg.dataset_args() {
        let run = || -> Result<Vec<CurvePoint>> {
            let kappa1 = match cfg.kappa1 {
                Some(k) => k,
                None => builtin::lookup(&arg)?.kappa.0,
            };
            let dataset = load(&arg, data_dir)?;
            let curve = kappa_curve(&dataset, kappa1, &kappa2_values, cfg.scope(), &opts)?;
            Ok(curve
                .into_iter()
                .map(|(kappa2, mean_mae)| CurvePoint {
                    dataset: dataset.name.clone(),
                    kappa1,
                    kappa2,
                    mean_mae,
                })
                .collect())
        };
        match run() {
            Ok(p) => points.extend(p),
            Err(e) => failures.record(&format!("curve on {arg}"), &e),
        }
    }
    let mut out = open_out(cfg.out.as_deref())?;
    report::write_curve(&mut out, &points, cfg.format())?;
    out.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(failures.status())
}

pub fn cmd_fetch_data(args: &FetchArgs, data_dir: &Path) -> Result<i32> {
    let selected: Vec<&Builtin> = if args.dataset.is_empty() {
        builtin::BUILTINS.iter().collect()
    } else {
        args.dataset
            .iter()
            .map(|d| builtin::lookup(d))
            .collect::<Result<_>>()?
    };
    println!("data directory: {}", data_dir.display());
    let mut missing = 0;
    for b in selected {
        let spec = b.spec().resolved(data_dir);
        let status = if !spec.source_path.exists() {
            missing += 1;
            "missing".to_string()
        } else {
            match load_dataset(&spec) {
                Err(e) => {
                    missing += 1;
                    format!("unreadable: {e}")
                }
                Ok(ds) if ds.n_samples() != b.n_samples => {
                    missing += 1;
                    format!("{} rows, expected {}", ds.n_samples(), b.n_samples)
                }
                Ok(ds) => match b.checksum {
                    Some(expected) if ds.checksum() != expected => {
                        missing += 1;
                        format!("checksum mismatch ({})", ds.checksum())
                    }
                    Some(_) => "ok, checksum verified".to_string(),
                    None => format!(
                        "ok, {} rows, sha256 {} (no reference)",
                        ds.n_samples(),
                        ds.checksum()
                    ),
                },
            }
        };
        println!("{:<10} {status}", b.name);
        println!("{:<10} source {}", "", b.url);
        println!("{:<10} file   {}", "", spec.source_path.display());
    }
    if missing > 0 {
        println!(
            "download with: python3 scripts/fetch_data.py --out {}",
            data_dir.display()
        );
    }
    Ok(i32::from(missing > 0))
}

/// Parse `args`, run, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let data_dir = builtin::data_dir(cli.data_dir.as_deref());
    let result = (|| {
        let base = match &cli.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        match &cli.command {
            Command::Bench(a) => cmd_bench(&base.merge(a)?, &data_dir),
            Command::Grid(a) => cmd_grid(&base.merge(a)?, &data_dir),
            Command::Curve(a) => cmd_curve(&base.merge(a)?, &data_dir),
            Command::FetchData(a) => cmd_fetch_data(a, &data_dir),
        }
    })();
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
