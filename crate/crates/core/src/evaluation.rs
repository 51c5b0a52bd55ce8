//! Metrics, k-fold cross-validation, κ grid search and κ₂ curves.
//!
//! All runs on one dataset share a single [`FoldPlan`] derived from the seed,
//! so differences between models or grid points come from the model alone.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{make_folds, range, split_fold, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::kappa::{self, bound_slack, KappaParams, NormalizationScope};
use crate::model::ModelSpec;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

/// Mean absolute error.
pub fn mae(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::Empty("prediction vector"));
    }
    let total: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).abs())
        .sum();
    Ok(total / predicted.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    /// Measure fit + predict time per fold; when off every time is 0.
    pub timing: bool,
    /// Worker threads for independent folds and grid points. `None` uses the
    /// default pool.
    pub workers: Option<usize>,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            k: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
            timing: true,
            workers: None,
        }
    }
}

impl CvOptions {
    pub fn plan(&self, dataset: &Dataset) -> Result<FoldPlan> {
        make_folds(dataset.n_samples(), self.k, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub mae: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub dataset: String,
    pub model: String,
    /// (κ₁, κ₂) for the proposed model.
    pub kappa: Option<KappaParams>,
    pub per_fold: Vec<FoldReport>,
    pub mean_mae: f64,
    pub mean_seconds: f64,
}

impl BenchmarkReport {
    pub fn from_folds(
        dataset: &str,
        model: &str,
        kappa: Option<KappaParams>,
        per_fold: Vec<FoldReport>,
    ) -> Self {
        let n = per_fold.len() as f64;
        let mean_mae = per_fold.iter().map(|f| f.mae).sum::<f64>() / n;
        let mean_seconds = per_fold.iter().map(|f| f.wall_seconds).sum::<f64>() / n;
        BenchmarkReport {
            dataset: dataset.to_string(),
            model: model.to_string(),
            kappa,
            per_fold,
            mean_mae,
            mean_seconds,
        }
    }
}

/// Run `f(i)` for every `i < n`, possibly in parallel, keeping index order.
fn run_indexed<T, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let job = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
        match workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
                .install(job),
            None => job(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        (0..n).map(f).collect()
    }
}

fn with_fold<T>(fold: usize, result: Result<T>) -> Result<T> {
    result.map_err(|source| Error::Fold {
        fold,
        source: Box::new(source),
    })
}

/// Error unless every prediction is inside `[min(y_train), max(y_train)]`.
pub fn check_convex(predictions: &[f64], y_train: &[f64]) -> Result<()> {
    let (lo, hi) = range(y_train).ok_or(Error::Empty("training set"))?;
    let eps = bound_slack(lo, hi);
    match predictions
        .iter()
        .find(|&&p| !(p >= lo - eps && p <= hi + eps))
    {
        Some(&value) => Err(Error::BoundViolation {
            value,
            min: lo,
            max: hi,
        }),
        None => Ok(()),
    }
}

/// Predictions of `model` for one fold of `plan`, plus the fold's test targets.
pub fn fold_predictions(
    model: &ModelSpec,
    dataset: &Dataset,
    plan: &FoldPlan,
    fold: usize,
) -> Result<(Vec<f64>, Vec<f64>, Dataset)> {
    let (train, test) = split_fold(dataset, plan, fold)?;
    let predictions = model.fit_predict(&train, &test)?;
    Ok((predictions, test.targets, train))
}

fn score_fold(
    model: &ModelSpec,
    dataset: &Dataset,
    plan: &FoldPlan,
    fold: usize,
    timing: bool,
) -> Result<FoldReport> {
    let (train, test) = split_fold(dataset, plan, fold)?;
    let start = timing.then(Instant::now);
    let predictions = model.fit_predict(&train, &test)?;
    let wall_seconds = start.map_or(0.0, |s| s.elapsed().as_secs_f64());
    if model.kind().is_convex() {
        check_convex(&predictions, &train.targets)?;
    }
    Ok(FoldReport {
        fold,
        mae: mae(&predictions, &test.targets)?,
        wall_seconds,
    })
}

/// k-fold CV of one model. A failing fold aborts with its index attached.
pub fn cross_validate(
    model: &ModelSpec,
    dataset: &Dataset,
    opts: &CvOptions,
) -> Result<BenchmarkReport> {
    let plan = opts.plan(dataset)?;
    cross_validate_on(model, dataset, &plan, opts)
}

/// As [`cross_validate`] with an explicit fold plan.
pub fn cross_validate_on(
    model: &ModelSpec,
    dataset: &Dataset,
    plan: &FoldPlan,
    opts: &CvOptions,
) -> Result<BenchmarkReport> {
    let per_fold = run_indexed(plan.k, opts.workers, |fold| {
        with_fold(fold, score_fold(model, dataset, plan, fold, opts.timing))
    })?;
    Ok(BenchmarkReport::from_folds(
        &dataset.name,
        model.name(),
        model.kappa(),
        per_fold,
    ))
}

/// Candidate κ values for both stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaGrid {
    pub kappa1_values: Vec<f64>,
    pub kappa2_values: Vec<f64>,
}

/// {0.5, 1, 2, ..., 15, 20, 24, 30, 40, 50}.
pub fn default_kappa_values() -> Vec<f64> {
    let mut values = vec![0.5];
    values.extend((1..=15).map(f64::from));
    values.extend([20.0, 24.0, 30.0, 40.0, 50.0]);
    values
}

impl Default for KappaGrid {
    fn default() -> Self {
        KappaGrid {
            kappa1_values: default_kappa_values(),
            kappa2_values: default_kappa_values(),
        }
    }
}

fn check_axis(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{name} grid value {v} is not > 0"
        )));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "{name} grid is not strictly increasing"
        )));
    }
    Ok(())
}

impl KappaGrid {
    pub fn new(kappa1_values: Vec<f64>, kappa2_values: Vec<f64>) -> Result<Self> {
        let grid = KappaGrid {
            kappa1_values,
            kappa2_values,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(kappa1: f64, kappa2: f64) -> Result<Self> {
        Self::new(vec![kappa1], vec![kappa2])
    }

    pub fn validate(&self) -> Result<()> {
        check_axis("kappa1", &self.kappa1_values)?;
        check_axis("kappa2", &self.kappa2_values)
    }

    pub fn len(&self) -> usize {
        self.kappa1_values.len() * self.kappa2_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One grid point's cross-validated error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub dataset: String,
    /// Row-major over (κ₁, κ₂), both ascending.
    pub surface: Vec<SurfacePoint>,
    pub best: KappaParams,
    pub best_mae: f64,
}

impl GridResult {
    pub fn get(&self, kappa1: f64, kappa2: f64) -> Option<f64> {
        self.surface
            .iter()
            .find(|p| p.kappa1 == kappa1 && p.kappa2 == kappa2)
            .map(|p| p.mean_mae)
    }
}

/// Per-fold MAE for every grid point, `[fold][i1 * n2 + i2]`.
///
/// The encoding depends only on κ₁, so it is built once per (fold, κ₁) and
/// reused for every κ₂.
fn grid_fold_maes(
    dataset: &Dataset,
    plan: &FoldPlan,
    grid: &KappaGrid,
    scope: NormalizationScope,
    workers: Option<usize>,
) -> Result<Vec<Vec<f64>>> {
    run_indexed(plan.k, workers, |fold| {
        with_fold(
            fold,
            (|| {
                let (train, test) = split_fold(dataset, plan, fold)?;
                let mut maes = Vec::with_capacity(grid.len());
                for &kappa1 in &grid.kappa1_values {
                    let encoded = kappa::encode(&train, &test, kappa1, scope)?;
                    let distances = kappa::distance_matrix(&encoded);
                    for &kappa2 in &grid.kappa2_values {
                        let predictions = kappa::predict(&distances, &train.targets, kappa2)?;
                        check_convex(&predictions, &train.targets)?;
                        maes.push(mae(&predictions, &test.targets)?);
                    }
                }
                Ok(maes)
            })(),
        )
    })
}

fn grid_on(
    dataset: &Dataset,
    plan: &FoldPlan,
    grid: &KappaGrid,
    scope: NormalizationScope,
    workers: Option<usize>,
) -> Result<GridResult> {
    grid.validate()?;
    let per_fold = grid_fold_maes(dataset, plan, grid, scope, workers)?;
    let mut surface = Vec::with_capacity(grid.len());
    for (i1, &kappa1) in grid.kappa1_values.iter().enumerate() {
        for (i2, &kappa2) in grid.kappa2_values.iter().enumerate() {
            let at = i1 * grid.kappa2_values.len() + i2;
            let mean_mae = per_fold.iter().map(|m| m[at]).sum::<f64>() / plan.k as f64;
            surface.push(SurfacePoint {
                kappa1,
                kappa2,
                mean_mae,
            });
        }
    }
    // row-major ascending order plus strict `<` gives the lexicographic tie-break
    let mut best = surface[0];
    for p in &surface[1..] {
        if p.mean_mae < best.mean_mae {
            best = *p;
        }
    }
    Ok(GridResult {
        dataset: dataset.name.clone(),
        surface,
        best: KappaParams {
            kappa1: best.kappa1,
            kappa2: best.kappa2,
        },
        best_mae: best.mean_mae,
    })
}

/// CV error of the proposed model at every grid point, all on the same folds.
pub fn grid_search(
    dataset: &Dataset,
    grid: &KappaGrid,
    scope: NormalizationScope,
    opts: &CvOptions,
) -> Result<GridResult> {
    grid.validate()?;
    let plan = opts.plan(dataset)?;
    grid_on(dataset, &plan, grid, scope, opts.workers)
}

/// `(κ₂, mean MAE)` at fixed κ₁, sorted by κ₂.
pub fn kappa_curve(
    dataset: &Dataset,
    kappa1: f64,
    kappa2_values: &[f64],
    scope: NormalizationScope,
    opts: &CvOptions,
) -> Result<Vec<(f64, f64)>> {
    let mut values = kappa2_values.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let grid = KappaGrid::new(vec![kappa1], values)?;
    let result = grid_search(dataset, &grid, scope, opts)?;
    Ok(result
        .surface
        .iter()
        .map(|p| (p.kappa2, p.mean_mae))
        .collect())
}

/// Outcome of nested CV: outer-fold scores and the κ chosen in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedReport {
    pub report: BenchmarkReport,
    pub chosen: Vec<KappaParams>,
}

/// Nested CV: an inner grid search on each outer training part picks κ, the
/// outer test part scores it. Inner folds use `opts.k` and `opts.seed`.
pub fn nested_cross_validate(
    dataset: &Dataset,
    grid: &KappaGrid,
    scope: NormalizationScope,
    opts: &CvOptions,
) -> Result<NestedReport> {
    grid.validate()?;
    let plan = opts.plan(dataset)?;
    let outcomes = run_indexed(plan.k, opts.workers, |fold| {
        with_fold(
            fold,
            (|| {
                let (train, test) = split_fold(dataset, &plan, fold)?;
                let start = opts.timing.then(Instant::now);
                let inner_plan =
                    make_folds(train.n_samples(), opts.k.min(train.n_samples()), opts.seed)?;
                let inner = grid_on(&train, &inner_plan, grid, scope, Some(1))?;
                let model = ModelSpec::Proposed {
                    params: inner.best,
                    scope,
                };
                let predictions = model.fit_predict(&train, &test)?;
                let wall_seconds = start.map_or(0.0, |s| s.elapsed().as_secs_f64());
                check_convex(&predictions, &train.targets)?;
                let report = FoldReport {
                    fold,
                    mae: mae(&predictions, &test.targets)?,
                    wall_seconds,
                };
                Ok((report, inner.best))
            })(),
        )
    })?;
    let (per_fold, chosen): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    Ok(NestedReport {
        report: BenchmarkReport::from_folds(&dataset.name, "proposed-nested", None, per_fold),
        chosen,
    })
}
