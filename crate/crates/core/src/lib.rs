//! Distance-weighted all-samples regression with target-mean feature encoding,
//! four reference regressors, and a cross-validation benchmark harness.
//!
//! ```
//! use kappareg::{Dataset, KappaParams};
//!
//! let rows = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
//! let train = Dataset::from_rows("toy", &rows, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
//! let test = Dataset::from_rows("toy", &[vec![2.5]], vec![0.0]).unwrap();
//! let pred = kappareg::kappa::fit_predict(&train, &test, KappaParams::new(2.0, 4.0).unwrap()).unwrap();
//! assert!((pred[0] - 2.5).abs() < 1e-9);
//! ```

pub mod baselines;
pub mod builtin;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod kappa;
pub mod model;
pub mod report;

#[cfg(feature = "cli")]
pub mod cli;

pub use dataset::{
    load_dataset, make_folds, split_fold, Dataset, DatasetSpec, FeatureKind, FoldPlan,
};
pub use error::{Error, Result};
pub use evaluation::{
    cross_validate, grid_search, kappa_curve, mae, BenchmarkReport, CvOptions, GridResult,
    KappaGrid,
};
pub use kappa::{KappaParams, NormalizationScope};
pub use model::{ModelKind, ModelSpec};
