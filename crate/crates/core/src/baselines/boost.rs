//! Least-squares gradient boosting over depth-bounded CART trees.
//!
//! Plain first-order boosting: no second-order terms, no leaf-weight penalty.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub tree: TreeConfig,
    /// Stop once training MAE has not improved for this many rounds.
    pub early_stop_rounds: Option<usize>,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            n_rounds: 100,
            learning_rate: 0.1,
            tree: TreeConfig::default().with_max_depth(3),
            early_stop_rounds: None,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_rounds == 0 {
            return Err(Error::InvalidParameter("n_rounds must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if self.early_stop_rounds == Some(0) {
            return Err(Error::InvalidParameter(
                "early_stop_rounds must be >= 1".into(),
            ));
        }
        self.tree.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientBoosting {
    base_score: f64,
    learning_rate: f64,
    trees: Vec<RegressionTree>,
    train_mae: Vec<f64>,
}

fn mean_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, t)| (p - t).abs()).sum::<f64>() / a.len() as f64
}

impl GradientBoosting {
    pub fn fit(x: ArrayView2<f64>, y: &[f64], cfg: &BoostConfig) -> Result<Self> {
        cfg.validate()?;
        if y.is_empty() {
            return Err(Error::Empty("training set"));
        }
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.nrows(),
            });
        }
        let base_score = y.iter().sum::<f64>() / y.len() as f64;
        let mut fitted = vec![base_score; y.len()];
        let mut trees = Vec::with_capacity(cfg.n_rounds);
        let mut train_mae = vec![mean_abs(&fitted, y)];
        let (mut best, mut best_round, mut stale) = (train_mae[0], 0usize, 0usize);

        let mut residual = vec![0.0; y.len()];
        for round in 1..=cfg.n_rounds {
            for ((r, t), f) in residual.iter_mut().zip(y).zip(&fitted) {
                *r = t - f;
            }
            let tree = RegressionTree::fit(x, &residual, &cfg.tree)?;
            for (f, step) in fitted.iter_mut().zip(tree.predict(x)) {
                *f += cfg.learning_rate * step;
            }
            trees.push(tree);
            let mae = mean_abs(&fitted, y);
            train_mae.push(mae);

            if let Some(patience) = cfg.early_stop_rounds {
                if mae < best {
                    (best, best_round, stale) = (mae, round, 0);
                } else {
                    stale += 1;
                    if stale >= patience {
                        trees.truncate(best_round);
                        train_mae.truncate(best_round + 1);
                        break;
                    }
                }
            }
        }
        Ok(GradientBoosting {
            base_score,
            learning_rate: cfg.learning_rate,
            trees,
            train_mae,
        })
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let mut out = vec![self.base_score; x.nrows()];
        for tree in &self.trees {
            for (o, step) in out.iter_mut().zip(tree.predict(x)) {
                *o += self.learning_rate * step;
            }
        }
        out
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn n_rounds(&self) -> usize {
        self.trees.len()
    }

    /// Training MAE before the first round and after each kept round.
    pub fn train_mae(&self) -> &[f64] {
        &self.train_mae
    }
}

/// Convenience for tests: training-set predictions after every round.
pub fn staged_predictions(model: &GradientBoosting, x: ArrayView2<f64>) -> Array2<f64> {
    let mut stages = Array2::zeros((model.trees.len() + 1, x.nrows()));
    let mut current = vec![model.base_score; x.nrows()];
    stages
        .row_mut(0)
        .assign(&ndarray::ArrayView1::from(&current));
    for (i, tree) in model.trees.iter().enumerate() {
        for (c, step) in current.iter_mut().zip(tree.predict(x)) {
            *c += model.learning_rate * step;
        }
        stages
            .row_mut(i + 1)
            .assign(&ndarray::ArrayView1::from(&current));
    }
    stages
}
