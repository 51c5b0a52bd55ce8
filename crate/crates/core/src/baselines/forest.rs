//! Bagged CART ensemble.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub bootstrap_seed: u64,
    /// Fraction of features drawn (without replacement) for each tree.
    pub feature_subsample: f64,
    /// Resample rows with replacement; off turns every tree into a plain CART.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            tree: TreeConfig::default(),
            bootstrap_seed: 0,
            feature_subsample: 1.0,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
        }
        if !(self.feature_subsample > 0.0 && self.feature_subsample <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "feature_subsample must be in (0, 1], got {}",
                self.feature_subsample
            )));
        }
        self.tree.validate()
    }

    fn n_features_per_tree(&self, n_features: usize) -> usize {
        ((self.feature_subsample * n_features as f64).ceil() as usize).clamp(1, n_features)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
}

/// Rows and features for tree `index`. Each tree draws from its own ChaCha
/// stream, so trees can be fitted in any order.
fn draw(
    cfg: &ForestConfig,
    index: usize,
    n_rows: usize,
    n_features: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.bootstrap_seed);
    rng.set_stream(index as u64);
    let rows = if cfg.bootstrap {
        (0..n_rows).map(|_| rng.random_range(0..n_rows)).collect()
    } else {
        (0..n_rows).collect()
    };
    let m = cfg.n_features_per_tree(n_features);
    let features = if m == n_features {
        (0..n_features).collect()
    } else {
        let mut picked = sample(&mut rng, n_features, m).into_vec();
        picked.sort_unstable();
        picked
    };
    (rows, features)
}

impl RandomForest {
    pub fn fit(x: ArrayView2<f64>, y: &[f64], cfg: &ForestConfig) -> Result<Self> {
        cfg.validate()?;
        if y.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let fit_one = |index: usize| {
            let (rows, features) = draw(cfg, index, x.nrows(), x.ncols());
            RegressionTree::fit_rows(x, y, &rows, &features, &cfg.tree)
        };
        #[cfg(feature = "parallel")]
        let trees = {
            use rayon::prelude::*;
            (0..cfg.n_trees)
                .into_par_iter()
                .map(fit_one)
                .collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let trees = (0..cfg.n_trees).map(fit_one).collect::<Result<Vec<_>>>()?;
        Ok(RandomForest { trees })
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let mut sums = vec![0.0; x.nrows()];
        for tree in &self.trees {
            for (sum, p) in sums.iter_mut().zip(tree.predict(x)) {
                *sum += p;
            }
        }
        let n = self.trees.len() as f64;
        sums.into_iter().map(|s| s / n).collect()
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }
}
