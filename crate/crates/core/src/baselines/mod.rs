//! Reference regressors the proposed model is compared against. All of them
//! consume categorical features as their integer codes.

pub mod boost;
pub mod forest;
pub mod knn;
pub mod tree;

pub use boost::{BoostConfig, GradientBoosting};
pub use forest::{ForestConfig, RandomForest};
pub use knn::{KnnConfig, KnnRegressor};
pub use tree::{RegressionTree, TreeConfig};

use ndarray::ArrayView2;

use crate::error::Result;

/// Any fitted baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Knn(KnnRegressor),
    Tree(RegressionTree),
    Forest(RandomForest),
    Boost(GradientBoosting),
}

impl FittedModel {
    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<f64> {
        match self {
            FittedModel::Knn(m) => m.predict(x),
            FittedModel::Tree(m) => m.predict(x),
            FittedModel::Forest(m) => m.predict(x),
            FittedModel::Boost(m) => m.predict(x),
        }
    }
}

pub fn knn_fit(x: ArrayView2<f64>, y: &[f64], cfg: &KnnConfig) -> Result<FittedModel> {
    KnnRegressor::fit(x, y, cfg).map(FittedModel::Knn)
}

pub fn tree_fit(x: ArrayView2<f64>, y: &[f64], cfg: &TreeConfig) -> Result<FittedModel> {
    RegressionTree::fit(x, y, cfg).map(FittedModel::Tree)
}

pub fn forest_fit(x: ArrayView2<f64>, y: &[f64], cfg: &ForestConfig) -> Result<FittedModel> {
    RandomForest::fit(x, y, cfg).map(FittedModel::Forest)
}

pub fn boost_fit(x: ArrayView2<f64>, y: &[f64], cfg: &BoostConfig) -> Result<FittedModel> {
    GradientBoosting::fit(x, y, cfg).map(FittedModel::Boost)
}
