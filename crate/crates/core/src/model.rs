use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    BoostConfig, ForestConfig, GradientBoosting, KnnConfig, KnnRegressor, RandomForest,
    RegressionTree, TreeConfig,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kappa::{self, KappaParams, NormalizationScope};

/// Model kind without its configuration, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Proposed,
    Knn,
    Tree,
    Forest,
    Boost,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Proposed,
        ModelKind::Knn,
        ModelKind::Tree,
        ModelKind::Forest,
        ModelKind::Boost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Proposed => "proposed",
            ModelKind::Knn => "knn",
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
            ModelKind::Boost => "boost",
        }
    }

    /// Whether predictions are guaranteed to stay inside the training target range.
    pub fn is_convex(self) -> bool {
        !matches!(self, ModelKind::Boost)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "proposed" | "kappa" => ModelKind::Proposed,
            "knn" | "k-nn" => ModelKind::Knn,
            "tree" | "dt" | "cart" | "decision-tree" => ModelKind::Tree,
            "forest" | "rf" | "random-forest" => ModelKind::Forest,
            "boost" | "gb" | "xgboost" | "gradient-boosting" => ModelKind::Boost,
            _ => return Err(Error::UnknownModel(s.to_string())),
        };
        Ok(kind)
    }
}

/// A model kind together with everything needed to fit it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Proposed {
        params: KappaParams,
        #[serde(default)]
        scope: NormalizationScope,
    },
    Knn(KnnConfig),
    Tree(TreeConfig),
    Forest(ForestConfig),
    Boost(BoostConfig),
}

impl ModelSpec {
    pub fn proposed(kappa1: f64, kappa2: f64) -> Result<Self> {
        Ok(ModelSpec::Proposed {
            params: KappaParams::new(kappa1, kappa2)?,
            scope: NormalizationScope::TrainOnly,
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Proposed { .. } => ModelKind::Proposed,
            ModelSpec::Knn(_) => ModelKind::Knn,
            ModelSpec::Tree(_) => ModelKind::Tree,
            ModelSpec::Forest(_) => ModelKind::Forest,
            ModelSpec::Boost(_) => ModelKind::Boost,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn kappa(&self) -> Option<KappaParams> {
        match self {
            ModelSpec::Proposed { params, .. } => Some(*params),
            _ => None,
        }
    }

    /// Fit on `train` and predict every row of `test`.
    pub fn fit_predict(&self, train: &Dataset, test: &Dataset) -> Result<Vec<f64>> {
        let (x, y, q) = (
            train.features.view(),
            &train.targets[..],
            test.features.view(),
        );
        match self {
            ModelSpec::Proposed { params, scope } => {
                kappa::fit_predict_with(train, test, *params, *scope)
            }
            ModelSpec::Knn(cfg) => Ok(KnnRegressor::fit(x, y, cfg)?.predict(q)),
            ModelSpec::Tree(cfg) => Ok(RegressionTree::fit(x, y, cfg)?.predict(q)),
            ModelSpec::Forest(cfg) => Ok(RandomForest::fit(x, y, cfg)?.predict(q)),
            ModelSpec::Boost(cfg) => Ok(GradientBoosting::fit(x, y, cfg)?.predict(q)),
        }
    }
}
