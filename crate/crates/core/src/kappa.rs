//! Distance-weighted all-samples regression.
//!
//! Every feature is first re-expressed in target units:
//!
//! 1. ordinal columns are divided by their training range `max - min`;
//! 2. each categorical value `v` becomes the mean training target of the rows
//!    where the feature equals `v` (unseen test categories get the global mean);
//! 3. each unique normalized ordinal value `v` (from train and test) becomes the
//!    weighted mean of all training targets, weights `1 / (1 + |v - x_j|)^κ₁`.
//!
//! A test row is then predicted as the weighted mean of all training targets
//! with weights `1 / (1 + d)^κ₂`, where `d` is the Euclidean distance between
//! encoded rows.
//!
//! Both weighted means are convex combinations, so every encoded entry and
//! every prediction lies within `[min(y_train), max(y_train)]`.

use std::cmp::Ordering;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::{range, Dataset, FeatureKind};
use crate::error::{Error, Result};

/// Decay exponents for imputation (`kappa1`) and prediction (`kappa2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaParams {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl KappaParams {
    /// `kappa1 > 0`, `kappa2 >= 0`. `kappa2 = 0` reduces prediction to the
    /// unweighted training mean and is only useful as a diagnostic.
    pub fn new(kappa1: f64, kappa2: f64) -> Result<Self> {
        if !(kappa1.is_finite() && kappa1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa1 must be > 0, got {kappa1}"
            )));
        }
        if !(kappa2.is_finite() && kappa2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa2 must be >= 0, got {kappa2}"
            )));
        }
        Ok(KappaParams { kappa1, kappa2 })
    }
}

/// Which rows define the ordinal normalization range.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationScope {
    /// Training rows only; test rows reuse the training divisor.
    #[default]
    TrainOnly,
    /// Training and test rows together.
    Pooled,
}

/// Per-column `max - min`; `None` for categorical columns.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    pub ranges: Vec<Option<f64>>,
}

impl NormalizationStats {
    pub fn is_constant(&self, column: usize) -> bool {
        self.ranges[column] == Some(0.0)
    }
}

/// Target means per categorical value, plus the global fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMeans {
    /// For each column: `(category code, mean target)` sorted by code, or
    /// `None` when the column is ordinal.
    pub means: Vec<Option<Vec<(f64, f64)>>>,
    pub global_mean: f64,
}

impl CategoryMeans {
    pub fn get(&self, column: usize, code: f64) -> Option<f64> {
        let table = self.means[column].as_ref()?;
        table
            .binary_search_by(|(c, _)| c.total_cmp(&code))
            .ok()
            .map(|i| table[i].1)
    }

    /// Encoded value for `code`, falling back to the global mean.
    pub fn encode(&self, column: usize, code: f64) -> f64 {
        self.get(column, code).unwrap_or(self.global_mean)
    }
}

/// Train and test features after encoding, all in target units.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub train: Array2<f64>,
    pub test: Array2<f64>,
    /// Columns that enter the distance, in order.
    pub feature_set: Vec<usize>,
}

impl EncodedMatrix {
    /// Every entry finite and inside `[lo, hi]` up to rounding.
    pub fn check_bounds(&self, lo: f64, hi: f64) -> Result<()> {
        let eps = bound_slack(lo, hi);
        for &value in self.train.iter().chain(self.test.iter()) {
            if !value.is_finite() || value < lo - eps || value > hi + eps {
                return Err(Error::BoundViolation {
                    value,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn bound_slack(lo: f64, hi: f64) -> f64 {
    1e-9 * lo.abs().max(hi.abs()).max(1.0)
}

/// `d[i, j]`: Euclidean distance from test row `i` to training row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub d: Array2<f64>,
}

impl DistanceMatrix {
    pub fn n_test(&self) -> usize {
        self.d.nrows()
    }

    pub fn n_train(&self) -> usize {
        self.d.ncols()
    }
}

fn check_shapes(
    train: ArrayView2<f64>,
    test: ArrayView2<f64>,
    kinds: &[FeatureKind],
) -> Result<()> {
    if train.ncols() != kinds.len() || test.ncols() != kinds.len() {
        return Err(Error::LengthMismatch {
            left: train.ncols().max(test.ncols()),
            right: kinds.len(),
        });
    }
    Ok(())
}

pub fn normalize_ordinals(
    train: ArrayView2<f64>,
    test: ArrayView2<f64>,
    kinds: &[FeatureKind],
    scope: NormalizationScope,
) -> Result<(Array2<f64>, Array2<f64>, NormalizationStats)> {
    check_shapes(train, test, kinds)?;
    if train.nrows() == 0 {
        return Err(Error::Empty("training set"));
    }
    let mut train = train.to_owned();
    let mut test = test.to_owned();
    let mut ranges = Vec::with_capacity(kinds.len());

    for (f, kind) in kinds.iter().enumerate() {
        if *kind == FeatureKind::Categorical {
            ranges.push(None);
            continue;
        }
        let values: Vec<f64> = match scope {
            NormalizationScope::TrainOnly => train.column(f).to_vec(),
            NormalizationScope::Pooled => train
                .column(f)
                .iter()
                .chain(test.column(f))
                .copied()
                .collect(),
        };
        let (lo, hi) = range(&values).expect("training set is non-empty");
        let spread = hi - lo;
        ranges.push(Some(spread));
        for matrix in [&mut train, &mut test] {
            matrix
                .column_mut(f)
                .mapv_inplace(|x| if spread == 0.0 { 0.0 } else { x / spread });
        }
    }
    Ok((train, test, NormalizationStats { ranges }))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn encode_categoricals(
    train: ArrayView2<f64>,
    test: ArrayView2<f64>,
    kinds: &[FeatureKind],
    y_train: &[f64],
) -> Result<(Array2<f64>, Array2<f64>, CategoryMeans)> {
    check_shapes(train, test, kinds)?;
    if y_train.len() != train.nrows() {
        return Err(Error::LengthMismatch {
            left: y_train.len(),
            right: train.nrows(),
        });
    }
    if y_train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let mut train = train.to_owned();
    let mut test = test.to_owned();
    let mut means = Vec::with_capacity(kinds.len());
    let global_mean = mean(y_train);

    for (f, kind) in kinds.iter().enumerate() {
        if *kind == FeatureKind::Ordinal {
            means.push(None);
            continue;
        }
        // (code, sum, count), sorted by code.
        let mut pairs: Vec<(f64, f64)> = train
            .column(f)
            .iter()
            .copied()
            .zip(y_train.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut table: Vec<(f64, f64)> = Vec::new();
        let mut start = 0;
        while start < pairs.len() {
            let code = pairs[start].0;
            let end = start
                + pairs[start..]
                    .iter()
                    .take_while(|p| p.0.total_cmp(&code) == Ordering::Equal)
                    .count();
            let group: Vec<f64> = pairs[start..end].iter().map(|p| p.1).collect();
            table.push((code, mean(&group)));
            start = end;
        }
        means.push(Some(table));
    }

    let category_means = CategoryMeans { means, global_mean };
    for (f, kind) in kinds.iter().enumerate() {
        if *kind == FeatureKind::Categorical {
            for matrix in [&mut train, &mut test] {
                matrix
                    .column_mut(f)
                    .mapv_inplace(|code| category_means.encode(f, code));
            }
        }
    }
    Ok((train, test, category_means))
}

/// Replace every ordinal value by its κ₁-weighted mean training target.
///
/// Weights depend only on `|v - x_j|`, so training rows sharing a value are
/// aggregated first and each unique value (train or test) is evaluated once:
/// `O(u_all * u_train)` per feature.
pub fn impute_ordinal_means(
    train: ArrayView2<f64>,
    test: ArrayView2<f64>,
    kinds: &[FeatureKind],
    y_train: &[f64],
    kappa1: f64,
) -> Result<(Array2<f64>, Array2<f64>)> {
    check_shapes(train, test, kinds)?;
    if y_train.len() != train.nrows() {
        return Err(Error::LengthMismatch {
            left: y_train.len(),
            right: train.nrows(),
        });
    }
    if y_train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if !(kappa1.is_finite() && kappa1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa1 must be > 0, got {kappa1}"
        )));
    }
    let mut train = train.to_owned();
    let mut test = test.to_owned();

    for (f, kind) in kinds.iter().enumerate() {
        if *kind == FeatureKind::Categorical {
            continue;
        }
        // Training values grouped: (value, Σy, count).
        let mut pairs: Vec<(f64, f64)> = train
            .column(f)
            .iter()
            .copied()
            .zip(y_train.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut groups: Vec<(f64, f64, f64)> = Vec::new();
        for (value, y) in pairs {
            match groups.last_mut() {
                Some(last) if last.0 == value => {
                    last.1 += y;
                    last.2 += 1.0;
                }
                _ => groups.push((value, y, 1.0)),
            }
        }

        let mut uniques: Vec<f64> = train
            .column(f)
            .iter()
            .chain(test.column(f))
            .copied()
            .collect();
        uniques.sort_by(f64::total_cmp);
        uniques.dedup();

        let imputed: Vec<f64> = uniques
            .iter()
            .map(|&v| {
                let (mut num, mut den) = (0.0, 0.0);
                for &(x, sum_y, count) in &groups {
                    let w = (1.0 + (v - x).abs()).powf(-kappa1);
                    num += w * sum_y;
                    den += w * count;
                }
                num / den
            })
            .collect();

        let lookup = |v: f64| {
            let i = uniques
                .binary_search_by(|u| u.total_cmp(&v))
                .expect("every value was collected into uniques");
            imputed[i]
        };
        for matrix in [&mut train, &mut test] {
            matrix.column_mut(f).mapv_inplace(lookup);
        }
    }
    Ok((train, test))
}

/// Full encoding of a train/test pair with imputation exponent `kappa1`.
pub fn encode(
    train: &Dataset,
    test: &Dataset,
    kappa1: f64,
    scope: NormalizationScope,
) -> Result<EncodedMatrix> {
    if train.kinds != test.kinds {
        return Err(Error::InvalidParameter(
            "train and test schemas differ".into(),
        ));
    }
    let kinds = &train.kinds;
    let y = &train.targets;
    let (tr, te, _) =
        normalize_ordinals(train.features.view(), test.features.view(), kinds, scope)?;
    let (tr, te, _) = encode_categoricals(tr.view(), te.view(), kinds, y)?;
    let (tr, te) = impute_ordinal_means(tr.view(), te.view(), kinds, y, kappa1)?;
    let encoded = EncodedMatrix {
        train: tr,
        test: te,
        feature_set: (0..kinds.len()).collect(),
    };
    let (lo, hi) = range(y).expect("training set is non-empty");
    encoded.check_bounds(lo, hi)?;
    Ok(encoded)
}

pub fn distance_matrix(encoded: &EncodedMatrix) -> DistanceMatrix {
    let train = encoded.train.view();
    let test = encoded.test.view();
    let mut d = Array2::zeros((test.nrows(), train.nrows()));
    for (i, query) in test.axis_iter(Axis(0)).enumerate() {
        for (j, row) in train.axis_iter(Axis(0)).enumerate() {
            let sq: f64 = encoded
                .feature_set
                .iter()
                .map(|&f| {
                    let delta = query[f] - row[f];
                    delta * delta
                })
                .sum();
            d[[i, j]] = sq.sqrt();
        }
    }
    DistanceMatrix { d }
}

/// Weighted mean of `y_train` per test row, weights `(1 + d)^-κ₂`.
///
/// Weights are rescaled by the weight of the nearest training row before
/// summing, which leaves the ratio unchanged and keeps large κ₂ from
/// underflowing every weight to zero.
pub fn predict(distances: &DistanceMatrix, y_train: &[f64], kappa2: f64) -> Result<Vec<f64>> {
    if y_train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if distances.n_train() != y_train.len() {
        return Err(Error::LengthMismatch {
            left: distances.n_train(),
            right: y_train.len(),
        });
    }
    if !(kappa2.is_finite() && kappa2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa2 must be >= 0, got {kappa2}"
        )));
    }
    let mut log_d = vec![0.0; y_train.len()];
    let predictions = distances
        .d
        .axis_iter(Axis(0))
        .map(|row| {
            for (slot, &d) in log_d.iter_mut().zip(row) {
                *slot = d.ln_1p();
            }
            let nearest = log_d.iter().copied().fold(f64::INFINITY, f64::min);
            let (mut num, mut den) = (0.0, 0.0);
            for (&l, &y) in log_d.iter().zip(y_train) {
                let w = (-kappa2 * (l - nearest)).exp();
                num += w * y;
                den += w;
            }
            num / den
        })
        .collect();
    Ok(predictions)
}

pub fn fit_predict(train: &Dataset, test: &Dataset, params: KappaParams) -> Result<Vec<f64>> {
    fit_predict_with(train, test, params, NormalizationScope::TrainOnly)
}

pub fn fit_predict_with(
    train: &Dataset,
    test: &Dataset,
    params: KappaParams,
    scope: NormalizationScope,
) -> Result<Vec<f64>> {
    let encoded = encode(train, test, params.kappa1, scope)?;
    predict(&distance_matrix(&encoded), &train.targets, params.kappa2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    const ORD: FeatureKind = FeatureKind::Ordinal;
    const CAT: FeatureKind = FeatureKind::Categorical;

    #[test]
    fn normalization_divides_by_range() {
        let train = array![[10.0], [20.0], [30.0]];
        let test = array![[40.0]];
        let (tr, te, stats) = normalize_ordinals(
            train.view(),
            test.view(),
            &[ORD],
            NormalizationScope::TrainOnly,
        )
        .unwrap();
        assert_eq!(tr.column(0).to_vec(), vec![0.5, 1.0, 1.5]);
        assert_eq!(te[[0, 0]], 2.0);
        assert_eq!(stats.ranges, vec![Some(20.0)]);
    }

    #[test]
    fn constant_feature_becomes_zero() {
        let train = array![[5.0], [5.0], [5.0]];
        let test = array![[9.0]];
        let (tr, te, stats) = normalize_ordinals(
            train.view(),
            test.view(),
            &[ORD],
            NormalizationScope::TrainOnly,
        )
        .unwrap();
        assert!(tr.iter().chain(te.iter()).all(|&v| v == 0.0));
        assert!(stats.is_constant(0));
    }

    #[test]
    fn pooled_scope_uses_test_rows() {
        let train = array![[10.0], [20.0]];
        let test = array![[50.0]];
        let (tr, _, stats) = normalize_ordinals(
            train.view(),
            test.view(),
            &[ORD],
            NormalizationScope::Pooled,
        )
        .unwrap();
        assert_eq!(stats.ranges, vec![Some(40.0)]);
        assert_eq!(tr[[0, 0]], 0.25);
    }

    #[test]
    fn categorical_columns_skip_normalization() {
        let train = array![[3.0, 100.0], [7.0, 300.0]];
        let (tr, _, stats) = normalize_ordinals(
            train.view(),
            train.view(),
            &[CAT, ORD],
            NormalizationScope::TrainOnly,
        )
        .unwrap();
        assert_eq!(tr.column(0).to_vec(), vec![3.0, 7.0]);
        assert_eq!(stats.ranges, vec![None, Some(200.0)]);
    }

    #[test]
    fn gender_means() {
        // F = 0, M = 1
        let train = array![[0.0], [0.0], [1.0]];
        let test = array![[1.0], [0.0]];
        let (tr, te, means) =
            encode_categoricals(train.view(), test.view(), &[CAT], &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(tr.column(0).to_vec(), vec![3.0, 3.0, 6.0]);
        assert_eq!(te.column(0).to_vec(), vec![6.0, 3.0]);
        assert_eq!(means.get(0, 0.0), Some(3.0));
        assert_eq!((te[[0, 0]] - te[[1, 0]]).abs(), 3.0);
    }

    #[test]
    fn single_category_encodes_to_global_mean() {
        let train = array![[4.0], [4.0], [4.0]];
        let (tr, _, _) =
            encode_categoricals(train.view(), train.view(), &[CAT], &[1.0, 2.0, 6.0]).unwrap();
        assert!(tr.iter().all(|&v| v == 3.0));
    }

    #[test]
    fn unseen_category_falls_back_to_global_mean() {
        let train = array![[0.0], [1.0], [1.0]];
        let test = array![[9.0]];
        let (_, te, means) =
            encode_categoricals(train.view(), test.view(), &[CAT], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(te[[0, 0]], 2.0);
        assert_eq!(means.get(0, 9.0), None);
    }

    #[test]
    fn imputed_mean_by_hand() {
        // value 0: weights [1, 1/2] -> (0 + 10 * 0.5) / 1.5
        let train = array![[0.0], [1.0]];
        let test = array![[0.0]];
        let (_, te) =
            impute_ordinal_means(train.view(), test.view(), &[ORD], &[0.0, 10.0], 1.0).unwrap();
        assert!((te[[0, 0]] - 10.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn large_kappa1_picks_exact_matches() {
        let train = array![[0.0], [0.0], [1.0], [2.0]];
        let test = array![[0.0]];
        let y = [2.0, 4.0, 100.0, 100.0];
        let (_, te) = impute_ordinal_means(train.view(), test.view(), &[ORD], &y, 50.0).unwrap();
        assert!((te[[0, 0]] - 3.0).abs() < 1e-11);
    }

    #[test]
    fn identical_values_impute_to_mean() {
        let train = array![[0.5], [0.5], [0.5]];
        let (tr, _) =
            impute_ordinal_means(train.view(), train.view(), &[ORD], &[1.0, 2.0, 9.0], 3.0)
                .unwrap();
        assert!(tr.iter().all(|&v| (v - 4.0).abs() < 1e-15));
    }

    #[test]
    fn imputation_rejects_non_positive_kappa() {
        let train = array![[0.0]];
        assert!(impute_ordinal_means(train.view(), train.view(), &[ORD], &[1.0], 0.0).is_err());
    }

    fn distances(rows: Vec<Vec<f64>>) -> DistanceMatrix {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.concat();
        DistanceMatrix {
            d: Array2::from_shape_vec((flat.len() / n, n), flat).unwrap(),
        }
    }

    #[test]
    fn euclidean_distances() {
        let enc = EncodedMatrix {
            train: array![[3.0, 0.0], [0.0, 0.0], [3.0, 4.0]],
            test: array![[0.0, 0.0]],
            feature_set: vec![0, 1],
        };
        let d = distance_matrix(&enc);
        assert_eq!(d.d.row(0).to_vec(), vec![3.0, 0.0, 5.0]);
    }

    #[test]
    fn zero_kappa2_is_unweighted_mean() {
        let d = distances(vec![vec![0.3, 7.0, 123.0]]);
        assert_eq!(predict(&d, &[1.0, 3.0, 5.0], 0.0).unwrap(), vec![3.0]);
    }

    #[test]
    fn large_kappa2_is_dominated_by_nearest() {
        let d = distances(vec![vec![0.0, 1.0]]);
        let p = predict(&d, &[0.0, 10.0], 50.0).unwrap()[0];
        assert!(p.abs() < 1e-10, "{p}");
    }

    #[test]
    fn prediction_by_hand() {
        // weights [1/2, 1/3] -> (2/2 + 6/3) / (5/6) = 3.6
        let d = distances(vec![vec![1.0, 2.0]]);
        let p = predict(&d, &[2.0, 6.0], 1.0).unwrap()[0];
        assert!((p - 3.6).abs() < 1e-14, "{p}");
    }

    #[test]
    fn huge_distances_do_not_underflow() {
        let d = distances(vec![vec![1e9, 2e9]]);
        let p = predict(&d, &[1.0, 2.0], 50.0).unwrap()[0];
        assert!(p.is_finite());
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn predict_errors() {
        let d = distances(vec![vec![1.0, 2.0]]);
        assert!(matches!(
            predict(&d, &[1.0], 1.0),
            Err(Error::LengthMismatch { .. })
        ));
        let empty = DistanceMatrix {
            d: Array2::zeros((1, 0)),
        };
        assert!(matches!(predict(&empty, &[], 1.0), Err(Error::Empty(_))));
    }

    #[test]
    fn params_validation() {
        assert!(KappaParams::new(1.0, 0.0).is_ok());
        assert!(KappaParams::new(0.0, 1.0).is_err());
        assert!(KappaParams::new(1.0, -1.0).is_err());
        assert!(KappaParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn duplicate_training_row_is_recovered() {
        let rows = vec![vec![1.0, 10.0], vec![2.0, 20.0], vec![3.0, 35.0]];
        let train = Dataset::from_rows("t", &rows, vec![1.0, 5.0, 9.0]).unwrap();
        let test = Dataset::from_rows("t", &rows[1..2], vec![0.0]).unwrap();
        let p = fit_predict(&train, &test, KappaParams::new(8.0, 60.0).unwrap()).unwrap();
        assert!((p[0] - 5.0).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn constant_targets_predict_constant() {
        let rows = vec![vec![1.0, 3.0], vec![2.0, 1.0], vec![7.0, 2.0]];
        let train = Dataset::from_rows("t", &rows, vec![4.5; 3]).unwrap();
        let test = Dataset::from_rows("t", &[vec![100.0, -3.0]], vec![0.0]).unwrap();
        for (k1, k2) in [(0.5, 0.5), (3.0, 20.0), (50.0, 50.0)] {
            let p = fit_predict(&train, &test, KappaParams::new(k1, k2).unwrap()).unwrap();
            assert!((p[0] - 4.5).abs() < 1e-12);
        }
    }
}
