use std::cmp::Ordering;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 5 }
    }
}

/// Brute-force k-nearest-neighbour regressor (unweighted mean of the k
/// nearest training targets, Euclidean distance, ties to the lower row index).
#[derive(Debug, Clone, PartialEq)]
pub struct KnnRegressor {
    x: Array2<f64>,
    y: Vec<f64>,
    k: usize,
}

impl KnnRegressor {
    pub fn fit(x: ArrayView2<f64>, y: &[f64], cfg: &KnnConfig) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.nrows(),
            });
        }
        if cfg.k == 0 || cfg.k > y.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {} out of range for {} training rows",
                cfg.k,
                y.len()
            )));
        }
        Ok(KnnRegressor {
            x: x.to_owned(),
            y: y.to_vec(),
            k: cfg.k,
        })
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<f64> {
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(self.y.len());
        let by_distance_then_index =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        x.axis_iter(Axis(0))
            .map(|query| {
                scored.clear();
                scored.extend(self.x.axis_iter(Axis(0)).enumerate().map(|(j, row)| {
                    let sq: f64 = row
                        .iter()
                        .zip(query.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (sq, j)
                }));
                if self.k < scored.len() {
                    scored.select_nth_unstable_by(self.k - 1, by_distance_then_index);
                }
                let nearest = &scored[..self.k];
                nearest.iter().map(|&(_, j)| self.y[j]).sum::<f64>() / self.k as f64
            })
            .collect()
    }
}

/// Indices of the k nearest rows, for inspection and tests.
pub fn nearest_indices(train: ArrayView2<f64>, query: &[f64], k: usize) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = train
        .axis_iter(Axis(0))
        .enumerate()
        .map(|(j, row)| {
            (
                row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum(),
                j,
            )
        })
        .collect();
    scored.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        other => other,
    });
    scored.into_iter().take(k).map(|(_, j)| j).collect()
}
