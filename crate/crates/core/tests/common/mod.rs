#![allow(dead_code)]

use kappareg::{Dataset, FeatureKind};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct transcription of the published pseudocode: plain loops, `powf`
/// weights, no grouping of repeated values and no rescaling. Only the
/// constant-column and unseen-category cases are filled in.
#[allow(clippy::needless_range_loop)]
pub fn naive_predict(train: &Dataset, test: &Dataset, kappa1: f64, kappa2: f64) -> Vec<f64> {
    let n_train = train.n_samples();
    let n_test = test.n_samples();
    let n_features = train.n_features();
    let y = &train.targets;
    let mut xtr = train.features.clone();
    let mut xte = test.features.clone();

    for f in 0..n_features {
        if train.kinds[f] != FeatureKind::Ordinal {
            continue;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n_train {
            lo = lo.min(xtr[[j, f]]);
            hi = hi.max(xtr[[j, f]]);
        }
        let width = hi - lo;
        for j in 0..n_train {
            xtr[[j, f]] = if width == 0.0 {
                0.0
            } else {
                xtr[[j, f]] / width
            };
        }
        for i in 0..n_test {
            xte[[i, f]] = if width == 0.0 {
                0.0
            } else {
                xte[[i, f]] / width
            };
        }
    }

    let global = y.iter().sum::<f64>() / n_train as f64;
    for f in 0..n_features {
        if train.kinds[f] != FeatureKind::Categorical {
            continue;
        }
        let category_mean = |v: f64| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for j in 0..n_train {
                if train.features[[j, f]] == v {
                    sum += y[j];
                    count += 1;
                }
            }
            if count == 0 {
                global
            } else {
                sum / count as f64
            }
        };
        for j in 0..n_train {
            xtr[[j, f]] = category_mean(train.features[[j, f]]);
        }
        for i in 0..n_test {
            xte[[i, f]] = category_mean(test.features[[i, f]]);
        }
    }

    for f in 0..n_features {
        if train.kinds[f] != FeatureKind::Ordinal {
            continue;
        }
        let column: Vec<f64> = (0..n_train).map(|j| xtr[[j, f]]).collect();
        let imputed = |v: f64| {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n_train {
                let w = 1.0 / (1.0 + (v - column[j]).abs()).powf(kappa1);
                num += w * y[j];
                den += w;
            }
            num / den
        };
        for j in 0..n_train {
            xtr[[j, f]] = imputed(xtr[[j, f]]);
        }
        for i in 0..n_test {
            xte[[i, f]] = imputed(xte[[i, f]]);
        }
    }

    let mut d = Array2::<f64>::zeros((n_test, n_train));
    for i in 0..n_test {
        for j in 0..n_train {
            let mut sq = 0.0;
            for f in 0..n_features {
                sq += (xte[[i, f]] - xtr[[j, f]]).powi(2);
            }
            d[[i, j]] = sq.sqrt();
        }
    }

    (0..n_test)
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n_train {
                let w = 1.0 / (1.0 + d[[i, j]]).powf(kappa2);
                num += w * y[j];
                den += w;
            }
            num / den
        })
        .collect()
}

/// Random mixed-type train/test pair. Ordinal values are rounded so repeats
/// occur; categorical codes in the test part may be unseen in training.
pub fn random_pair(
    rng: &mut ChaCha8Rng,
    max_rows: usize,
    max_features: usize,
) -> (Dataset, Dataset) {
    let n_train = rng.random_range(2..=max_rows);
    let n_test = rng.random_range(1..=max_rows.min(40));
    let n_features = rng.random_range(1..=max_features);
    let kinds: Vec<FeatureKind> = (0..n_features)
        .map(|_| {
            if rng.random_bool(0.3) {
                FeatureKind::Categorical
            } else {
                FeatureKind::Ordinal
            }
        })
        .collect();
    let scales: Vec<f64> = (0..n_features)
        .map(|_| 10f64.powf(rng.random_range(-1.0..3.0)))
        .collect();
    let draw = |n: usize, rng: &mut ChaCha8Rng, extra_category: u32| {
        Array2::from_shape_fn((n, n_features), |(_, f)| match kinds[f] {
            FeatureKind::Categorical => f64::from(rng.random_range(0..4 + extra_category)),
            FeatureKind::Ordinal => {
                (rng.random_range(0.0..1.0f64) * 20.0).round() / 20.0 * scales[f] + scales[f]
            }
        })
    };
    let xtr = draw(n_train, rng, 0);
    let xte = draw(n_test, rng, 1);
    let ytr: Vec<f64> = (0..n_train).map(|_| rng.random_range(-5.0..10.0)).collect();
    let yte: Vec<f64> = (0..n_test).map(|_| rng.random_range(-5.0..10.0)).collect();
    (
        Dataset::new("train", xtr, ytr, kinds.clone()).unwrap(),
        Dataset::new("test", xte, yte, kinds).unwrap(),
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Load a built-in dataset from the configured data directory, or `None`
/// (with a note on stderr) when the file is absent.
pub fn try_builtin(name: &str) -> Option<Dataset> {
    let dir = kappareg::builtin::data_dir(None);
    let dir = if dir.is_relative() {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../..")
            .join(dir)
    } else {
        dir
    };
    let spec = kappareg::builtin::lookup(name)
        .unwrap()
        .spec()
        .resolved(&dir);
    if !spec.source_path.exists() {
        eprintln!("note: {} not found, skipping", spec.source_path.display());
        return None;
    }
    let mut ds = kappareg::load_dataset(&spec).unwrap();
    ds.name = name.to_string();
    Some(ds)
}
