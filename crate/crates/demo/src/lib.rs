//! Browser bindings for the static page in `web/`.
//!
//! Three operations: the weight kernel for a given κ, a 1-D fit drawn as a
//! curve, and cross-validated MAE against κ₂ on a pasted CSV.

use kappareg::dataset::{parse_dataset, DatasetSpec};
use kappareg::evaluation::{kappa_curve, CvOptions};
use kappareg::kappa::{fit_predict, KappaParams, NormalizationScope};
use kappareg::{Dataset, FeatureKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn js_err(e: kappareg::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `(1 + d)^-κ` at `points` evenly spaced distances in `[0, max_distance]`.
#[wasm_bindgen]
pub fn weight_profile(kappa: f64, max_distance: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let d = max_distance * i as f64 / (points - 1) as f64;
            (1.0 + d).powf(-kappa)
        })
        .collect()
}

/// Fit on the points `(xs, ys)` and predict at `points` evenly spaced x values
/// spanning them. Returns the x grid followed by the predictions.
#[wasm_bindgen]
pub fn fit_line(
    xs: &[f64],
    ys: &[f64],
    kappa1: f64,
    kappa2: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(JsError::new(
            "need the same, non-zero number of x and y values",
        ));
    }
    let params = KappaParams::new(kappa1, kappa2).map_err(js_err)?;
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let train = Dataset::from_rows("points", &rows, ys.to_vec()).map_err(js_err)?;

    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let points = points.max(2);
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let query: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    let test = Dataset::from_rows("grid", &query, vec![0.0; points]).map_err(js_err)?;

    let mut out = grid;
    out.extend(fit_predict(&train, &test, params).map_err(js_err)?);
    Ok(out)
}

/// Parse CSV text: last column is the target, columns with any non-numeric
/// value are categorical.
pub fn dataset_from_csv(text: &str, has_header: bool) -> kappareg::Result<Dataset> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if has_header {
        lines.next();
    }
    let first = lines.next().ok_or(kappareg::Error::Empty("CSV text"))?;
    let width = first.split(',').count();
    if width < 2 {
        return Err(kappareg::Error::InvalidParameter(
            "need at least one feature column and a target".into(),
        ));
    }
    let mut numeric = vec![true; width];
    for line in std::iter::once(first).chain(lines) {
        for (c, field) in line.split(',').enumerate().take(width) {
            numeric[c] &= field.trim().parse::<f64>().is_ok();
        }
    }
    let spec = DatasetSpec {
        name: "pasted".into(),
        source_path: "pasted.csv".into(),
        target_index: width - 1,
        selected_indices: (0..width - 1).collect(),
        kinds: (0..width - 1)
            .filter(|&c| !numeric[c])
            .map(|c| (c, FeatureKind::Categorical))
            .collect(),
        delimiter: ',',
        has_header,
        missing_markers: vec![String::new(), "?".into(), "NA".into()],
    };
    parse_dataset(&spec, text)
}

/// Cross-validated MAE at fixed κ₁ for κ₂ = from, from + step, ..., to.
/// Returns the κ₂ values followed by the MAEs.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn kappa_sweep(
    csv: &str,
    has_header: bool,
    kappa1: f64,
    kappa2_from: f64,
    kappa2_to: f64,
    kappa2_step: f64,
    folds: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    if kappa2_step.is_nan() || kappa2_step <= 0.0 || kappa2_to < kappa2_from {
        return Err(JsError::new("kappa2 range is empty"));
    }
    let dataset = dataset_from_csv(csv, has_header).map_err(js_err)?;
    let mut values = Vec::new();
    let mut k = kappa2_from;
    while k <= kappa2_to + 1e-9 {
        values.push(k);
        k += kappa2_step;
    }
    let opts = CvOptions {
        k: folds,
        seed: u64::from(seed),
        timing: false,
        workers: None,
    };
    let curve = kappa_curve(
        &dataset,
        kappa1,
        &values,
        NormalizationScope::TrainOnly,
        &opts,
    )
    .map_err(js_err)?;
    let (ks, maes): (Vec<f64>, Vec<f64>) = curve.into_iter().unzip();
    Ok(ks.into_iter().chain(maes).collect())
}

/// A small noisy dataset for the page to start from: two numeric features,
/// one categorical feature, target last.
#[wasm_bindgen]
pub fn sample_csv(rows: usize, seed: u32) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    let mut out = String::from("x1,x2,group,y\n");
    for _ in 0..rows {
        let x1: f64 = rng.random_range(0.0..10.0);
        let x2: f64 = rng.random_range(0.0..5.0);
        let group = ["a", "b", "c"][rng.random_range(0..3)];
        let shift = match group {
            "a" => 0.0,
            "b" => 2.0,
            _ => -1.5,
        };
        let y = (x1 * 0.6).sin() * 3.0 + 0.4 * x2 + shift + rng.random_range(-0.5..0.5);
        out.push_str(&format!("{x1:.2},{x2:.2},{group},{y:.3}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_starts_at_one_and_decays() {
        let w = weight_profile(2.0, 3.0, 4);
        assert_eq!(w, vec![1.0, 0.25, 1.0 / 9.0, 0.0625]);
    }

    #[test]
    fn csv_kinds_are_detected() {
        let ds = dataset_from_csv(&sample_csv(30, 1), true).unwrap();
        assert_eq!(ds.n_samples(), 30);
        assert_eq!(
            ds.kinds,
            vec![
                FeatureKind::Ordinal,
                FeatureKind::Ordinal,
                FeatureKind::Categorical
            ]
        );
    }

    #[test]
    fn sweep_returns_pairs() {
        let out = kappa_sweep(&sample_csv(60, 3), true, 2.0, 1.0, 5.0, 2.0, 5, 42)
            .map_err(|_| ())
            .unwrap();
        assert_eq!(out.len(), 6);
        assert_eq!(&out[..3], &[1.0, 3.0, 5.0]);
        assert!(out[3..].iter().all(|m| *m > 0.0));
    }

    #[test]
    fn line_fit_interpolates_between_points() {
        let out = fit_line(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], 2.0, 8.0, 5)
            .map_err(|_| ())
            .unwrap();
        let (grid, pred) = out.split_at(5);
        assert_eq!(grid, &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(pred.windows(2).all(|w| w[0] <= w[1]));
    }
}
