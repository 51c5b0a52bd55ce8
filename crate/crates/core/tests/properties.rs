mod common;

use kappareg::kappa::{self, DistanceMatrix};
use kappareg::{Dataset, FeatureKind, KappaParams};
use ndarray::{Array2, Axis};
use proptest::prelude::*;

fn mixed_dataset(max_rows: usize) -> impl Strategy<Value = (Dataset, Dataset)> {
    (2usize..max_rows, 1usize..12, 1usize..5).prop_flat_map(|(n_train, n_test, n_features)| {
        let kinds = proptest::collection::vec(
            prop_oneof![Just(FeatureKind::Ordinal), Just(FeatureKind::Categorical)],
            n_features,
        );
        let value = (0u8..6).prop_map(f64::from);
        let rows = n_train + n_test;
        (
            kinds,
            proptest::collection::vec(value, rows * n_features),
            proptest::collection::vec(-50.0..50.0f64, rows),
        )
            .prop_map(move |(kinds, cells, targets)| {
                let x = Array2::from_shape_vec((rows, n_features), cells).unwrap();
                let train_rows: Vec<usize> = (0..n_train).collect();
                let test_rows: Vec<usize> = (n_train..rows).collect();
                let all = Dataset::new("p", x, targets, kinds).unwrap();
                (all.subset(&train_rows), all.subset(&test_rows))
            })
    })
}

fn params() -> impl Strategy<Value = KappaParams> {
    (0.5..20.0f64, 0.0..40.0f64).prop_map(|(a, b)| KappaParams::new(a, b).unwrap())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn weight_decreases_with_distance_and_kappa(d1 in 0.0..5.0f64, gap in 0.01..5.0f64, k in 0.1..30.0f64, dk in 0.1..10.0f64) {
        // two training targets 0 (near) and 1 (far): the prediction is the far row's weight share
        let share = |near: f64, far: f64, kappa2: f64| {
            let m = DistanceMatrix { d: Array2::from_shape_vec((1, 2), vec![near, far]).unwrap() };
            kappa::predict(&m, &[0.0, 1.0], kappa2).unwrap()[0]
        };
        let base = share(d1, d1 + gap, k);
        prop_assert!(base < 0.5);
        prop_assert!(share(d1, d1 + gap + 1.0, k) <= base);
        prop_assert!(share(d1, d1 + gap, k + dk) <= base);
    }

    #[test]
    fn training_row_order_does_not_matter((train, test) in mixed_dataset(30), p in params(), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..train.n_samples()).collect();
        let mut r = common::rng(seed);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
        let shuffled = train.subset(&order);
        let a = kappa::fit_predict(&train, &test, p).unwrap();
        let b = kappa::fit_predict(&shuffled, &test, p).unwrap();
        prop_assert!(close(&a, &b, 1e-12), "{a:?} vs {b:?}");
    }

    #[test]
    fn shifting_targets_shifts_predictions((train, test) in mixed_dataset(30), p in params(), c in -1000.0..1000.0f64) {
        let mut moved = train.clone();
        moved.targets.iter_mut().for_each(|y| *y += c);
        let a = kappa::fit_predict(&train, &test, p).unwrap();
        let b = kappa::fit_predict(&moved, &test, p).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + c - y).abs() <= 1e-9 * (1.0 + c.abs()), "{x} + {c} vs {y}");
        }
    }

    #[test]
    fn rescaling_an_ordinal_column_changes_nothing((train, test) in mixed_dataset(30), p in params(), s in 0.01..100.0f64) {
        let scale = |ds: &Dataset| {
            let mut out = ds.clone();
            for (f, kind) in ds.kinds.iter().enumerate() {
                if *kind == FeatureKind::Ordinal {
                    out.features.column_mut(f).mapv_inplace(|v| v * s);
                }
            }
            out
        };
        let a = kappa::fit_predict(&train, &test, p).unwrap();
        let b = kappa::fit_predict(&scale(&train), &scale(&test), p).unwrap();
        prop_assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn offsetting_an_ordinal_column_changes_nothing((train, test) in mixed_dataset(30), p in params(), c in -100.0..100.0f64) {
        // dividing x or x - min by the range differs by a constant, which the
        // imputation only sees through differences
        let shift = |ds: &Dataset| {
            let mut out = ds.clone();
            for (f, kind) in ds.kinds.iter().enumerate() {
                if *kind == FeatureKind::Ordinal {
                    out.features.column_mut(f).mapv_inplace(|v| v + c);
                }
            }
            out
        };
        let a = kappa::fit_predict(&train, &test, p).unwrap();
        let b = kappa::fit_predict(&shift(&train), &shift(&test), p).unwrap();
        prop_assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn encoded_values_and_predictions_stay_in_target_range((train, test) in mixed_dataset(40), p in params()) {
        let lo = train.targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = train.targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let enc = kappa::encode(&train, &test, p.kappa1, Default::default()).unwrap();
        let eps = 1e-9 * hi.abs().max(lo.abs()).max(1.0);
        for v in enc.train.iter().chain(enc.test.iter()) {
            prop_assert!(*v >= lo - eps && *v <= hi + eps);
        }
        let pred = kappa::predict(&kappa::distance_matrix(&enc), &train.targets, p.kappa2).unwrap();
        prop_assert_eq!(pred.len(), test.n_samples());
        for v in pred {
            prop_assert!(v >= lo - eps && v <= hi + eps);
        }
    }

    #[test]
    fn duplicate_test_rows_get_equal_predictions((train, test) in mixed_dataset(20), p in params()) {
        let doubled = test.subset(&[0, 0]);
        let pred = kappa::fit_predict(&train, &doubled, p).unwrap();
        prop_assert_eq!(pred[0], pred[1]);
        prop_assert_eq!(doubled.features.len_of(Axis(0)), 2);
    }
}
