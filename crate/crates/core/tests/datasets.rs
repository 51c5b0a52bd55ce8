mod common;

use common::try_builtin;
use kappareg::builtin::{self, BUILTINS};
use kappareg::FeatureKind;

#[test]
fn builtin_specs_are_valid() {
    for b in BUILTINS {
        let spec = b.spec();
        spec.validate().unwrap();
        assert!(!spec.selected_indices.is_empty(), "{}", b.name);
    }
    assert_eq!(builtin::names().count(), 7);
}

#[test]
fn iris_shape() {
    let Some(ds) = try_builtin("iris") else {
        return;
    };
    assert_eq!((ds.n_samples(), ds.n_features()), (150, 4));
    assert_eq!(ds.kinds[3], FeatureKind::Categorical);
    let species: std::collections::BTreeSet<u64> =
        ds.features.column(3).iter().map(|v| *v as u64).collect();
    assert_eq!(species.len(), 3);
}

#[test]
fn auto_drops_missing_horsepower() {
    let Some(ds) = try_builtin("auto") else {
        return;
    };
    assert_eq!((ds.n_samples(), ds.n_features()), (392, 6));
}

#[test]
fn present_files_match_reference_counts_and_checksums() {
    for b in BUILTINS {
        let Some(ds) = try_builtin(b.name) else {
            continue;
        };
        assert_eq!(ds.n_samples(), b.n_samples, "{}", b.name);
        if let Some(expected) = b.checksum {
            assert_eq!(ds.checksum(), expected, "{}", b.name);
        }
    }
}
