//! The seven benchmark datasets: schemas, source URLs, tuned κ defaults and
//! reference checksums of the cleaned matrices.

use std::path::{Path, PathBuf};

use crate::dataset::DatasetSpec;
use crate::error::{Error, Result};
use crate::kappa::KappaParams;

/// Environment variable overriding the data directory.
pub const DATA_DIR_ENV: &str = "KAPPAREG_DATA_DIR";

pub struct Builtin {
    pub name: &'static str,
    spec_json: &'static str,
    pub url: &'static str,
    /// (κ₁, κ₂) used by `bench` when none is given.
    pub kappa: (f64, f64),
    /// Expected sample count after missing-value removal.
    pub n_samples: usize,
    /// SHA-256 of the cleaned matrix, see [`crate::Dataset::checksum`].
    pub checksum: Option<&'static str>,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "auto",
        spec_json: include_str!("../../../specs/auto.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/auto-mpg/auto-mpg.data",
        kappa: (11.0, 6.0),
        n_samples: 392,
        checksum: Some("76b7bbdc5399f660ce5a7167fa31e356c6d3ac352e9a77f2d1e05366a54f8b25"),
    },
    Builtin {
        name: "student",
        spec_json: include_str!("../../../specs/student.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/00320/student.zip",
        kappa: (8.0, 8.0),
        n_samples: 394,
        checksum: None,
    },
    Builtin {
        name: "energy-y2",
        spec_json: include_str!("../../../specs/energy-y2.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/00242/ENB2012_data.xlsx",
        kappa: (12.0, 5.0),
        n_samples: 768,
        checksum: None,
    },
    Builtin {
        name: "energy-y1",
        spec_json: include_str!("../../../specs/energy-y1.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/00242/ENB2012_data.xlsx",
        kappa: (2.0, 24.0),
        n_samples: 768,
        checksum: None,
    },
    Builtin {
        name: "iris",
        spec_json: include_str!("../../../specs/iris.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/iris/iris.data",
        kappa: (7.0, 50.0),
        n_samples: 150,
        checksum: Some("f9bf673505a646d98cce79059734ee15bacac43f77ed48da4e450b9764c2d16b"),
    },
    Builtin {
        name: "concrete",
        spec_json: include_str!("../../../specs/concrete.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/concrete/compressive/Concrete_Data.xls",
        kappa: (7.0, 10.0),
        n_samples: 1030,
        checksum: None,
    },
    Builtin {
        name: "wine",
        spec_json: include_str!("../../../specs/wine.json"),
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/wine-quality/winequality-red.csv",
        kappa: (0.5, 13.0),
        n_samples: 1599,
        checksum: Some("3d78ed041934ffae8506e49c826a622714174cf766302b8adc13a58076de23ec"),
    },
];

impl Builtin {
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec::from_json(self.spec_json).expect("built-in specs are valid")
    }

    pub fn kappa_params(&self) -> KappaParams {
        KappaParams::new(self.kappa.0, self.kappa.1).expect("built-in κ values are positive")
    }
}

fn normalize_name(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace(['_', ' '], "-")
}

pub fn find(name: &str) -> Option<&'static Builtin> {
    let wanted = normalize_name(name);
    let wanted = match wanted.as_str() {
        "student-performance" | "student-mat" => "student",
        "wine-quality" | "winequality-red" => "wine",
        "auto-mpg" => "auto",
        "energyy1" => "energy-y1",
        "energyy2" => "energy-y2",
        other => other,
    };
    BUILTINS.iter().find(|b| b.name == wanted)
}

pub fn lookup(name: &str) -> Result<&'static Builtin> {
    find(name).ok_or_else(|| Error::UnknownDataset(name.to_string()))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|b| b.name)
}

/// `--data-dir` if given, else `$KAPPAREG_DATA_DIR`, else `./data`.
pub fn data_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Resolve a dataset argument: a built-in name, or a path to a JSON spec.
pub fn resolve_spec(arg: &str, data_dir: &Path) -> Result<DatasetSpec> {
    if let Some(builtin) = find(arg) {
        return Ok(builtin.spec().resolved(data_dir));
    }
    let path = Path::new(arg);
    if path.extension().is_some_and(|e| e == "json") {
        if !path.exists() {
            return Err(Error::UnknownDataset(arg.to_string()));
        }
        let spec = DatasetSpec::from_file(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        return Ok(spec.resolved(base));
    }
    Err(Error::UnknownDataset(arg.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_spec_parses() {
        for b in BUILTINS {
            let spec = b.spec();
            assert_eq!(spec.name, b.name);
            assert!(
                b.url
                    .ends_with(spec.source_path.file_name().unwrap().to_str().unwrap())
                    || b.url.ends_with(".zip")
                    || b.url.ends_with(".xls")
                    || b.url.ends_with(".xlsx")
            );
        }
    }

    #[test]
    fn kappa_defaults_match_tuned_values() {
        let got: Vec<_> = BUILTINS.iter().map(|b| (b.name, b.kappa)).collect();
        assert_eq!(
            got,
            vec![
                ("auto", (11.0, 6.0)),
                ("student", (8.0, 8.0)),
                ("energy-y2", (12.0, 5.0)),
                ("energy-y1", (2.0, 24.0)),
                ("iris", (7.0, 50.0)),
                ("concrete", (7.0, 10.0)),
                ("wine", (0.5, 13.0)),
            ]
        );
    }

    #[test]
    fn iris_marks_species_categorical() {
        use crate::dataset::FeatureKind;
        let spec = find("Iris").unwrap().spec();
        assert_eq!(spec.kind_of(4), FeatureKind::Categorical);
        assert_eq!(spec.kind_of(1), FeatureKind::Ordinal);
    }

    #[test]
    fn names_are_case_and_separator_insensitive() {
        assert_eq!(find("Energy_Y1").unwrap().name, "energy-y1");
        assert_eq!(find("wine quality").unwrap().name, "wine");
        assert!(find("boston").is_none());
        assert!(matches!(lookup("boston"), Err(Error::UnknownDataset(_))));
    }
}
