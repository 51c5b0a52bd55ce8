//! Declarative dataset schemas, delimited-text loading and k-fold partitioning.
//!
//! A [`DatasetSpec`] names the raw file, the target column and the selected
//! feature columns (0-based over the raw file's columns). Loading keeps only
//! those columns, drops every row with a missing marker in any of them, and
//! maps categorical strings to integer codes in first-appearance order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Categorical,
    Ordinal,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::Categorical => f.write_str("categorical"),
            FeatureKind::Ordinal => f.write_str("ordinal"),
        }
    }
}

fn default_delimiter() -> char {
    ','
}

fn default_missing_markers() -> Vec<String> {
    vec![String::new(), "?".to_string(), "NA".to_string()]
}

/// Schema of one delimited-text dataset.
///
/// `kinds` only needs entries for categorical columns; selected columns without
/// an entry are ordinal. A `delimiter` of `' '` splits on runs of whitespace and
/// honours double quotes (the layout of UCI's `auto-mpg.data`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub source_path: PathBuf,
    pub target_index: usize,
    pub selected_indices: Vec<usize>,
    #[serde(default)]
    pub kinds: BTreeMap<usize, FeatureKind>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub has_header: bool,
    #[serde(default = "default_missing_markers")]
    pub missing_markers: Vec<String>,
}

impl DatasetSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DatasetSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Resolve a relative `source_path` against `data_dir`.
    pub fn resolved(&self, data_dir: impl AsRef<Path>) -> Self {
        let mut spec = self.clone();
        if spec.source_path.is_relative() {
            spec.source_path = data_dir.as_ref().join(&spec.source_path);
        }
        spec
    }

    pub fn kind_of(&self, column: usize) -> FeatureKind {
        self.kinds
            .get(&column)
            .copied()
            .unwrap_or(FeatureKind::Ordinal)
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidSpec {
            name: self.name.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.selected_indices.is_empty() {
            return Err(self.invalid("no selected columns"));
        }
        if self.selected_indices.contains(&self.target_index) {
            return Err(self.invalid(format!(
                "target column {} is also selected as a feature",
                self.target_index
            )));
        }
        let mut seen = self.selected_indices.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(self.invalid("selected columns are not distinct"));
        }
        if let Some(col) = self
            .kinds
            .keys()
            .find(|c| !self.selected_indices.contains(c))
        {
            return Err(self.invalid(format!("kind given for unselected column {col}")));
        }
        if self.delimiter != ' ' && !self.delimiter.is_ascii() {
            return Err(self.invalid("delimiter must be an ASCII character"));
        }
        Ok(())
    }

    fn max_column(&self) -> usize {
        self.selected_indices
            .iter()
            .copied()
            .chain(std::iter::once(self.target_index))
            .max()
            .unwrap_or(0)
    }
}

/// A cleaned numeric table: selected features in spec order plus the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Array2<f64>,
    pub targets: Vec<f64>,
    pub kinds: Vec<FeatureKind>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        targets: Vec<f64>,
        kinds: Vec<FeatureKind>,
    ) -> Result<Self> {
        if features.nrows() != targets.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: targets.len(),
            });
        }
        if features.ncols() != kinds.len() {
            return Err(Error::LengthMismatch {
                left: features.ncols(),
                right: kinds.len(),
            });
        }
        Ok(Dataset {
            name: name.into(),
            features,
            targets,
            kinds,
        })
    }

    /// All-ordinal dataset from row vectors; handy for tests and small demos.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[Vec<f64>],
        targets: Vec<f64>,
    ) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * n_features);
        for row in rows {
            if row.len() != n_features {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: n_features,
                });
            }
            flat.extend_from_slice(row);
        }
        let features =
            Array2::from_shape_vec((rows.len(), n_features), flat).expect("shape checked above");
        Self::new(
            name,
            features,
            targets,
            vec![FeatureKind::Ordinal; n_features],
        )
    }

    pub fn n_samples(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.kinds.len()
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), indices),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            kinds: self.kinds.clone(),
        }
    }

    pub fn target_range(&self) -> Option<(f64, f64)> {
        range(&self.targets)
    }

    /// SHA-256 over the little-endian bytes of the feature matrix (row-major)
    /// followed by the targets. Independent of the source file's formatting.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for v in self.features.iter() {
            hasher.update(v.to_le_bytes());
        }
        for v in &self.targets {
            hasher.update(v.to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub(crate) fn range(values: &[f64]) -> Option<(f64, f64)> {
    values.iter().fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Split one line on whitespace runs, keeping double-quoted fields intact.
fn split_whitespace_quoted(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    let mut has_field = false;
    for ch in line.chars() {
        match ch {
            '"' => {
                in_quotes = !in_quotes;
                has_field = true;
            }
            c if c.is_whitespace() && !in_quotes => {
                if has_field {
                    fields.push(std::mem::take(&mut current));
                    has_field = false;
                }
            }
            c => {
                current.push(c);
                has_field = true;
            }
        }
    }
    if has_field {
        fields.push(current);
    }
    fields
}

/// (1-based line number, fields) for every non-blank data record.
fn read_records(spec: &DatasetSpec, text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut records = Vec::new();
    if spec.delimiter == ' ' {
        let skip = usize::from(spec.has_header);
        for (i, line) in text.lines().enumerate().skip(skip) {
            let fields = split_whitespace_quoted(line);
            if !fields.is_empty() {
                records.push((i + 1, fields));
            }
        }
        return Ok(records);
    }

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter as u8)
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        records.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(records)
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let path = spec.source_path.as_path();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(spec, &text)
}

/// Load from in-memory text; `spec.source_path` is only used in diagnostics.
pub fn parse_dataset(spec: &DatasetSpec, text: &str) -> Result<Dataset> {
    spec.validate()?;
    let path = spec.source_path.clone();
    let records = read_records(spec, text)?;
    let width = spec.max_column() + 1;

    if let Some((_, first)) = records.first() {
        if first.len() < width {
            return Err(spec.invalid(format!(
                "column {} out of range for a file with {} columns",
                spec.max_column(),
                first.len()
            )));
        }
    }

    let is_missing = |field: &str| spec.missing_markers.iter().any(|m| m == field);
    let kinds: Vec<FeatureKind> = spec
        .selected_indices
        .iter()
        .map(|&c| spec.kind_of(c))
        .collect();
    let mut codes: Vec<HashMap<String, usize>> = vec![HashMap::new(); kinds.len()];

    let mut flat = Vec::new();
    let mut targets = Vec::new();
    for (line, fields) in &records {
        if fields.len() < width {
            return Err(Error::ShortRow {
                path: path.clone(),
                row: *line,
                found: fields.len(),
                expected: width,
            });
        }
        let target_field = fields[spec.target_index].as_str();
        if is_missing(target_field)
            || spec
                .selected_indices
                .iter()
                .any(|&c| is_missing(&fields[c]))
        {
            continue;
        }
        let parse = |column: usize| -> Result<f64> {
            let raw = fields[column].as_str();
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: path.clone(),
                    row: *line,
                    column,
                    value: raw.to_string(),
                })
        };
        targets.push(parse(spec.target_index)?);
        for (slot, (&column, kind)) in spec.selected_indices.iter().zip(&kinds).enumerate() {
            let value = match kind {
                FeatureKind::Ordinal => parse(column)?,
                FeatureKind::Categorical => {
                    let table = &mut codes[slot];
                    let next = table.len();
                    *table.entry(fields[column].clone()).or_insert(next) as f64
                }
            };
            flat.push(value);
        }
    }

    if targets.is_empty() {
        return Err(Error::NoRows(spec.name.clone()));
    }
    let features = Array2::from_shape_vec((targets.len(), kinds.len()), flat)
        .expect("one value per selected column per kept row");
    Dataset::new(spec.name.clone(), features, targets, kinds)
}

/// Seeded assignment of samples to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn n_samples(&self) -> usize {
        self.assignments.len()
    }

    /// Sample indices of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffle `0..n_samples` with a ChaCha8 stream seeded by `seed`, then deal the
/// shuffled order round-robin into `k` folds.
pub fn make_folds(n_samples: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n_samples {
        return Err(Error::InvalidFoldCount { k, n: n_samples });
    }
    let mut order: Vec<usize> = (0..n_samples).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignments = vec![0; n_samples];
    for (position, &sample) in order.iter().enumerate() {
        assignments[sample] = position % k;
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

/// (train, test) for one fold; both keep the dataset's original row order.
pub fn split_fold(dataset: &Dataset, plan: &FoldPlan, fold: usize) -> Result<(Dataset, Dataset)> {
    if fold >= plan.k {
        return Err(Error::FoldOutOfRange { fold, k: plan.k });
    }
    if plan.n_samples() != dataset.n_samples() {
        return Err(Error::LengthMismatch {
            left: plan.n_samples(),
            right: dataset.n_samples(),
        });
    }
    Ok((
        dataset.subset(&plan.train_indices(fold)),
        dataset.subset(&plan.test_indices(fold)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(delimiter: char, has_header: bool) -> DatasetSpec {
        DatasetSpec {
            name: "toy".into(),
            source_path: "toy.csv".into(),
            target_index: 0,
            selected_indices: vec![1, 2],
            kinds: BTreeMap::from([(2, FeatureKind::Categorical)]),
            delimiter,
            has_header,
            missing_markers: default_missing_markers(),
        }
    }

    #[test]
    fn drops_rows_with_missing_markers() {
        let text = "1.0,2.0,a\n2.0,?,b\n3.0,4.0,a\n";
        let ds = parse_dataset(&spec(',', false), text).unwrap();
        assert_eq!(ds.n_samples(), 2);
        assert_eq!(ds.targets, vec![1.0, 3.0]);
        assert_eq!(ds.features.row(1).to_vec(), vec![4.0, 0.0]);
    }

    #[test]
    fn categorical_codes_follow_first_appearance() {
        let text = "1,0,zebra\n2,0,ant\n3,0,zebra\n4,0,moth\n";
        let ds = parse_dataset(&spec(',', false), text).unwrap();
        assert_eq!(ds.features.column(1).to_vec(), vec![0.0, 1.0, 0.0, 2.0]);
        assert_eq!(
            ds.kinds,
            vec![FeatureKind::Ordinal, FeatureKind::Categorical]
        );
    }

    #[test]
    fn codes_skip_dropped_rows() {
        let text = "1,?,zebra\n2,0,ant\n";
        let ds = parse_dataset(&spec(',', false), text).unwrap();
        assert_eq!(ds.features.column(1).to_vec(), vec![0.0]);
    }

    #[test]
    fn unparseable_ordinal_reports_row_and_column() {
        let text = "y;x;c\n1;2;a\n2;oops;b\n";
        let err = parse_dataset(&spec(';', true), text).unwrap_err();
        match err {
            Error::Parse {
                row, column, value, ..
            } => {
                assert_eq!((row, column), (3, 1));
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_rows_missing_is_an_error() {
        let text = "?,1,a\nNA,2,b\n";
        assert!(matches!(
            parse_dataset(&spec(',', false), text),
            Err(Error::NoRows(_))
        ));
    }

    #[test]
    fn whitespace_layout_keeps_quoted_names() {
        let mut s = spec(' ', false);
        s.kinds.clear();
        s.selected_indices = vec![1, 3];
        let text = "18.0   8   307.0\t\"chevy malibu\"\n15.0   8   ?\t\"buick\"\n";
        let ds = parse_dataset(&s, "").unwrap_err();
        assert!(matches!(ds, Error::NoRows(_)));
        // column 3 is the quoted name: not numeric
        assert!(matches!(
            parse_dataset(&s, text),
            Err(Error::Parse { column: 3, .. })
        ));
        s.selected_indices = vec![1, 2];
        let ds = parse_dataset(&s, text).unwrap();
        assert_eq!(ds.n_samples(), 1);
        assert_eq!(
            split_whitespace_quoted("1  2\t\"a b\""),
            vec!["1", "2", "a b"]
        );
    }

    #[test]
    fn blank_lines_are_ignored() {
        let text = "1,2,a\n\n3,4,b\n\n";
        let ds = parse_dataset(&spec(',', false), text).unwrap();
        assert_eq!(ds.n_samples(), 2);
    }

    #[test]
    fn spec_rejects_target_in_features() {
        let mut s = spec(',', false);
        s.selected_indices = vec![0, 1];
        s.kinds.clear();
        assert!(matches!(s.validate(), Err(Error::InvalidSpec { .. })));
    }

    #[test]
    fn spec_rejects_out_of_range_column() {
        let mut s = spec(',', false);
        s.selected_indices = vec![1, 7];
        s.kinds.clear();
        assert!(matches!(
            parse_dataset(&s, "1,2,3\n"),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(';', true);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(DatasetSpec::from_json(&text).unwrap(), s);
    }

    #[test]
    fn fold_sizes_pigeonhole() {
        let plan = make_folds(10, 10, 42).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 1));
        let plan = make_folds(150, 10, 42).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 15));
    }

    #[test]
    fn fold_sizes_uneven() {
        // 394 = 4 * 40 + 6 * 39 under round-robin dealing.
        let plan = make_folds(394, 10, 7).unwrap();
        let mut sizes = plan.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![39, 39, 39, 39, 39, 39, 40, 40, 40, 40]);
    }

    #[test]
    fn fold_count_bounds() {
        assert!(make_folds(5, 1, 0).is_err());
        assert!(make_folds(5, 6, 0).is_err());
        assert!(make_folds(5, 5, 0).is_ok());
    }

    #[test]
    fn split_sizes() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let ds = Dataset::from_rows("d", &rows, (0..8).map(f64::from).collect()).unwrap();
        let plan = make_folds(8, 4, 1).unwrap();
        let (train, test) = split_fold(&ds, &plan, 3).unwrap();
        assert_eq!((train.n_samples(), test.n_samples()), (6, 2));
        assert!(test.targets.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            split_fold(&ds, &plan, 4),
            Err(Error::FoldOutOfRange { fold: 4, k: 4 })
        ));
    }
}
