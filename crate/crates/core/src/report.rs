//! Result files: long-format benchmark rows, grid surfaces and κ₂ curves, in
//! CSV or JSON. Floats are written with Rust's shortest round-trip formatting,
//! so reading a file back reproduces the reports bit for bit.

use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::evaluation::{BenchmarkReport, FoldReport, GridResult, SurfacePoint};
use crate::kappa::KappaParams;

pub const RESULT_HEADER: [&str; 7] = [
    "dataset",
    "model",
    "kappa1",
    "kappa2",
    "fold",
    "mae",
    "wall_seconds",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Format(format!("unknown output format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Fold index, or the aggregate row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldLabel {
    Index(usize),
    Mean,
}

impl fmt::Display for FoldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldLabel::Index(i) => write!(f, "{i}"),
            FoldLabel::Mean => f.write_str("mean"),
        }
    }
}

impl FromStr for FoldLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "mean" {
            return Ok(FoldLabel::Mean);
        }
        s.parse()
            .map(FoldLabel::Index)
            .map_err(|_| Error::Format(format!("bad fold label {s:?}")))
    }
}

impl Serialize for FoldLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FoldLabel::Index(i) => serializer.serialize_u64(*i as u64),
            FoldLabel::Mean => serializer.serialize_str("mean"),
        }
    }
}

impl<'de> Deserialize<'de> for FoldLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Index(i) => Ok(FoldLabel::Index(i)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One line of a result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub model: String,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub fold: FoldLabel,
    pub mae: f64,
    pub wall_seconds: f64,
}

/// k fold rows followed by one `mean` row per report.
pub fn rows(reports: &[BenchmarkReport]) -> Vec<ResultRow> {
    let mut out = Vec::new();
    for r in reports {
        let (kappa1, kappa2) = match r.kappa {
            Some(k) => (Some(k.kappa1), Some(k.kappa2)),
            None => (None, None),
        };
        let row = |fold, mae, wall_seconds| ResultRow {
            dataset: r.dataset.clone(),
            model: r.model.clone(),
            kappa1,
            kappa2,
            fold,
            mae,
            wall_seconds,
        };
        out.extend(
            r.per_fold
                .iter()
                .map(|f| row(FoldLabel::Index(f.fold), f.mae, f.wall_seconds)),
        );
        out.push(row(FoldLabel::Mean, r.mean_mae, r.mean_seconds));
    }
    out
}

/// Inverse of [`rows`]: regroup fold rows under their `mean` row.
pub fn reports_from_rows(rows: &[ResultRow]) -> Result<Vec<BenchmarkReport>> {
    let mut reports = Vec::new();
    let mut folds: Vec<FoldReport> = Vec::new();
    for row in rows {
        match row.fold {
            FoldLabel::Index(fold) => folds.push(FoldReport {
                fold,
                mae: row.mae,
                wall_seconds: row.wall_seconds,
            }),
            FoldLabel::Mean => {
                let kappa = match (row.kappa1, row.kappa2) {
                    (Some(kappa1), Some(kappa2)) => Some(KappaParams { kappa1, kappa2 }),
                    (None, None) => None,
                    _ => {
                        return Err(Error::Format(
                            "kappa1 and kappa2 must be both set or both empty".into(),
                        ))
                    }
                };
                reports.push(BenchmarkReport {
                    dataset: row.dataset.clone(),
                    model: row.model.clone(),
                    kappa,
                    per_fold: std::mem::take(&mut folds),
                    mean_mae: row.mae,
                    mean_seconds: row.wall_seconds,
                });
            }
        }
    }
    if !folds.is_empty() {
        return Err(Error::Format("fold rows without a closing mean row".into()));
    }
    Ok(reports)
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Format(format!("bad number {field:?}")))
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(field).map(Some)
    }
}

pub fn write_results(out: impl Write, reports: &[BenchmarkReport], format: Format) -> Result<()> {
    let rows = rows(reports);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(RESULT_HEADER)?;
            for r in &rows {
                w.write_record([
                    r.dataset.clone(),
                    r.model.clone(),
                    opt(r.kappa1),
                    opt(r.kappa2),
                    r.fold.to_string(),
                    r.mae.to_string(),
                    r.wall_seconds.to_string(),
                ])?;
            }
            w.flush().map_err(|e| Error::io("<results>", e))?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out).map_err(|e| Error::io("<results>", e))?;
        }
    }
    Ok(())
}

pub fn read_results(input: impl Read, format: Format) -> Result<Vec<BenchmarkReport>> {
    let rows: Vec<ResultRow> = match format {
        Format::Json => serde_json::from_reader(input)?,
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            if r.headers()?.iter().ne(RESULT_HEADER) {
                return Err(Error::Format("unexpected result header".into()));
            }
            let mut rows = Vec::new();
            for record in r.records() {
                let record = record?;
                if record.len() != RESULT_HEADER.len() {
                    return Err(Error::Format(format!(
                        "expected 7 fields, found {}",
                        record.len()
                    )));
                }
                rows.push(ResultRow {
                    dataset: record[0].to_string(),
                    model: record[1].to_string(),
                    kappa1: parse_opt(&record[2])?,
                    kappa2: parse_opt(&record[3])?,
                    fold: record[4].parse()?,
                    mae: parse_f64(&record[5])?,
                    wall_seconds: parse_f64(&record[6])?,
                });
            }
            rows
        }
    };
    reports_from_rows(&rows)
}

/// Surface rows of every result, then one `# best` comment line per result
/// in CSV.
pub fn write_surfaces(out: impl Write, results: &[GridResult], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["dataset", "kappa1", "kappa2", "mean_mae"])?;
            for result in results {
                for p in &result.surface {
                    w.write_record([
                        result.dataset.clone(),
                        p.kappa1.to_string(),
                        p.kappa2.to_string(),
                        p.mean_mae.to_string(),
                    ])?;
                }
            }
            let mut out = w
                .into_inner()
                .map_err(|e| Error::io("<surface>", e.into_error()))?;
            for result in results {
                writeln!(out, "{}", best_line(result)).map_err(|e| Error::io("<surface>", e))?;
            }
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, results)?;
            writeln!(out).map_err(|e| Error::io("<surface>", e))?;
        }
    }
    Ok(())
}

pub fn best_line(result: &GridResult) -> String {
    format!(
        "# best dataset={} kappa1={} kappa2={} mean_mae={}",
        result.dataset, result.best.kappa1, result.best.kappa2, result.best_mae
    )
}

pub fn read_surface_csv(input: impl Read) -> Result<Vec<SurfacePoint>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let mut points = Vec::new();
    for record in r.records() {
        let record = record?;
        points.push(SurfacePoint {
            kappa1: parse_f64(&record[1])?,
            kappa2: parse_f64(&record[2])?,
            mean_mae: parse_f64(&record[3])?,
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub dataset: String,
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean_mae: f64,
}

pub fn write_curve(out: impl Write, points: &[CurvePoint], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for p in points {
                w.serialize(p)?;
            }
            if points.is_empty() {
                w.write_record(["dataset", "kappa1", "kappa2", "mean_mae"])?;
            }
            w.flush().map_err(|e| Error::io("<curve>", e))?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, points)?;
            writeln!(out).map_err(|e| Error::io("<curve>", e))?;
        }
    }
    Ok(())
}

pub fn read_curve_csv(input: impl Read) -> Result<Vec<CurvePoint>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Dataset × model table of mean MAEs with an `Average` row over datasets that
/// have every model. Missing cells print as `-`.
pub fn aggregate_table(reports: &[BenchmarkReport]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    let mut models: Vec<&str> = Vec::new();
    for r in reports {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    let cell = |d: &str, m: &str| {
        reports
            .iter()
            .find(|r| r.dataset == d && r.model == m)
            .map(|r| r.mean_mae)
    };

    let mut out = String::new();
    let _ = write!(out, "{:<12}", "dataset");
    for m in &models {
        let _ = write!(out, " {m:>10}");
    }
    out.push('\n');
    for d in &datasets {
        let _ = write!(out, "{d:<12}");
        for m in &models {
            match cell(d, m) {
                Some(v) => {
                    let _ = write!(out, " {v:>10.3}");
                }
                None => {
                    let _ = write!(out, " {:>10}", "-");
                }
            }
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<12}", "Average");
    for avg in model_averages(reports, &models) {
        match avg {
            Some(v) => {
                let _ = write!(out, " {v:>10.3}");
            }
            None => {
                let _ = write!(out, " {:>10}", "-");
            }
        }
    }
    out.push('\n');
    out
}

/// Mean over datasets of each model's mean MAE, `None` if the model has no rows.
pub fn model_averages(reports: &[BenchmarkReport], models: &[&str]) -> Vec<Option<f64>> {
    models
        .iter()
        .map(|m| {
            let maes: Vec<f64> = reports
                .iter()
                .filter(|r| r.model == *m)
                .map(|r| r.mean_mae)
                .collect();
            (!maes.is_empty()).then(|| maes.iter().sum::<f64>() / maes.len() as f64)
        })
        .collect()
}
