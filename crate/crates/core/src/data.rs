//! Dataset ingestion, stratified fold assignment and report persistence.
//!
//! CSV input is UTF-8 with a header row, comma separated, `.` as the decimal
//! point. An empty cell or `?` marks a missing feature value, held as NaN.
//!
//! Fold assignment draws from ChaCha8 seeded with `seed_from_u64(seed)`, so
//! a given seed yields the same split on every platform.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::dst::Frame;
use crate::error::{Error, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Numbers select by 0-based position, anything else by header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "last" => LabelColumn::Last,
            _ => match s.parse::<usize>() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(s.to_string()),
            },
        })
    }
}

/// Numeric feature matrix with symbolic labels. Missing values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some((i, _)) = features
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != feature_names.len())
        {
            return Err(Error::Shape(format!("row {i} is not {} wide", feature_names.len())));
        }
        if features.iter().flatten().any(|v| v.is_infinite()) {
            return Err(Error::Shape("feature values must be finite".into()));
        }
        if labels.iter().any(|l| l.is_empty()) {
            return Err(Error::Shape("labels must be non-empty".into()));
        }
        Ok(Dataset {
            name,
            feature_names,
            features,
            labels,
            provenance: String::new(),
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Distinct labels in sorted order.
    pub fn classes(&self) -> Result<Frame> {
        let mut labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        labels.sort_unstable();
        labels.dedup();
        Frame::new(labels)
    }

    /// Label of every sample as an index into `frame`.
    pub fn label_indices(&self, frame: &Frame) -> Result<Vec<usize>> {
        self.labels.iter().map(|l| frame.require_index(l)).collect()
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

fn csv_error(path: &Path, row: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        row,
        column,
        message: message.into(),
    }
}

fn dataset_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Dataset {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Loads a CSV dataset. Rows and columns in error messages are 1-based, with
/// the header as row 1.
pub fn load_dataset(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| dataset_error(path, e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| dataset_error(path, e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(dataset_error(path, "empty file"));
    }
    let width = header.len();
    if width < 2 {
        return Err(dataset_error(path, "need at least one feature column and a label column"));
    }
    let label_col = match label {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => return Err(dataset_error(path, format!("label column {i} out of range"))),
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| dataset_error(path, format!("no column named `{name}`")))?,
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label_col)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let row = r + 2;
        let record = record.map_err(|e| csv_error(path, row, 0, e.to_string()))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(csv_error(
                path,
                row,
                record.len().min(width) + 1,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let mut values = Vec::with_capacity(width - 1);
        for (c, cell) in record.iter().enumerate() {
            if c == label_col {
                if cell.is_empty() {
                    return Err(csv_error(path, row, c + 1, "missing label"));
                }
                labels.push(cell.to_string());
                continue;
            }
            if cell.is_empty() || cell == "?" {
                values.push(f64::NAN);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(csv_error(path, row, c + 1, format!("`{cell}` is not a finite number")));
                }
            }
        }
        features.push(values);
    }
    if labels.is_empty() {
        return Err(dataset_error(path, "no data rows"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut dataset = Dataset::new(name, feature_names, features, labels)?;
    dataset.provenance = format!("loaded from {}", path.display());
    Ok(dataset)
}

/// Writes a dataset as CSV with the label in the last column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_dataset_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut header = dataset.feature_names.clone();
    header.push("class".into());
    writeln!(out, "{}", header.join(","))?;
    for (row, label) in dataset.features.iter().zip(&dataset.labels) {
        let cells: Vec<String> = row
            .iter()
            .map(|v| if v.is_nan() { String::new() } else { format!("{v:?}") })
            .collect();
        writeln!(out, "{},{}", cells.join(","), label)?;
    }
    out.flush()?;
    Ok(())
}

/// Fold index of every sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub folds: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }
}

/// Stratified k-fold assignment.
///
/// Each class's samples are shuffled and dealt round-robin; the dealing
/// position carries over between classes (in sorted label order) so fold
/// sizes differ by at most one.
pub fn kfold_split(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::out_of_range("folds", k as f64, "[2, ∞)"));
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, label) in dataset.labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    if let Some((label, members)) = by_class.iter().find(|(_, m)| m.len() < k) {
        return Err(Error::ClassTooSmall {
            label: label.to_string(),
            count: members.len(),
            folds: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; dataset.n_samples()];
    let mut dealt = 0usize;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = dealt % k;
            dealt += 1;
        }
    }
    Ok(FoldAssignment { k, folds })
}

/// Writes a report as pretty JSON. Refuses to replace an existing file unless
/// `force` is set.
pub fn write_report<T: Serialize>(report: &T, path: impl AsRef<Path>, force: bool) -> Result<()> {
    let path = path.as_ref();
    if path.exists() && !force {
        return Err(Error::OutputExists(path.to_path_buf()));
    }
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_report<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
