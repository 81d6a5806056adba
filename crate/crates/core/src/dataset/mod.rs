//! Raw tabular data, binarization, and the tic-tac-toe endgame generator.

mod binarize;
mod csvio;
mod tictactoe;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::Bitset;

pub use binarize::{binarize, fit_columns, quantile_thresholds, transform, DEFAULT_BINS};
pub use csvio::{load_csv, load_csv_inferred, save_csv, Schema};
pub use tictactoe::{
    cell_name, generate_tictactoe, tictactoe_schema, TICTACTOE_LABEL, TICTACTOE_LINES,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("empty table")]
    EmptyTable,
    #[error("table has no feature columns")]
    NoFeatureColumns,
    #[error("label column `{0}` missing")]
    MissingLabel(String),
    #[error("label column `{column}` is not binary: value `{value}` in row {row}")]
    NonBinaryLabel { column: String, row: usize, value: String },
    #[error("numeric column `{column}` has non-numeric cell `{value}` in row {row}")]
    NonNumeric { column: String, row: usize, value: String },
    #[error("no usable features")]
    NoUsableFeatures,
    #[error("row {row}: expected {expected} cells, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("row {row}: missing cell for column `{column}`")]
    MissingCell { row: usize, column: String },
    #[error("header mismatch: file has [{found}], schema expects [{expected}]")]
    HeaderMismatch { expected: String, found: String },
    #[error("unknown column kind `{0}`")]
    UnknownKind(String),
    #[error("bins must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("sample has {found} columns, dataset has {expected}")]
    ColumnCount { expected: usize, found: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

impl std::str::FromStr for ColumnKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "categorical" | "cat" => Ok(ColumnKind::Categorical),
            "numeric" | "num" => Ok(ColumnKind::Numeric),
            other => Err(DataError::UnknownKind(other.to_string())),
        }
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Categorical => "categorical",
            ColumnKind::Numeric => "numeric",
        })
    }
}

/// A table of text cells, one of which is the binary label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    pub names: Vec<String>,
    pub kinds: Vec<ColumnKind>,
    pub rows: Vec<Vec<String>>,
    pub label: String,
}

impl RawTable {
    pub fn new(
        names: Vec<String>,
        kinds: Vec<ColumnKind>,
        rows: Vec<Vec<String>>,
        label: impl Into<String>,
    ) -> Result<Self, DataError> {
        let label = label.into();
        if names.len() != kinds.len() {
            return Err(DataError::RowLength { row: 0, expected: names.len(), found: kinds.len() });
        }
        if !names.contains(&label) {
            return Err(DataError::MissingLabel(label));
        }
        if names.len() < 2 {
            return Err(DataError::NoFeatureColumns);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(DataError::RowLength { row: i, expected: names.len(), found: row.len() });
            }
        }
        Ok(Self { names, kinds, rows, label })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn label_index(&self) -> Result<usize, DataError> {
        self.names
            .iter()
            .position(|n| *n == self.label)
            .ok_or_else(|| DataError::MissingLabel(self.label.clone()))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Labels mapped to booleans; errors on anything that is not a recognised
    /// binary token.
    pub fn labels(&self) -> Result<Vec<bool>, DataError> {
        let li = self.label_index()?;
        self.rows
            .iter()
            .enumerate()
            .map(|(row, r)| {
                parse_label(&r[li]).ok_or_else(|| DataError::NonBinaryLabel {
                    column: self.label.clone(),
                    row,
                    value: r[li].clone(),
                })
            })
            .collect()
    }

    /// Feature columns (everything but the label) as owned column vectors.
    pub fn features(&self) -> Result<Vec<RawFeature>, DataError> {
        let li = self.label_index()?;
        let mut out = Vec::with_capacity(self.names.len() - 1);
        for (ci, name) in self.names.iter().enumerate() {
            if ci == li {
                continue;
            }
            let cells: Vec<String> = self.rows.iter().map(|r| r[ci].clone()).collect();
            if self.kinds[ci] == ColumnKind::Numeric {
                for (row, cell) in cells.iter().enumerate() {
                    if parse_number(cell).is_none() {
                        return Err(DataError::NonNumeric {
                            column: name.clone(),
                            row,
                            value: cell.clone(),
                        });
                    }
                }
            }
            out.push(RawFeature { name: name.clone(), kind: self.kinds[ci], cells });
        }
        Ok(out)
    }

    pub fn subset(&self, rows: &[usize]) -> RawTable {
        RawTable {
            names: self.names.clone(),
            kinds: self.kinds.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            label: self.label.clone(),
        }
    }
}

pub fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" | "positive" | "pos" | "t" => Some(true),
        "false" | "0" | "no" | "n" | "negative" | "neg" | "f" => Some(false),
        _ => None,
    }
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// One raw feature column kept alongside the binary matrix so new conditions
/// can be evaluated later.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawFeature {
    pub name: String,
    pub kind: ColumnKind,
    pub cells: Vec<String>,
}

/// Threshold comparison tolerance (relative).
pub const THRESHOLD_RTOL: f64 = 1e-9;

pub(crate) fn thresholds_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= THRESHOLD_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// A test on one raw cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "value", rename_all = "snake_case")]
pub enum Condition {
    Equals(String),
    NotEquals(String),
    LessEqual(f64),
    Less(f64),
    GreaterEqual(f64),
    Greater(f64),
}

impl Condition {
    pub fn negate(&self) -> Condition {
        match self {
            Condition::Equals(v) => Condition::NotEquals(v.clone()),
            Condition::NotEquals(v) => Condition::Equals(v.clone()),
            Condition::LessEqual(t) => Condition::Greater(*t),
            Condition::Greater(t) => Condition::LessEqual(*t),
            Condition::Less(t) => Condition::GreaterEqual(*t),
            Condition::GreaterEqual(t) => Condition::Less(*t),
        }
    }

    pub fn operator(&self) -> &'static str {
        match self {
            Condition::Equals(_) => "==",
            Condition::NotEquals(_) => "!=",
            Condition::LessEqual(_) => "<=",
            Condition::Less(_) => "<",
            Condition::GreaterEqual(_) => ">=",
            Condition::Greater(_) => ">",
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            Condition::LessEqual(t)
            | Condition::Less(t)
            | Condition::GreaterEqual(t)
            | Condition::Greater(t) => Some(t),
            _ => None,
        }
    }

    pub fn evaluate(&self, cell: &str) -> bool {
        match self {
            Condition::Equals(v) => cell_equals(cell, v),
            Condition::NotEquals(v) => !cell_equals(cell, v),
            Condition::LessEqual(t) => parse_number(cell).is_some_and(|x| x <= *t),
            Condition::Less(t) => parse_number(cell).is_some_and(|x| x < *t),
            Condition::GreaterEqual(t) => parse_number(cell).is_some_and(|x| x >= *t),
            Condition::Greater(t) => parse_number(cell).is_some_and(|x| x > *t),
        }
    }

    /// Equality with thresholds compared at relative tolerance.
    pub fn matches(&self, other: &Condition) -> bool {
        match (self, other) {
            (Condition::Equals(a), Condition::Equals(b))
            | (Condition::NotEquals(a), Condition::NotEquals(b)) => a == b,
            _ => match (self.threshold(), other.threshold()) {
                (Some(a), Some(b)) => {
                    std::mem::discriminant(self) == std::mem::discriminant(other)
                        && thresholds_match(a, b)
                }
                _ => false,
            },
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Condition::Equals(_) => 0,
            Condition::NotEquals(_) => 1,
            Condition::LessEqual(_) => 2,
            Condition::Less(_) => 3,
            Condition::GreaterEqual(_) => 4,
            Condition::Greater(_) => 5,
        }
    }

    /// Total order used for deterministic tie-breaking.
    pub fn total_cmp(&self, other: &Condition) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Condition::Equals(a), Condition::Equals(b))
            | (Condition::NotEquals(a), Condition::NotEquals(b)) => a.cmp(b),
            _ => {
                let a = self.threshold().unwrap_or(0.0);
                let b = other.threshold().unwrap_or(0.0);
                a.total_cmp(&b)
            }
        })
    }
}

fn cell_equals(cell: &str, value: &str) -> bool {
    if cell == value {
        return true;
    }
    match (parse_number(cell), parse_number(value)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnOrigin {
    Binned,
    Synthesized,
}

/// Where a binary column comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub feature: String,
    pub condition: Condition,
    pub origin: ColumnOrigin,
}

impl ColumnMeta {
    pub fn binned(feature: impl Into<String>, condition: Condition) -> Self {
        Self { feature: feature.into(), condition, origin: ColumnOrigin::Binned }
    }

    pub fn same_test(&self, feature: &str, condition: &Condition) -> bool {
        self.feature == feature && self.condition.matches(condition)
    }
}

impl fmt::Display for ColumnMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.feature, self.condition.operator())?;
        match &self.condition {
            Condition::Equals(v) | Condition::NotEquals(v) => f.write_str(v),
            c => write!(f, "{}", c.threshold().unwrap_or(f64::NAN)),
        }
    }
}

/// Binarized samples. Bits are stored column-major.
#[derive(Clone, Debug)]
pub struct BinaryDataset {
    columns: Vec<ColumnMeta>,
    bits: Vec<Bitset>,
    labels: Bitset,
    positives: Vec<usize>,
    negatives: Vec<usize>,
    features: Vec<RawFeature>,
}

impl BinaryDataset {
    pub(crate) fn from_parts(
        columns: Vec<ColumnMeta>,
        bits: Vec<Bitset>,
        labels: Vec<bool>,
        features: Vec<RawFeature>,
    ) -> Self {
        let positives = (0..labels.len()).filter(|&i| labels[i]).collect();
        let negatives = (0..labels.len()).filter(|&i| !labels[i]).collect();
        Self { columns, bits, labels: Bitset::from_bools(labels), positives, negatives, features }
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Bitset {
        &self.bits[j]
    }

    pub fn bit(&self, sample: usize, column: usize) -> bool {
        self.bits[column].get(sample)
    }

    pub fn label(&self, sample: usize) -> bool {
        self.labels.get(sample)
    }

    pub fn labels(&self) -> &Bitset {
        &self.labels
    }

    /// Indices of positive samples (P).
    pub fn positives(&self) -> &[usize] {
        &self.positives
    }

    /// Indices of negative samples (Z).
    pub fn negatives(&self) -> &[usize] {
        &self.negatives
    }

    pub fn features(&self) -> &[RawFeature] {
        &self.features
    }

    pub fn feature(&self, name: &str) -> Option<&RawFeature> {
        self.features.iter().find(|f| f.name == name)
    }

    /// One sample as a row of bits.
    pub fn row(&self, sample: usize) -> Vec<bool> {
        self.bits.iter().map(|c| c.get(sample)).collect()
    }

    pub fn find_column(&self, feature: &str, condition: &Condition) -> Option<usize> {
        self.columns.iter().position(|c| c.same_test(feature, condition))
    }

    /// Appends a column evaluated on the stored raw cells. Returns the index
    /// of an existing column when one already carries the same test.
    pub fn push_column(&mut self, meta: ColumnMeta) -> usize {
        if let Some(j) = self.find_column(&meta.feature, &meta.condition) {
            return j;
        }
        let bits = match self.feature(&meta.feature) {
            Some(f) => Bitset::from_bools(f.cells.iter().map(|c| meta.condition.evaluate(c))),
            None => Bitset::new(self.n_samples()),
        };
        self.columns.push(meta);
        self.bits.push(bits);
        self.columns.len() - 1
    }

    /// Restricts to the given samples (in the given order); columns are kept.
    pub fn subset(&self, samples: &[usize]) -> BinaryDataset {
        let labels = samples.iter().map(|&i| self.labels.get(i)).collect();
        let bits = self.bits.iter().map(|b| b.select(samples)).collect();
        let features = self
            .features
            .iter()
            .map(|f| RawFeature {
                name: f.name.clone(),
                kind: f.kind,
                cells: samples.iter().map(|&i| f.cells[i].clone()).collect(),
            })
            .collect();
        BinaryDataset::from_parts(self.columns.clone(), bits, labels, features)
    }
}
