use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{transform, BinaryDataset, ColumnMeta, DataError, RawTable};
use crate::ruledsl::{BoundConjunction, RuleSet};

use super::{Params, TrainOutcome, TrainReport};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model format version {found} is not supported (expected {MODEL_VERSION})")]
    Version { found: u32 },
    #[error("conjunction references column {column}, model has {n}")]
    UnknownColumn { column: usize, n: usize },
    #[error("malformed model: {0}")]
    Json(#[from] serde_json::Error),
    #[error("data has no feature `{0}` used by the model")]
    MissingFeature(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// A trained rule set with everything needed to apply it to new raw data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub version: u32,
    pub label: String,
    pub columns: Vec<ColumnMeta>,
    pub rules: RuleSet,
    /// Same conjunctions as `rules`, as indices into `columns`.
    pub conjunctions: Vec<BoundConjunction>,
    pub params: Params,
    pub report: TrainReport,
}

impl Model {
    pub fn new(outcome: &TrainOutcome, ds: &BinaryDataset, label: &str, params: &Params) -> Self {
        Self {
            version: MODEL_VERSION,
            label: label.to_string(),
            columns: ds.columns().to_vec(),
            rules: outcome.rule_set.clone(),
            conjunctions: outcome.rules.clone(),
            params: *params,
            report: outcome.report.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        // the struct holds no maps with non-string keys and only finite floats
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.version != MODEL_VERSION {
            return Err(ModelError::Version { found: header.version });
        }
        let model: Model = serde_json::from_str(text)?;
        let n = model.columns.len();
        for k in &model.conjunctions {
            if let Some(&column) = k.columns.iter().find(|&&j| j >= n) {
                return Err(ModelError::UnknownColumn { column, n });
            }
        }
        Ok(model)
    }

    /// Binarizes `raw` with the model's own columns, so conjunction indices
    /// carry over unchanged.
    pub fn binarize(&self, raw: &RawTable) -> Result<BinaryDataset, ModelError> {
        let features = raw.features()?;
        if let Some(c) = self.columns.iter().find(|c| !features.iter().any(|f| f.name == c.feature)) {
            return Err(ModelError::MissingFeature(c.feature.clone()));
        }
        Ok(transform(raw, &self.columns)?)
    }
}
