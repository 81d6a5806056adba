//! Accuracy, Hamming loss, semantic rule-set similarity and template distance.

mod hungarian;

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::Bitset;
use crate::dataset::BinaryDataset;
use crate::ruledsl::{BoundConjunction, Conjunction, Literal, RuleSet, Template};

pub use hungarian::{max_weight_matching, min_cost_assignment};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("template set is empty")]
    NoTemplates,
    #[error("conjunction references column {column}, dataset has {n}")]
    Unbound { column: usize, n: usize },
}

/// Samples satisfying every column of `conj`.
pub fn coverage(conj: &BoundConjunction, ds: &BinaryDataset) -> Result<Bitset, MetricError> {
    let mut cov = Bitset::full(ds.n_samples());
    for &j in &conj.columns {
        if j >= ds.n_columns() {
            return Err(MetricError::Unbound { column: j, n: ds.n_columns() });
        }
        cov.and_assign(ds.column(j));
    }
    Ok(cov)
}

/// Per-sample count of covering conjunctions.
fn hit_counts(rules: &[BoundConjunction], ds: &BinaryDataset) -> Result<Vec<usize>, MetricError> {
    let mut hits = vec![0usize; ds.n_samples()];
    for k in rules {
        for i in coverage(k, ds)?.ones() {
            hits[i] += 1;
        }
    }
    Ok(hits)
}

/// Uncovered positives plus, per negative, the number of selected
/// conjunctions covering it.
pub fn hamming_loss(rules: &[BoundConjunction], ds: &BinaryDataset) -> Result<usize, MetricError> {
    let hits = hit_counts(rules, ds)?;
    Ok(hits
        .iter()
        .enumerate()
        .map(|(i, &h)| if ds.label(i) { usize::from(h == 0) } else { h })
        .sum())
}

pub fn accuracy(rules: &[BoundConjunction], ds: &BinaryDataset) -> Result<f64, MetricError> {
    if ds.n_samples() == 0 {
        return Err(MetricError::EmptyDataset);
    }
    let hits = hit_counts(rules, ds)?;
    let correct = hits.iter().enumerate().filter(|&(i, &h)| (h > 0) == ds.label(i)).count();
    Ok(correct as f64 / ds.n_samples() as f64)
}

fn shared(a: &[Literal], b: &[Literal]) -> usize {
    a.iter().filter(|l| b.iter().any(|m| l.matches(m))).count()
}

/// Jaccard index of the two literal sets.
pub fn conjunction_similarity(a: &Conjunction, b: &Conjunction) -> f64 {
    let inter = shared(a.literals(), b.literals());
    let union = a.complexity() + b.complexity() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Best one-to-one pairing of conjunctions by Jaccard similarity, normalized
/// by the larger rule set. Two empty sets agree perfectly.
pub fn ruleset_similarity(a: &RuleSet, b: &RuleSet) -> f64 {
    let (na, nb) = (a.len(), b.len());
    if na == 0 && nb == 0 {
        return 1.0;
    }
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let weights: Vec<Vec<f64>> = a
        .conjunctions
        .iter()
        .map(|x| b.conjunctions.iter().map(|y| conjunction_similarity(x, y)).collect())
        .collect();
    let total = max_weight_matching(&weights, nb);
    (total / na.max(nb) as f64).clamp(0.0, 1.0)
}

fn distance_by<T>(k: &[T], templates: &[&[T]], same: impl Fn(&T, &T) -> bool) -> Result<f64, MetricError> {
    templates
        .iter()
        .map(|t| {
            let hit = t.iter().filter(|l| k.iter().any(|m| same(l, m))).count();
            1.0 - hit as f64 / t.len() as f64
        })
        .reduce(f64::min)
        .ok_or(MetricError::NoTemplates)
}

/// `min over templates t of 1 − |k ∩ t| / |t|`; zero when `k` contains some
/// template entirely.
pub fn template_distance(k: &Conjunction, templates: &[Template]) -> Result<f64, MetricError> {
    let ts: Vec<&[Literal]> = templates.iter().map(Template::literals).collect();
    distance_by(k.literals(), &ts, Literal::matches)
}

/// [`template_distance`] on bound column indices.
pub fn template_distance_columns(k: &[usize], templates: &[Vec<usize>]) -> Result<f64, MetricError> {
    let ts: Vec<&[usize]> = templates.iter().map(Vec::as_slice).collect();
    distance_by(k, &ts, |a, b| a == b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fold: usize,
    pub accuracy: f64,
    pub hamming_loss: usize,
    pub complexity: usize,
    pub similarity: Option<f64>,
}

impl EvalReport {
    pub fn evaluate(
        fold: usize,
        rules: &[BoundConjunction],
        ds: &BinaryDataset,
    ) -> Result<Self, MetricError> {
        Ok(Self {
            fold,
            accuracy: accuracy(rules, ds)?,
            hamming_loss: hamming_loss(rules, ds)?,
            complexity: rules.iter().map(BoundConjunction::complexity).sum(),
            similarity: None,
        })
    }

    /// `fold,metric,value` rows without a header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{},accuracy,{}", self.fold, self.accuracy);
        let _ = writeln!(out, "{},hamming_loss,{}", self.fold, self.hamming_loss);
        let _ = writeln!(out, "{},complexity,{}", self.fold, self.complexity);
        if let Some(s) = self.similarity {
            let _ = writeln!(out, "{},similarity,{}", self.fold, s);
        }
        out
    }
}
