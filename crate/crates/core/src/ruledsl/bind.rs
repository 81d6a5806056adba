use log::warn;
use serde::{Deserialize, Serialize};

use super::{Conjunction, Literal, Provenance, RuleError, RuleSet, Template};
use crate::dataset::{BinaryDataset, ColumnKind, ColumnMeta, ColumnOrigin, Condition};

/// A conjunction as sorted, distinct column indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundConjunction {
    pub columns: Vec<usize>,
    pub provenance: Provenance,
}

impl BoundConjunction {
    pub fn new(mut columns: Vec<usize>, provenance: Provenance) -> Self {
        columns.sort_unstable();
        columns.dedup();
        Self { columns, provenance }
    }

    pub fn complexity(&self) -> usize {
        self.columns.len()
    }

    /// Whether every column bit is set in `sample`.
    pub fn covers(&self, sample: &[bool]) -> bool {
        self.columns.iter().all(|&j| sample[j])
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundRuleSet {
    pub conjunctions: Vec<BoundConjunction>,
    pub warnings: Vec<String>,
}

impl BoundRuleSet {
    pub fn complexity(&self) -> usize {
        self.conjunctions.iter().map(BoundConjunction::complexity).sum()
    }
}

/// Resolves literals to column indices, appending a synthesized column when
/// no existing column carries exactly the same test.
pub fn bind_literals(
    literals: &[Literal],
    dataset: &mut BinaryDataset,
    warnings: &mut Vec<String>,
) -> Result<Vec<usize>, RuleError> {
    let mut cols = Vec::with_capacity(literals.len());
    for lit in literals {
        let Some(feature) = dataset.feature(&lit.feature) else {
            return Err(RuleError::UnknownFeature(lit.feature.clone()));
        };
        if let Some(j) = dataset.find_column(&lit.feature, &lit.condition) {
            cols.push(j);
            continue;
        }
        if let Condition::Equals(v) | Condition::NotEquals(v) = &lit.condition {
            if feature.kind == ColumnKind::Categorical && !feature.cells.iter().any(|c| c == v) {
                let msg = format!("value `{v}` never observed for `{}`", lit.feature);
                warn!("{msg}");
                warnings.push(msg);
            }
        }
        cols.push(dataset.push_column(ColumnMeta {
            feature: lit.feature.clone(),
            condition: lit.condition.clone(),
            origin: ColumnOrigin::Synthesized,
        }));
    }
    cols.sort_unstable();
    cols.dedup();
    Ok(cols)
}

pub fn bind(rule_set: &RuleSet, dataset: &mut BinaryDataset) -> Result<BoundRuleSet, RuleError> {
    let mut out = BoundRuleSet::default();
    for c in &rule_set.conjunctions {
        let cols = bind_literals(c.literals(), dataset, &mut out.warnings)?;
        let bound = BoundConjunction::new(cols, c.provenance);
        if !out.conjunctions.iter().any(|b| b.columns == bound.columns) {
            out.conjunctions.push(bound);
        }
    }
    Ok(out)
}

pub fn bind_templates(
    templates: &[Template],
    dataset: &mut BinaryDataset,
) -> Result<Vec<Vec<usize>>, RuleError> {
    let mut warnings = Vec::new();
    templates.iter().map(|t| bind_literals(t.literals(), dataset, &mut warnings)).collect()
}

/// Literal form of a column-index conjunction.
pub fn unbind(columns: &[usize], metas: &[ColumnMeta], provenance: Provenance) -> Conjunction {
    let literals =
        columns.iter().map(|&j| Literal::new(metas[j].feature.clone(), metas[j].condition.clone()));
    // a conjunction of distinct satisfiable columns can still be contradictory
    // (e.g. two equalities on one feature); keep the literals as they are then
    Conjunction::new(literals.clone().collect(), provenance).unwrap_or_else(|_| {
        let mut lits: Vec<Literal> = literals.collect();
        lits.sort();
        Conjunction::from_sorted_unchecked(lits, provenance)
    })
}

impl Conjunction {
    pub(crate) fn from_sorted_unchecked(literals: Vec<Literal>, provenance: Provenance) -> Self {
        Self { literals, provenance }
    }
}
