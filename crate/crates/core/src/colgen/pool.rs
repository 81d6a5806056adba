use std::collections::HashMap;

use crate::bitset::Bitset;
use crate::dataset::BinaryDataset;
use crate::metrics::template_distance_columns;

use super::ColgenError;

/// One pooled conjunction with its coverage cached over positives and
/// negatives (indexed by position in `positives()` / `negatives()`).
#[derive(Clone, Debug, PartialEq)]
pub struct PoolEntry {
    pub columns: Vec<usize>,
    pub cover_pos: Bitset,
    pub cover_neg: Bitset,
    pub false_positives: usize,
    pub human: bool,
    pub template_distance: f64,
}

impl PoolEntry {
    pub fn complexity(&self) -> usize {
        self.columns.len()
    }
}

/// The restricted conjunction set, in insertion order, without duplicates.
#[derive(Clone, Debug, Default)]
pub struct ColumnPool {
    entries: Vec<PoolEntry>,
    index: HashMap<Vec<usize>, usize>,
}

/// Coverage of a column set over the positive and negative samples.
pub(crate) fn split_coverage(ds: &BinaryDataset, columns: &[usize]) -> (Bitset, Bitset) {
    let mut cov = Bitset::full(ds.n_samples());
    for &j in columns {
        cov.and_assign(ds.column(j));
    }
    (cov.select(ds.positives()), cov.select(ds.negatives()))
}

impl ColumnPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> &PoolEntry {
        &self.entries[k]
    }

    pub fn position(&self, columns: &[usize]) -> Option<usize> {
        self.index.get(columns).copied()
    }

    pub fn contains(&self, columns: &[usize]) -> bool {
        self.index.contains_key(columns)
    }

    /// Adds a conjunction (columns are sorted and deduplicated). Returns the
    /// entry index and whether it was new; re-adding a machine conjunction as
    /// human upgrades its flag.
    pub fn insert(
        &mut self,
        ds: &BinaryDataset,
        columns: &[usize],
        human: bool,
        templates: &[Vec<usize>],
    ) -> Result<(usize, bool), ColgenError> {
        let mut cols = columns.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if let Some(&j) = cols.iter().find(|&&j| j >= ds.n_columns()) {
            return Err(ColgenError::UnknownColumn { column: j, n: ds.n_columns() });
        }
        if let Some(&k) = self.index.get(&cols) {
            self.entries[k].human |= human;
            return Ok((k, false));
        }
        let (cover_pos, cover_neg) = split_coverage(ds, &cols);
        let template_distance = if templates.is_empty() {
            0.0
        } else {
            template_distance_columns(&cols, templates).map_err(|_| ColgenError::NoTemplates)?
        };
        let k = self.entries.len();
        self.entries.push(PoolEntry {
            false_positives: cover_neg.count_ones(),
            columns: cols.clone(),
            cover_pos,
            cover_neg,
            human,
            template_distance,
        });
        self.index.insert(cols, k);
        Ok((k, true))
    }

    /// Human rules first, then every single column.
    pub fn seeded(
        ds: &BinaryDataset,
        human: &[Vec<usize>],
        templates: &[Vec<usize>],
    ) -> Result<Self, ColgenError> {
        let mut pool = Self::new();
        for h in human {
            pool.insert(ds, h, true, templates)?;
        }
        for j in 0..ds.n_columns() {
            pool.insert(ds, &[j], false, templates)?;
        }
        Ok(pool)
    }
}
