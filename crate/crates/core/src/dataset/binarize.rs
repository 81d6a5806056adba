use std::collections::BTreeSet;

use super::{
    parse_number, BinaryDataset, ColumnKind, ColumnMeta, Condition, DataError, RawFeature,
    RawTable,
};
use crate::bitset::Bitset;

pub const DEFAULT_BINS: usize = 10;

/// Binarizes a raw table: one-hot categoricals (optionally with negations) and
/// quantile-thresholded numerics.
pub fn binarize(
    raw: &RawTable,
    bins: usize,
    include_negations: bool,
) -> Result<BinaryDataset, DataError> {
    let columns = fit_columns(raw, bins, include_negations)?;
    transform(raw, &columns)
}

/// Derives the binary columns for `raw` without materializing the matrix.
pub fn fit_columns(
    raw: &RawTable,
    bins: usize,
    include_negations: bool,
) -> Result<Vec<ColumnMeta>, DataError> {
    if bins < 2 {
        return Err(DataError::TooFewBins(bins));
    }
    if raw.rows.is_empty() {
        return Err(DataError::EmptyTable);
    }
    raw.labels()?;
    let mut columns = Vec::new();
    for feature in raw.features()? {
        match feature.kind {
            ColumnKind::Categorical => {
                let values: BTreeSet<&str> = feature.cells.iter().map(String::as_str).collect();
                if values.len() < 2 {
                    continue;
                }
                for v in &values {
                    columns.push(ColumnMeta::binned(&feature.name, Condition::Equals(v.to_string())));
                }
                if include_negations {
                    for v in &values {
                        columns.push(ColumnMeta::binned(
                            &feature.name,
                            Condition::NotEquals(v.to_string()),
                        ));
                    }
                }
            }
            ColumnKind::Numeric => {
                // features() already rejected non-numeric cells
                let values: Vec<f64> =
                    feature.cells.iter().filter_map(|c| parse_number(c)).collect();
                for t in quantile_thresholds(&values, bins) {
                    columns.push(ColumnMeta::binned(&feature.name, Condition::LessEqual(t)));
                    columns.push(ColumnMeta::binned(&feature.name, Condition::Greater(t)));
                }
            }
        }
    }
    if columns.is_empty() {
        return Err(DataError::NoUsableFeatures);
    }
    Ok(columns)
}

/// Thresholds at the `q/bins` quantiles, each placed midway between the
/// quantile value and the next larger observed value. Strictly increasing;
/// empty for a constant column.
pub fn quantile_thresholds(values: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out: Vec<f64> = Vec::new();
    for q in 1..bins {
        let idx = (q * n).div_ceil(bins).saturating_sub(1);
        let at = sorted[idx];
        let Some(&next) = sorted[idx..].iter().find(|&&v| v > at) else {
            continue;
        };
        let t = at + (next - at) / 2.0;
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

/// Evaluates `columns` on every row of `raw`.
pub fn transform(raw: &RawTable, columns: &[ColumnMeta]) -> Result<BinaryDataset, DataError> {
    if raw.rows.is_empty() {
        return Err(DataError::EmptyTable);
    }
    let labels = raw.labels()?;
    let features: Vec<RawFeature> = raw.features()?;
    let bits = columns
        .iter()
        .map(|meta| match features.iter().find(|f| f.name == meta.feature) {
            Some(f) => Bitset::from_bools(f.cells.iter().map(|c| meta.condition.evaluate(c))),
            None => Bitset::new(labels.len()),
        })
        .collect();
    Ok(BinaryDataset::from_parts(columns.to_vec(), bits, labels, features))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_tictactoe;
    use proptest::prelude::*;

    fn numeric_table(values: &[&str]) -> RawTable {
        RawTable::new(
            vec!["a".into(), "y".into()],
            vec![ColumnKind::Numeric, ColumnKind::Categorical],
            values
                .iter()
                .enumerate()
                .map(|(i, v)| vec![v.to_string(), (i % 2 == 0).to_string()])
                .collect(),
            "y",
        )
        .unwrap()
    }

    #[test]
    fn tictactoe_has_54_columns() {
        let ds = binarize(&generate_tictactoe(), DEFAULT_BINS, true).unwrap();
        assert_eq!(ds.n_columns(), 54);
        // enumerate metas: each of the 9 cells contributes 3 equals + 3 not-equals
        for r in 0..3 {
            for c in 0..3 {
                let name = format!("cell_r{r}_c{c}");
                let eq = ds
                    .columns()
                    .iter()
                    .filter(|m| m.feature == name && matches!(m.condition, Condition::Equals(_)))
                    .count();
                let ne = ds
                    .columns()
                    .iter()
                    .filter(|m| m.feature == name && matches!(m.condition, Condition::NotEquals(_)))
                    .count();
                assert_eq!((eq, ne), (3, 3));
            }
        }
        let no_neg = binarize(&generate_tictactoe(), DEFAULT_BINS, false).unwrap();
        assert_eq!(no_neg.n_columns(), 27);
    }

    #[test]
    fn constant_numeric_is_unusable() {
        let t = numeric_table(&["3", "3", "3"]);
        assert!(matches!(binarize(&t, 4, true), Err(DataError::NoUsableFeatures)));
    }

    #[test]
    fn median_split_is_complementary() {
        let t = numeric_table(&["1", "2", "3", "4"]);
        let ds = binarize(&t, 2, true).unwrap();
        assert_eq!(ds.n_columns(), 2);
        assert_eq!(ds.columns()[0].condition, Condition::LessEqual(2.5));
        assert_eq!(ds.columns()[1].condition, Condition::Greater(2.5));
        for i in 0..4 {
            assert_ne!(ds.bit(i, 0), ds.bit(i, 1));
        }
    }

    #[test]
    fn non_numeric_cell_is_rejected() {
        let t = numeric_table(&["1", "two"]);
        assert!(matches!(binarize(&t, 2, true), Err(DataError::NonNumeric { row: 1, .. })));
    }

    #[test]
    fn non_binary_label_is_rejected() {
        let mut t = numeric_table(&["1", "2"]);
        t.rows[1][1] = "maybe".into();
        assert!(matches!(binarize(&t, 2, true), Err(DataError::NonBinaryLabel { row: 1, .. })));
    }

    #[test]
    fn empty_table_and_bad_bins() {
        let t = numeric_table(&[]);
        assert!(matches!(binarize(&t, 2, true), Err(DataError::EmptyTable)));
        let t = numeric_table(&["1", "2"]);
        assert!(matches!(binarize(&t, 1, true), Err(DataError::TooFewBins(1))));
    }

    #[test]
    fn full_matrix_audit_on_mixed_table() {
        let rows = vec![
            vec!["red", "1.5", "true"],
            vec!["blue", "7", "false"],
            vec!["red", "3", "true"],
            vec!["green", "-2", "false"],
            vec!["blue", "3", "true"],
        ];
        let t = RawTable::new(
            vec!["color".into(), "v".into(), "y".into()],
            vec![ColumnKind::Categorical, ColumnKind::Numeric, ColumnKind::Categorical],
            rows.into_iter().map(|r| r.into_iter().map(String::from).collect()).collect(),
            "y",
        )
        .unwrap();
        let ds = binarize(&t, 3, true).unwrap();
        for (j, meta) in ds.columns().iter().enumerate() {
            let ci = t.column_index(&meta.feature).unwrap();
            for i in 0..t.n_rows() {
                assert_eq!(ds.bit(i, j), meta.condition.evaluate(&t.rows[i][ci]));
            }
        }
        // no semantically identical column tests
        for a in 0..ds.n_columns() {
            for b in a + 1..ds.n_columns() {
                let (ma, mb) = (&ds.columns()[a], &ds.columns()[b]);
                assert!(!ma.same_test(&mb.feature, &mb.condition));
            }
        }
    }

    proptest! {
        #[test]
        fn thresholds_strictly_increase_between_observations(
            values in proptest::collection::vec(-50i32..50, 1..60),
            bins in 2usize..12,
        ) {
            let values: Vec<f64> = values.into_iter().map(|v| v as f64 / 4.0).collect();
            let ts = quantile_thresholds(&values, bins);
            prop_assert!(ts.len() < bins);
            for w in ts.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for t in ts {
                prop_assert!(values.iter().any(|&v| v < t));
                prop_assert!(values.iter().any(|&v| v > t));
                prop_assert!(values.iter().all(|&v| v != t));
            }
        }
    }
}
