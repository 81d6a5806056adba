use std::path::Path;

use super::{parse_number, ColumnKind, DataError, RawTable};

/// Column names and kinds expected in a CSV file, plus the label column.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub columns: Vec<(String, ColumnKind)>,
    pub label: String,
}

impl Schema {
    /// Parses one `name kind` pair per line; a third token `label` marks the
    /// label column. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Schema, DataError> {
        let mut columns = Vec::new();
        let mut label = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',' || c == ':')
                .filter(|s| !s.is_empty())
                .collect();
            let (name, kind) = match parts.as_slice() {
                [name, kind] | [name, kind, _] => (*name, kind.parse::<ColumnKind>()?),
                _ => return Err(DataError::UnknownKind(line.to_string())),
            };
            if parts.get(2).is_some_and(|m| m.eq_ignore_ascii_case("label")) {
                label = Some(name.to_string());
            }
            columns.push((name.to_string(), kind));
        }
        let label = label.ok_or_else(|| DataError::MissingLabel(String::new()))?;
        Ok(Schema { columns, label })
    }

    /// Reads the header and marks a column numeric when every cell parses as
    /// a finite number. The label column is always categorical.
    pub fn infer(path: &Path, label: &str) -> Result<Schema, DataError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut numeric = vec![true; header.len()];
        let mut any_row = false;
        for record in reader.records() {
            let record = record?;
            any_row = true;
            for (j, cell) in record.iter().enumerate().take(header.len()) {
                if parse_number(cell).is_none() {
                    numeric[j] = false;
                }
            }
        }
        if !header.iter().any(|h| h == label) {
            return Err(DataError::MissingLabel(label.to_string()));
        }
        let columns = header
            .into_iter()
            .zip(numeric)
            .map(|(name, num)| {
                let kind = if num && any_row && name != label {
                    ColumnKind::Numeric
                } else {
                    ColumnKind::Categorical
                };
                (name, kind)
            })
            .collect();
        Ok(Schema { columns, label: label.to_string() })
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|(n, _)| n.clone()).collect()
    }
}

pub fn load_csv(path: &Path, schema: &Schema) -> Result<RawTable, DataError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let names = schema.names();
    if header != names {
        return Err(DataError::HeaderMismatch {
            expected: names.join(", "),
            found: header.join(", "),
        });
    }
    let mut rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() > names.len() {
            return Err(DataError::RowLength { row, expected: names.len(), found: record.len() });
        }
        let mut cells = Vec::with_capacity(names.len());
        for (j, name) in names.iter().enumerate() {
            match record.get(j) {
                Some(cell) if !cell.is_empty() => cells.push(cell.to_string()),
                _ => return Err(DataError::MissingCell { row, column: name.clone() }),
            }
        }
        rows.push(cells);
    }
    RawTable::new(
        names,
        schema.columns.iter().map(|(_, k)| *k).collect(),
        rows,
        schema.label.clone(),
    )
}

pub fn load_csv_inferred(path: &Path, label: &str) -> Result<RawTable, DataError> {
    let schema = Schema::infer(path, label)?;
    load_csv(path, &schema)
}

/// Writes the table with a header row. The file is written next to `path`
/// and renamed into place.
pub fn save_csv(table: &RawTable, path: &Path) -> Result<(), DataError> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut writer = csv::Writer::from_path(&tmp)?;
        writer.write_record(&table.names)?;
        for row in &table.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
