//! The clinical-trial evidence table: loading, typing, visible copies, stats.
//!
//! Tables are immutable after load and safe to share across workers. Row keys
//! come from the designated key column after canonicalization; duplicate key
//! values receive deterministic `#2`, `#3`, ... suffixes in row order so every
//! row stays individually addressable for alignment.

use crate::value::{canonical_text, parse_number, CellValue};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("target column {0:?} is the key column and cannot be withheld")]
    InvalidTarget(String),
    #[error("key column {0:?} is not in the table")]
    MissingKeyColumn(String),
    #[error("table has no rows")]
    Empty,
    #[error("row {row}, column {column:?}: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Input file format for [`load_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

/// Declared cell kind for a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Text,
    Number,
    Boolean,
    List,
}

/// Per-column typing hint from the sidecar file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnHint {
    pub kind: CellKind,
    pub nullable: bool,
}

impl Default for ColumnHint {
    fn default() -> Self {
        ColumnHint {
            kind: CellKind::Text,
            nullable: false,
        }
    }
}

/// The type-hint sidecar: a JSON map from column name to either a bare kind
/// string (`"text"`) or an object `{"type": "text", "nullable": true}`.
/// Columns absent from the map default to non-nullable text.
#[derive(Debug, Clone, Default)]
pub struct TypeHints {
    columns: BTreeMap<String, ColumnHint>,
}

impl TypeHints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, column: &str, kind: CellKind, nullable: bool) {
        self.columns
            .insert(column.to_string(), ColumnHint { kind, nullable });
    }

    pub fn hint(&self, column: &str) -> ColumnHint {
        self.columns.get(column).copied().unwrap_or_default()
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self, TableError> {
        let raw: BTreeMap<String, serde_json::Value> = serde_json::from_reader(reader)?;
        let mut hints = TypeHints::new();
        for (column, value) in raw {
            let hint = parse_hint(&value).map_err(|message| TableError::Cell {
                row: 0,
                column: column.clone(),
                message,
            })?;
            hints.columns.insert(column, hint);
        }
        Ok(hints)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (column, hint) in &self.columns {
            let kind = serde_json::to_value(hint.kind).expect("kind serializes");
            let value = if hint.nullable {
                serde_json::json!({ "type": kind, "nullable": true })
            } else {
                kind
            };
            map.insert(column.clone(), value);
        }
        serde_json::Value::Object(map)
    }
}

fn parse_hint(value: &serde_json::Value) -> Result<ColumnHint, String> {
    match value {
        serde_json::Value::String(_) => {
            let kind: CellKind =
                serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
            Ok(ColumnHint {
                kind,
                nullable: false,
            })
        }
        serde_json::Value::Object(obj) => {
            let kind_value = obj.get("type").ok_or("missing \"type\"")?;
            let kind: CellKind =
                serde_json::from_value(kind_value.clone()).map_err(|e| e.to_string())?;
            let nullable = obj
                .get("nullable")
                .and_then(serde_json::Value::as_bool)
                .unwrap_or(false);
            Ok(ColumnHint { kind, nullable })
        }
        other => Err(format!("unsupported hint {other}")),
    }
}

/// One table row: the alignment key plus one typed cell per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub key: String,
    pub cells: BTreeMap<String, CellValue>,
}

impl Row {
    pub fn cell(&self, column: &str) -> Option<&CellValue> {
        self.cells.get(column)
    }
}

/// An immutable, fully typed evidence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalTable {
    columns: Vec<String>,
    rows: Vec<Row>,
    key_column: String,
}

impl ClinicalTable {
    /// Assemble a table from column order and raw cells, assigning row keys
    /// from `key_column` with collision suffixes.
    pub fn from_cells(
        columns: Vec<String>,
        cells: Vec<Vec<CellValue>>,
        key_column: &str,
    ) -> Result<Self, TableError> {
        let mut seen = BTreeSet::new();
        for column in &columns {
            if !seen.insert(column.clone()) {
                return Err(TableError::DuplicateColumn(column.clone()));
            }
        }
        if !columns.iter().any(|c| c == key_column) {
            return Err(TableError::MissingKeyColumn(key_column.to_string()));
        }

        let mut key_counts: HashMap<String, usize> = HashMap::new();
        let mut rows = Vec::with_capacity(cells.len());
        for (idx, row_cells) in cells.into_iter().enumerate() {
            if row_cells.len() != columns.len() {
                return Err(TableError::Ragged {
                    row: idx,
                    expected: columns.len(),
                    found: row_cells.len(),
                });
            }
            let mut map = BTreeMap::new();
            for (column, cell) in columns.iter().zip(row_cells) {
                map.insert(column.clone(), cell);
            }
            let base = canonical_text(&map[key_column].display_text());
            let count = key_counts.entry(base.clone()).or_insert(0);
            *count += 1;
            let key = if *count == 1 {
                base
            } else {
                format!("{base}#{count}")
            };
            rows.push(Row { key, cells: map });
        }

        Ok(ClinicalTable {
            columns,
            rows,
            key_column: key_column.to_string(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn key_column(&self) -> &str {
        &self.key_column
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    pub fn row_by_key(&self, key: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.key == key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|r| r.key.as_str())
    }

    /// Distinct canonicalized values observed in a column (insertion order).
    pub fn observed_values(&self, column: &str) -> Result<Vec<CellValue>, TableError> {
        if !self.has_column(column) {
            return Err(TableError::UnknownColumn(column.to_string()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for row in &self.rows {
            let cell = &row.cells[column];
            if cell.is_null() {
                continue;
            }
            if seen.insert(canonical_text(&cell.display_text())) {
                out.push(cell.clone());
            }
        }
        Ok(out)
    }

    /// The inference-time copy with `target_column` withheld. Row order, keys,
    /// and all other cells are untouched.
    pub fn make_visible_copy(&self, target_column: &str) -> Result<ClinicalTable, TableError> {
        if !self.has_column(target_column) {
            return Err(TableError::UnknownColumn(target_column.to_string()));
        }
        if target_column == self.key_column {
            return Err(TableError::InvalidTarget(target_column.to_string()));
        }
        let columns: Vec<String> = self
            .columns
            .iter()
            .filter(|c| c.as_str() != target_column)
            .cloned()
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut cells = row.cells.clone();
                cells.remove(target_column);
                Row {
                    key: row.key.clone(),
                    cells,
                }
            })
            .collect();
        Ok(ClinicalTable {
            columns,
            rows,
            key_column: self.key_column.clone(),
        })
    }

    /// Restrict to the given row keys, preserving table order.
    pub fn restrict_rows(&self, keys: &[String]) -> ClinicalTable {
        let wanted: BTreeSet<&str> = keys.iter().map(String::as_str).collect();
        ClinicalTable {
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| wanted.contains(r.key.as_str()))
                .cloned()
                .collect(),
            key_column: self.key_column.clone(),
        }
    }

    /// Restrict to the given columns (key column always retained first).
    pub fn restrict_columns(&self, columns: &[String]) -> Result<ClinicalTable, TableError> {
        for column in columns {
            if !self.has_column(column) {
                return Err(TableError::UnknownColumn(column.clone()));
            }
        }
        let mut keep: Vec<String> = vec![self.key_column.clone()];
        for column in &self.columns {
            if column != &self.key_column && columns.iter().any(|c| c == column) {
                keep.push(column.clone());
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let cells = keep
                    .iter()
                    .map(|c| (c.clone(), row.cells[c].clone()))
                    .collect();
                Row {
                    key: row.key.clone(),
                    cells,
                }
            })
            .collect();
        Ok(ClinicalTable {
            columns: keep,
            rows,
            key_column: self.key_column.clone(),
        })
    }
}

/// Aggregate table statistics: row/column counts plus unique counts per
/// declared identity column, computed on canonicalized values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableStats {
    pub row_count: usize,
    pub column_count: usize,
    pub unique_counts: BTreeMap<String, usize>,
}

pub fn table_stats(
    table: &ClinicalTable,
    identity_columns: &[String],
) -> Result<TableStats, TableError> {
    let mut unique_counts = BTreeMap::new();
    for column in identity_columns {
        if !table.has_column(column) {
            return Err(TableError::UnknownColumn(column.clone()));
        }
        let distinct: BTreeSet<String> = table
            .rows()
            .iter()
            .map(|row| canonical_text(&row.cells[column].display_text()))
            .collect();
        unique_counts.insert(column.clone(), distinct.len());
    }
    Ok(TableStats {
        row_count: table.row_count(),
        column_count: table.column_count(),
        unique_counts,
    })
}

/// Load a typed table from CSV or a JSON array of objects.
pub fn load_table<R: Read>(
    source: R,
    format: TableFormat,
    hints: &TypeHints,
    key_column: &str,
) -> Result<ClinicalTable, TableError> {
    match format {
        TableFormat::Csv => load_csv(source, hints, key_column),
        TableFormat::Json => load_json(source, hints, key_column),
    }
}

fn load_csv<R: Read>(source: R, hints: &TypeHints, key_column: &str) -> Result<ClinicalTable, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(source);
    let columns: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let mut cells = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != columns.len() {
            return Err(TableError::Ragged {
                row: idx,
                expected: columns.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(columns.len());
        for (column, field) in columns.iter().zip(record.iter()) {
            let cell = parse_csv_cell(field, hints.hint(column)).map_err(|message| {
                TableError::Cell {
                    row: idx,
                    column: column.clone(),
                    message,
                }
            })?;
            row.push(cell);
        }
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(TableError::Empty);
    }
    ClinicalTable::from_cells(columns, cells, key_column)
}

fn parse_csv_cell(field: &str, hint: ColumnHint) -> Result<CellValue, String> {
    if field.is_empty() {
        return Ok(match hint.kind {
            CellKind::List => CellValue::List(Vec::new()),
            _ if hint.nullable => CellValue::Null,
            CellKind::Text => CellValue::Text(String::new()),
            _ => CellValue::Null,
        });
    }
    Ok(match hint.kind {
        CellKind::Text => CellValue::Text(field.to_string()),
        CellKind::Number => CellValue::Number(
            parse_number(field).ok_or_else(|| format!("not a number: {field:?}"))?,
        ),
        CellKind::Boolean => match canonical_text(field).as_str() {
            "true" | "yes" => CellValue::Bool(true),
            "false" | "no" => CellValue::Bool(false),
            other => return Err(format!("not a boolean: {other:?}")),
        },
        CellKind::List => CellValue::list(field.split(';')),
    })
}

fn load_json<R: Read>(source: R, hints: &TypeHints, key_column: &str) -> Result<ClinicalTable, TableError> {
    let raw: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_reader(source)?;
    if raw.is_empty() {
        return Err(TableError::Empty);
    }
    let columns: Vec<String> = raw[0].keys().cloned().collect();
    let mut cells = Vec::with_capacity(raw.len());
    for (idx, object) in raw.iter().enumerate() {
        if object.len() != columns.len() || !columns.iter().all(|c| object.contains_key(c)) {
            return Err(TableError::Ragged {
                row: idx,
                expected: columns.len(),
                found: object.len(),
            });
        }
        let mut row = Vec::with_capacity(columns.len());
        for column in &columns {
            let cell = json_cell(&object[column], hints.hint(column)).map_err(|message| {
                TableError::Cell {
                    row: idx,
                    column: column.clone(),
                    message,
                }
            })?;
            row.push(cell);
        }
        cells.push(row);
    }
    ClinicalTable::from_cells(columns, cells, key_column)
}

fn json_cell(value: &serde_json::Value, hint: ColumnHint) -> Result<CellValue, String> {
    let cell = CellValue::from_json(value)?;
    // JSON is self-describing; the hint only resolves string-encoded numbers
    // and semicolon-joined lists.
    Ok(match (hint.kind, cell) {
        (CellKind::Number, CellValue::Text(s)) => {
            CellValue::Number(parse_number(&s).ok_or_else(|| format!("not a number: {s:?}"))?)
        }
        (CellKind::List, CellValue::Text(s)) if !s.is_empty() => CellValue::list(s.split(';')),
        (CellKind::List, CellValue::Null) => CellValue::List(Vec::new()),
        (_, cell) => cell,
    })
}

/// Serialize a table to CSV (RFC 4180 quoting, semicolon-joined lists).
pub fn write_csv<W: Write>(table: &ClinicalTable, writer: W) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(table.columns())?;
    for row in table.rows() {
        let record: Vec<String> = table
            .columns()
            .iter()
            .map(|c| row.cells[c].display_text())
            .collect();
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// Serialize a table to a JSON array of objects (column order preserved).
pub fn write_json<W: Write>(table: &ClinicalTable, writer: W) -> Result<(), TableError> {
    let mut array = Vec::with_capacity(table.row_count());
    for row in table.rows() {
        let mut object = serde_json::Map::new();
        for column in table.columns() {
            object.insert(column.clone(), row.cells[column].to_json());
        }
        array.push(serde_json::Value::Object(object));
    }
    serde_json::to_writer_pretty(writer, &array)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hints() -> TypeHints {
        let mut h = TypeHints::new();
        h.set("n", CellKind::Number, false);
        h
    }

    #[test]
    fn single_row_csv() {
        let table = load_table("k\nA".as_bytes(), TableFormat::Csv, &TypeHints::new(), "k").unwrap();
        assert_eq!(table.row_count(), 1);
        assert_eq!(table.rows()[0].key, "a");
    }

    #[test]
    fn key_collisions_get_positional_suffixes() {
        let table = load_table("k\nA\nA".as_bytes(), TableFormat::Csv, &TypeHints::new(), "k").unwrap();
        let keys: Vec<&str> = table.keys().collect();
        assert_eq!(keys, vec!["a", "a#2"]);
    }

    #[test]
    fn ragged_row_reports_index() {
        let err = load_table(
            "a,b\n1,2\n3".as_bytes(),
            TableFormat::Csv,
            &TypeHints::new(),
            "a",
        )
        .unwrap_err();
        match err {
            TableError::Ragged { row, .. } => assert_eq!(row, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_column_rejected() {
        let err = load_table("a,a\n1,2".as_bytes(), TableFormat::Csv, &TypeHints::new(), "a")
            .unwrap_err();
        assert!(matches!(err, TableError::DuplicateColumn(_)));
    }

    #[test]
    fn visible_copy_drops_exactly_one_column() {
        let table = load_table(
            "k,n,phase\nA,1,3\nB,2,1\nC,3,2".as_bytes(),
            TableFormat::Csv,
            &hints(),
            "k",
        )
        .unwrap();
        let copy = table.make_visible_copy("phase").unwrap();
        assert_eq!(copy.column_count(), table.column_count() - 1);
        assert_eq!(copy.row_count(), table.row_count());
        let keys_a: Vec<&str> = table.keys().collect();
        let keys_b: Vec<&str> = copy.keys().collect();
        assert_eq!(keys_a, keys_b);
        for (a, b) in table.rows().iter().zip(copy.rows()) {
            for column in copy.columns() {
                assert_eq!(a.cells[column], b.cells[column]);
            }
            assert!(!b.cells.contains_key("phase"));
        }
    }

    #[test]
    fn visible_copy_removals_commute() {
        let table = load_table(
            "k,x,y\nA,1,2\nB,3,4".as_bytes(),
            TableFormat::Csv,
            &TypeHints::new(),
            "k",
        )
        .unwrap();
        let xy = table
            .make_visible_copy("x")
            .unwrap()
            .make_visible_copy("y")
            .unwrap();
        let yx = table
            .make_visible_copy("y")
            .unwrap()
            .make_visible_copy("x")
            .unwrap();
        assert_eq!(xy, yx);
        assert_eq!(xy.column_count(), 1);
    }

    #[test]
    fn visible_copy_error_paths() {
        let table =
            load_table("k,x\nA,1".as_bytes(), TableFormat::Csv, &TypeHints::new(), "k").unwrap();
        assert!(matches!(
            table.make_visible_copy("zzz"),
            Err(TableError::UnknownColumn(_))
        ));
        assert!(matches!(
            table.make_visible_copy("k"),
            Err(TableError::InvalidTarget(_))
        ));
    }

    #[test]
    fn stats_canonicalize_values() {
        let table = load_table(
            "k,ici\nA,PD-1\nB,pd-1 \nC,CTLA-4".as_bytes(),
            TableFormat::Csv,
            &TypeHints::new(),
            "k",
        )
        .unwrap();
        let stats = table_stats(&table, &["ici".to_string()]).unwrap();
        assert_eq!(stats.unique_counts["ici"], 2);
    }

    #[test]
    fn stats_unknown_identity_column() {
        let table =
            load_table("k\nA".as_bytes(), TableFormat::Csv, &TypeHints::new(), "k").unwrap();
        assert!(matches!(
            table_stats(&table, &["nope".to_string()]),
            Err(TableError::UnknownColumn(_))
        ));
    }

    #[test]
    fn csv_round_trip_preserves_cells() {
        let mut hints = TypeHints::new();
        hints.set("n", CellKind::Number, false);
        hints.set("tags", CellKind::List, false);
        hints.set("flag", CellKind::Boolean, true);
        let table = load_table(
            "k,n,tags,flag\nA,2.5,x; y,true\nB,3,,\n".as_bytes(),
            TableFormat::Csv,
            &hints,
            "k",
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&table, &mut buf).unwrap();
        let reloaded = load_table(buf.as_slice(), TableFormat::Csv, &hints, "k").unwrap();
        assert_eq!(table, reloaded);
        assert_eq!(table.rows()[1].cells["flag"], CellValue::Null);
        assert_eq!(table.rows()[1].cells["tags"], CellValue::List(vec![]));
    }

    #[test]
    fn json_round_trip_preserves_cells() {
        let mut hints = TypeHints::new();
        hints.set("n", CellKind::Number, false);
        let table = load_table(
            r#"[{"k":"A","n":1.5,"t":"x"},{"k":"B","n":2,"t":null}]"#.as_bytes(),
            TableFormat::Json,
            &hints,
            "k",
        )
        .unwrap();
        let mut buf = Vec::new();
        write_json(&table, &mut buf).unwrap();
        let reloaded = load_table(buf.as_slice(), TableFormat::Json, &hints, "k").unwrap();
        assert_eq!(table, reloaded);
    }
}
