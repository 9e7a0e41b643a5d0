//! Columnar tables loaded from CSV with declared per-column coercions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::Cell;
use crate::decimal::Decimal;
use crate::rng::SplitMix64;

/// Stable 0-based row identifier, assigned at load and preserved by sampling.
pub type RowId = u64;

/// How raw CSV text in a column is coerced at load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredType {
    Text,
    Currency,
    Date,
    Number,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    #[serde(rename = "type")]
    pub declared_type: DeclaredType,
    #[serde(default = "default_nullable")]
    pub nullable: bool,
}

fn default_nullable() -> bool {
    true
}

impl ColumnMeta {
    pub fn new(name: impl Into<String>, declared_type: DeclaredType) -> ColumnMeta {
        ColumnMeta {
            name: name.into(),
            declared_type,
            nullable: true,
        }
    }
}

/// An immutable, named, columnar dataset. Every row has exactly one cell per
/// column; row ids are contiguous at load and survive sampling unchanged.
#[derive(Clone, Debug)]
pub struct Table {
    name: String,
    columns: Vec<ColumnMeta>,
    index: HashMap<String, usize>,
    rows: Vec<Vec<Cell>>,
    row_ids: Vec<RowId>,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("unknown column: {0}")]
    UnknownColumn(String),
    #[error("duplicate column name: {0}")]
    DuplicateColumn(String),
    #[error("row has {got} cells but the table has {want} columns")]
    RowArity { got: usize, want: usize },
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<ColumnMeta>) -> Result<Table, TableError> {
        let mut index = HashMap::with_capacity(columns.len());
        for (i, meta) in columns.iter().enumerate() {
            if index.insert(meta.name.clone(), i).is_some() {
                return Err(TableError::DuplicateColumn(meta.name.clone()));
            }
        }
        Ok(Table {
            name: name.into(),
            columns,
            index,
            rows: Vec::new(),
            row_ids: Vec::new(),
        })
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) -> Result<RowId, TableError> {
        if cells.len() != self.columns.len() {
            return Err(TableError::RowArity {
                got: cells.len(),
                want: self.columns.len(),
            });
        }
        let id = self.rows.len() as RowId;
        self.rows.push(cells);
        self.row_ids.push(id);
        Ok(id)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.rows[row][col]
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        &self.rows[row]
    }

    pub fn row_id(&self, row: usize) -> RowId {
        self.row_ids[row]
    }

    /// Mutable cell access for corpus construction; validation never uses it.
    pub fn cell_mut(&mut self, row: usize, col: usize) -> &mut Cell {
        &mut self.rows[row][col]
    }

    /// Append a column, returning a new table.
    pub fn with_column(&self, meta: ColumnMeta, cells: Vec<Cell>) -> Result<Table, TableError> {
        if self.index.contains_key(&meta.name) {
            return Err(TableError::DuplicateColumn(meta.name));
        }
        if cells.len() != self.rows.len() {
            return Err(TableError::RowArity {
                got: cells.len(),
                want: self.rows.len(),
            });
        }
        let mut columns = self.columns.clone();
        columns.push(meta);
        let mut out = Table::new(self.name.clone(), columns)?;
        out.rows = self
            .rows
            .iter()
            .zip(cells)
            .map(|(row, extra)| {
                let mut row = row.clone();
                row.push(extra);
                row
            })
            .collect();
        out.row_ids = self.row_ids.clone();
        Ok(out)
    }

    /// Draw `k` distinct key values uniformly without replacement and keep
    /// every row whose key was drawn. Original row ids are preserved. The
    /// result depends only on table content, `key_column`, `k`, and `seed`:
    /// keys are put in canonical cell order before the seeded draw, so the
    /// in-memory row order cannot influence the outcome.
    pub fn sample_by_key(
        &self,
        key_column: &str,
        k: usize,
        seed: u64,
    ) -> Result<Table, TableError> {
        let col = self
            .column_index(key_column)
            .ok_or_else(|| TableError::UnknownColumn(key_column.to_string()))?;
        let distinct: BTreeSet<&Cell> = self.rows.iter().map(|r| &r[col]).collect();
        let mut keys: Vec<&Cell> = distinct.into_iter().collect();
        if k >= keys.len() {
            return Ok(self.clone());
        }
        let mut rng = SplitMix64::new(seed);
        rng.partial_shuffle(&mut keys, k);
        let chosen: HashSet<&Cell> = keys[..k].iter().copied().collect();
        let mut out =
            Table::new(self.name.clone(), self.columns.clone()).expect("columns already validated");
        for (i, row) in self.rows.iter().enumerate() {
            if chosen.contains(&row[col]) {
                out.rows.push(row.clone());
                out.row_ids.push(self.row_ids[i]);
            }
        }
        Ok(out)
    }

    /// Write the table as canonical CSV (header row, empty fields for nulls,
    /// numbers and dates in canonical rendering).
    pub fn write_csv(&self, path: &Path) -> Result<(), std::io::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render()))?;
        }
        w.flush()
    }
}

// ---------------------------------------------------------------------------
// Coercions
// ---------------------------------------------------------------------------

/// Strip currency decoration ("$", ",", surrounding whitespace, accounting
/// parentheses for negatives) and parse the remainder as an exact decimal.
pub fn coerce_currency(raw: &str) -> Result<Decimal, String> {
    let trimmed = raw.trim();
    let (negative, body) = match trimmed.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        Some(inner) => (true, inner),
        None => (false, trimmed),
    };
    let stripped: String = body.chars().filter(|c| *c != '$' && *c != ',').collect();
    let stripped = stripped.trim();
    if stripped.is_empty() {
        return Err("no digits after stripping currency symbols".to_string());
    }
    let value: Decimal = stripped
        .parse()
        .map_err(|e: crate::decimal::ParseDecimalError| e.reason)?;
    Ok(if negative {
        Decimal::from_raw(-value.raw())
    } else {
        value
    })
}

/// Accept exactly `YYYY-MM-DD` with a valid calendar date.
pub fn coerce_date(raw: &str) -> Result<NaiveDate, String> {
    let b = raw.as_bytes();
    let shape_ok = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if !shape_ok {
        return Err("does not match YYYY-MM-DD".to_string());
    }
    let year: i32 = raw[0..4].parse().unwrap();
    let month: u32 = raw[5..7].parse().unwrap();
    let day: u32 = raw[8..10].parse().unwrap();
    NaiveDate::from_ymd_opt(year, month, day).ok_or_else(|| "impossible calendar date".to_string())
}

/// Parse a plain decimal number (no separators).
pub fn coerce_number(raw: &str) -> Result<Decimal, String> {
    raw.trim()
        .parse()
        .map_err(|e: crate::decimal::ParseDecimalError| e.reason)
}

/// Apply the declared coercion to one cell. `Null` passes through untouched;
/// a failed coercion yields `Null` plus the failure reason, never an error.
pub fn coerce_cell(declared: DeclaredType, cell: Cell) -> (Cell, Option<String>) {
    let raw = match cell {
        Cell::Null => return (Cell::Null, None),
        Cell::Text(s) => s,
        other => return (other, None),
    };
    match declared {
        DeclaredType::Text => (Cell::Text(raw), None),
        DeclaredType::Currency => match coerce_currency(&raw) {
            Ok(n) => (Cell::Number(n), None),
            Err(reason) => (Cell::Null, Some(reason)),
        },
        DeclaredType::Number => match coerce_number(&raw) {
            Ok(n) => (Cell::Number(n), None),
            Err(reason) => (Cell::Null, Some(reason)),
        },
        DeclaredType::Date => match coerce_date(&raw) {
            Ok(d) => (Cell::Date(d), None),
            Err(reason) => (Cell::Null, Some(reason)),
        },
    }
}

// ---------------------------------------------------------------------------
// CSV loading
// ---------------------------------------------------------------------------

/// One per-cell coercion failure recorded during load. The cell is left
/// `Null`; the row itself is kept.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LoadDiagnostic {
    pub row: RowId,
    pub column: String,
    pub raw: String,
    pub reason: String,
}

impl LoadDiagnostic {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

#[derive(Debug)]
pub struct LoadOutcome {
    pub table: Table,
    pub diagnostics: Vec<LoadDiagnostic>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: declared columns missing from header: {missing}")]
    HeaderMismatch { path: String, missing: String },
    #[error("{path}: ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        path: String,
        line: u64,
        expected: u64,
        found: u64,
    },
    #[error("duplicate declared column: {0}")]
    DuplicateColumn(String),
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
}

/// Load a CSV file into a table using the declared column set.
///
/// The header row must contain every declared name (extra CSV columns are
/// ignored). Empty fields become `Null`; declared coercions are applied per
/// cell, and failures are returned as diagnostics rather than errors.
pub fn load_table(path: &Path, name: &str, metas: &[ColumnMeta]) -> Result<LoadOutcome, LoadError> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| {
            let message = e.to_string();
            match e.into_kind() {
                csv::ErrorKind::Io(source) => LoadError::Io {
                    path: display.clone(),
                    source,
                },
                _ => LoadError::Csv {
                    path: display.clone(),
                    message,
                },
            }
        })?;

    let headers = reader
        .headers()
        .map_err(|e| LoadError::Csv {
            path: display.clone(),
            message: e.to_string(),
        })?
        .clone();
    let mut positions = Vec::with_capacity(metas.len());
    let mut missing = Vec::new();
    for meta in metas {
        match headers.iter().position(|h| h == meta.name) {
            Some(p) => positions.push(p),
            None => missing.push(meta.name.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(LoadError::HeaderMismatch {
            path: display,
            missing: missing.join(", "),
        });
    }

    let mut table =
        Table::new(name, metas.to_vec()).map_err(|e| LoadError::DuplicateColumn(e.to_string()))?;
    let mut diagnostics = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => LoadError::RaggedRow {
                path: display.clone(),
                line: pos.as_ref().map(|p| p.line()).unwrap_or(0),
                expected: *expected_len,
                found: *len,
            },
            _ => LoadError::Csv {
                path: display.clone(),
                message: e.to_string(),
            },
        })?;
        let row_id = table.row_count() as RowId;
        let mut cells = Vec::with_capacity(metas.len());
        for (meta, &pos) in metas.iter().zip(&positions) {
            let raw = &record[pos];
            let initial = if raw.is_empty() {
                Cell::Null
            } else {
                Cell::Text(raw.to_string())
            };
            let (cell, failure) = coerce_cell(meta.declared_type, initial);
            if let Some(reason) = failure {
                diagnostics.push(LoadDiagnostic {
                    row: row_id,
                    column: meta.name.clone(),
                    raw: raw.to_string(),
                    reason,
                });
            }
            cells.push(cell);
        }
        table.push_row(cells).expect("arity checked by csv reader");
    }
    Ok(LoadOutcome { table, diagnostics })
}
