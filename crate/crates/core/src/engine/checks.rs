//! One check per expectation kind.
//!
//! Shared scoping rule: a row outside the `where` condition contributes to
//! neither `evaluated` nor `failed`. Kind-specific exclusions (null cells
//! for pattern/set membership, exemption matches, rows without a benchmark
//! or total) also leave the denominator; they surface as diagnostic counts
//! instead. Failing samples always hold the smallest failing row ids, in
//! ascending order, independent of how rows were partitioned across workers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Range;

use chrono::Datelike;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cell::Cell;
use crate::condition::{eval_condition, ConditionExpr, EvalError};
use crate::decimal::Decimal;
use crate::model::{
    BenchmarkTable, Expectation, ExpectationKind, Registries, SalaryBracketSchema, SchemaWindow,
};
use crate::table::{DeclaredType, RowId, Table};

use super::EvalOptions;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unknown column {column:?} in table {table:?}")]
    UnknownColumn { table: String, column: String },
    #[error("column {column:?} in table {table:?} is not numeric")]
    NonNumericColumn { table: String, column: String },
    #[error(transparent)]
    Condition(#[from] EvalError),
    #[error("column {column:?} at row {row_id}: {detail}")]
    CellType {
        column: String,
        row_id: RowId,
        detail: String,
    },
    #[error("ambiguous total: {count} rows in {table:?} share key [{key}]")]
    AmbiguousTotal {
        table: String,
        key: String,
        count: u64,
    },
    #[error("no benchmark table loaded")]
    MissingBenchmark,
    #[error("no salary bracket schema for era {era_start}-{era_end}")]
    MissingBrackets { era_start: i32, era_end: i32 },
    #[error("table not loaded: {0:?}")]
    MissingTable(String),
}

/// Counts, samples, and diagnostics for one evaluated expectation.
#[derive(Clone, Debug, Default)]
pub struct CheckOutcome {
    pub evaluated: u64,
    pub passed: u64,
    pub failed: u64,
    pub failing_samples: Vec<RowId>,
    pub diagnostics: BTreeMap<String, Value>,
}

// ---------------------------------------------------------------------------
// Parallel row driver
// ---------------------------------------------------------------------------

fn chunk_ranges(rows: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    let mut out = Vec::with_capacity(rows / chunk + 1);
    let mut start = 0;
    while start < rows {
        let end = (start + chunk).min(rows);
        out.push(start..end);
        start = end;
    }
    out
}

/// Per-chunk accumulator. Merging is associative and applied in chunk
/// order, which keeps aggregation independent of worker scheduling.
#[derive(Clone, Debug)]
struct Acc {
    evaluated: u64,
    passed: u64,
    failed: u64,
    samples: Vec<RowId>,
    sample_cap: usize,
    counters: BTreeMap<&'static str, u64>,
    by_key: BTreeMap<String, u64>,
}

impl Acc {
    fn new(sample_cap: usize) -> Acc {
        Acc {
            evaluated: 0,
            passed: 0,
            failed: 0,
            samples: Vec::new(),
            sample_cap,
            counters: BTreeMap::new(),
            by_key: BTreeMap::new(),
        }
    }

    fn pass(&mut self) {
        self.evaluated += 1;
        self.passed += 1;
    }

    fn fail(&mut self, row_id: RowId) {
        self.evaluated += 1;
        self.failed += 1;
        if self.samples.len() < self.sample_cap {
            self.samples.push(row_id);
        }
    }

    fn exclude(&mut self, reason: &'static str) {
        *self.counters.entry(reason).or_insert(0) += 1;
    }

    fn count_key(&mut self, key: &str) {
        *self.by_key.entry(key.to_string()).or_insert(0) += 1;
    }

    fn merge(&mut self, other: Acc) {
        self.evaluated += other.evaluated;
        self.passed += other.passed;
        self.failed += other.failed;
        for sample in other.samples {
            if self.samples.len() >= self.sample_cap {
                break;
            }
            self.samples.push(sample);
        }
        for (k, v) in other.counters {
            *self.counters.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.by_key {
            *self.by_key.entry(k).or_insert(0) += v;
        }
    }

    fn into_outcome(self) -> CheckOutcome {
        let mut diagnostics = BTreeMap::new();
        for (k, v) in self.counters {
            diagnostics.insert(k.to_string(), json!(v));
        }
        CheckOutcome {
            evaluated: self.evaluated,
            passed: self.passed,
            failed: self.failed,
            failing_samples: self.samples,
            diagnostics,
        }
    }
}

/// Run `per_chunk` over fixed row ranges on the current rayon pool and
/// merge the accumulators in chunk order.
fn run_chunks<F>(table: &Table, opts: &EvalOptions, per_chunk: F) -> Result<Acc, CheckError>
where
    F: Fn(Range<usize>, &mut Acc) -> Result<(), CheckError> + Sync,
{
    let ranges = chunk_ranges(table.row_count(), opts.chunk_rows);
    let chunks: Result<Vec<Acc>, CheckError> = ranges
        .into_par_iter()
        .map(|range| {
            let mut acc = Acc::new(opts.sample_cap);
            per_chunk(range, &mut acc)?;
            Ok(acc)
        })
        .collect();
    let mut merged = Acc::new(opts.sample_cap);
    for acc in chunks? {
        merged.merge(acc);
    }
    Ok(merged)
}

fn in_scope(where_: Option<&ConditionExpr>, table: &Table, row: usize) -> Result<bool, CheckError> {
    match where_ {
        Some(cond) => Ok(eval_condition(cond, table, row)?),
        None => Ok(true),
    }
}

/// Evaluate `per_row` over every in-scope row, chunked across the current
/// rayon pool.
fn run_rowwise<F>(
    table: &Table,
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
    per_row: F,
) -> Result<Acc, CheckError>
where
    F: Fn(usize, &mut Acc) -> Result<(), CheckError> + Sync,
{
    run_chunks(table, opts, |range, acc| {
        for row in range {
            if !in_scope(where_, table, row)? {
                continue;
            }
            per_row(row, acc)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Column helpers
// ---------------------------------------------------------------------------

fn col(table: &Table, name: &str) -> Result<usize, CheckError> {
    table
        .column_index(name)
        .ok_or_else(|| CheckError::UnknownColumn {
            table: table.name().to_string(),
            column: name.to_string(),
        })
}

fn numeric_col(table: &Table, name: &str) -> Result<usize, CheckError> {
    let idx = col(table, name)?;
    match table.columns()[idx].declared_type {
        DeclaredType::Currency | DeclaredType::Number => Ok(idx),
        _ => Err(CheckError::NonNumericColumn {
            table: table.name().to_string(),
            column: name.to_string(),
        }),
    }
}

fn number_or_null(
    table: &Table,
    row: usize,
    idx: usize,
    column: &str,
) -> Result<Option<Decimal>, CheckError> {
    match table.cell(row, idx) {
        Cell::Null => Ok(None),
        Cell::Number(n) => Ok(Some(*n)),
        other => Err(CheckError::CellType {
            column: column.to_string(),
            row_id: table.row_id(row),
            detail: format!("expected a number, found {}", other.kind()),
        }),
    }
}

/// Fiscal year of a cell: the year of a date, or an integral number.
/// `None` for null or non-integral values.
fn year_of_cell(cell: &Cell) -> Option<i32> {
    match cell {
        Cell::Date(d) => Some(d.year()),
        Cell::Number(n) => n.as_int().and_then(|v| i32::try_from(v).ok()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Value checks
// ---------------------------------------------------------------------------

/// A row passes iff the cell is not null.
pub fn check_not_null(
    table: &Table,
    column: &str,
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let idx = col(table, column)?;
    let acc = run_rowwise(table, where_, opts, |row, acc| {
        if table.cell(row, idx).is_null() {
            acc.fail(table.row_id(row));
        } else {
            acc.pass();
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

/// A row passes iff at least one of the listed cells is not null.
pub fn check_any_not_null(
    table: &Table,
    columns: &[String],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let idxs: Vec<usize> = columns
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let acc = run_rowwise(table, where_, opts, |row, acc| {
        if idxs.iter().any(|i| !table.cell(row, *i).is_null()) {
            acc.pass();
        } else {
            acc.fail(table.row_id(row));
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

/// Non-null cells pass iff their full rendering matches the anchored
/// pattern. Null cells are excluded; missingness is a separate check.
pub fn check_pattern(
    table: &Table,
    column: &str,
    regex: &regex::Regex,
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let idx = col(table, column)?;
    let acc = run_chunks(table, opts, |range, acc| {
        // A clone per chunk gives each worker its own match-state pool;
        // sharing one regex across threads serializes on its scratch cache.
        let regex = regex.clone();
        for row in range {
            if !in_scope(where_, table, row)? {
                continue;
            }
            let matched = match table.cell(row, idx) {
                Cell::Null => {
                    acc.exclude("null_cells");
                    continue;
                }
                Cell::Text(s) => regex.is_match(s),
                other => regex.is_match(&other.render()),
            };
            if matched {
                acc.pass();
            } else {
                acc.fail(table.row_id(row));
            }
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

/// Case-sensitive exact membership; null cells are excluded.
pub fn check_set_membership(
    table: &Table,
    column: &str,
    allowed: &[String],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let idx = col(table, column)?;
    let set: HashSet<&str> = allowed.iter().map(|s| s.as_str()).collect();
    let acc = run_rowwise(table, where_, opts, |row, acc| {
        let member = match table.cell(row, idx) {
            Cell::Null => {
                acc.exclude("null_cells");
                return Ok(());
            }
            Cell::Text(s) => set.contains(s.as_str()),
            other => set.contains(other.render().as_str()),
        };
        if member {
            acc.pass();
        } else {
            acc.fail(table.row_id(row));
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

/// |total − Σ parts| ≤ tolerance, with null parts summing as zero. Rows
/// where every part is null, or the total is null, are excluded.
pub fn check_pair_sum_tolerance(
    table: &Table,
    total_column: &str,
    part_columns: &[String],
    tolerance: Decimal,
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let total_idx = numeric_col(table, total_column)?;
    let part_idxs: Vec<usize> = part_columns
        .iter()
        .map(|c| numeric_col(table, c))
        .collect::<Result<_, _>>()?;
    let tol = tolerance.raw() as i128;
    let acc = run_rowwise(table, where_, opts, |row, acc| {
        let mut any_part = false;
        let mut sum: i128 = 0;
        for (idx, name) in part_idxs.iter().zip(part_columns) {
            if let Some(n) = number_or_null(table, row, *idx, name)? {
                any_part = true;
                sum += n.raw() as i128;
            }
        }
        if !any_part {
            acc.exclude("all_parts_null");
            return Ok(());
        }
        let total = match number_or_null(table, row, total_idx, total_column)? {
            Some(n) => n.raw() as i128,
            None => {
                acc.exclude("null_total");
                return Ok(());
            }
        };
        if (total - sum).abs() <= tol {
            acc.pass();
        } else {
            acc.fail(table.row_id(row));
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

// ---------------------------------------------------------------------------
// Schema windows
// ---------------------------------------------------------------------------

/// Every (row, window) pair is one evaluation unit: a pair fails when the
/// row's fiscal year lies outside the window and the cell is non-null.
/// Rows whose fiscal year is null are excluded entirely.
pub fn check_schema_window_nullness(
    table: &Table,
    windows: &[&SchemaWindow],
    year_column: &str,
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let year_idx = col(table, year_column)?;
    let window_idxs: Vec<(usize, &SchemaWindow)> = windows
        .iter()
        .map(|w| col(table, &w.column).map(|idx| (idx, *w)))
        .collect::<Result<_, _>>()?;
    let mut acc = run_rowwise(table, where_, opts, |row, acc| {
        let year = match year_of_cell(table.cell(row, year_idx)) {
            Some(y) => y,
            None => {
                acc.exclude("null_year_rows");
                return Ok(());
            }
        };
        let mut row_failed = false;
        for (idx, window) in &window_idxs {
            let outside = year < window.start_year || year > window.end_year;
            if outside && !table.cell(row, *idx).is_null() {
                acc.evaluated += 1;
                acc.failed += 1;
                acc.count_key(&window.column);
                row_failed = true;
            } else {
                acc.evaluated += 1;
                acc.passed += 1;
            }
        }
        if row_failed && acc.samples.len() < acc.sample_cap {
            acc.samples.push(table.row_id(row));
        }
        Ok(())
    })?;
    let by_column = std::mem::take(&mut acc.by_key);
    let mut outcome = acc.into_outcome();
    outcome
        .diagnostics
        .insert("violating_columns".to_string(), json!(by_column.len()));
    outcome
        .diagnostics
        .insert("violations_by_column".to_string(), json!(by_column));
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Foreign keys
// ---------------------------------------------------------------------------

/// A row passes iff its composite key exists in the target table. Rows with
/// any null key component are excluded.
pub fn check_foreign_key(
    table: &Table,
    key_columns: &[String],
    target_table: &Table,
    target_key_columns: &[String],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let src_idxs: Vec<usize> = key_columns
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let dst_idxs: Vec<usize> = target_key_columns
        .iter()
        .map(|c| col(target_table, c))
        .collect::<Result<_, _>>()?;

    let mut target_keys: HashSet<Vec<Cell>> = HashSet::with_capacity(target_table.row_count());
    for row in 0..target_table.row_count() {
        target_keys.insert(
            dst_idxs
                .iter()
                .map(|i| target_table.cell(row, *i).clone())
                .collect(),
        );
    }

    let acc = run_rowwise(table, where_, opts, |row, acc| {
        let mut key = Vec::with_capacity(src_idxs.len());
        for idx in &src_idxs {
            let cell = table.cell(row, *idx);
            if cell.is_null() {
                acc.exclude("null_key_rows");
                return Ok(());
            }
            key.push(cell.clone());
        }
        if target_keys.contains(&key) {
            acc.pass();
        } else {
            acc.fail(table.row_id(row));
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

// ---------------------------------------------------------------------------
// Benchmark upper bound
// ---------------------------------------------------------------------------

/// Amounts must not exceed the benchmark limit for the row's (region, year,
/// donor class). Exemption-matched rows, rows without a usable benchmark
/// key, and rows with a null amount are excluded with diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn check_benchmark_upper_bound(
    table: &Table,
    amount_column: &str,
    region_column: &str,
    year_column: &str,
    donor_class: &str,
    benchmarks: &BenchmarkTable,
    exemptions: &[ConditionExpr],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let amount_idx = numeric_col(table, amount_column)?;
    let region_idx = col(table, region_column)?;
    let year_idx = col(table, year_column)?;

    let mut acc = run_rowwise(table, where_, opts, |row, acc| {
        for exemption in exemptions {
            if eval_condition(exemption, table, row)? {
                acc.exclude("exempted");
                return Ok(());
            }
        }
        let region = match table.cell(row, region_idx) {
            Cell::Null => {
                acc.exclude("no_benchmark");
                return Ok(());
            }
            Cell::Text(s) => s.clone(),
            other => {
                return Err(CheckError::CellType {
                    column: region_column.to_string(),
                    row_id: table.row_id(row),
                    detail: format!("expected text region, found {}", other.kind()),
                })
            }
        };
        let year = match year_of_cell(table.cell(row, year_idx)) {
            Some(y) => y,
            None => {
                acc.exclude("no_benchmark");
                return Ok(());
            }
        };
        let limit = match benchmarks.lookup(&region, year, donor_class) {
            Some(l) => l,
            None => {
                acc.exclude("no_benchmark");
                return Ok(());
            }
        };
        let amount = match number_or_null(table, row, amount_idx, amount_column)? {
            Some(a) => a,
            None => {
                acc.exclude("null_amount");
                return Ok(());
            }
        };
        if amount <= limit {
            acc.pass();
        } else {
            acc.fail(table.row_id(row));
            acc.count_key(&region);
        }
        Ok(())
    })?;
    let by_region = std::mem::take(&mut acc.by_key);
    let mut outcome = acc.into_outcome();
    outcome
        .diagnostics
        .insert("failures_by_region".to_string(), json!(by_region));
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Cross-table aggregates
// ---------------------------------------------------------------------------

fn key_display(key: &[Cell]) -> String {
    key.iter()
        .map(|c| c.render())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Group detail rows, sum the value column (nulls as zero), and require each
/// group sum ≤ the matching total row. The evaluation unit is the group.
/// Groups without a matching total row are excluded with a diagnostic;
/// duplicate total rows for one key are an error.
#[allow(clippy::too_many_arguments)]
pub fn check_cross_aggregate_leq(
    detail_table: &Table,
    value_column: &str,
    group_keys: &[String],
    total_table: &Table,
    total_column: &str,
    total_keys: &[String],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let value_idx = numeric_col(detail_table, value_column)?;
    let group_idxs: Vec<usize> = group_keys
        .iter()
        .map(|c| col(detail_table, c))
        .collect::<Result<_, _>>()?;
    let total_value_idx = numeric_col(total_table, total_column)?;
    let total_key_idxs: Vec<usize> = total_keys
        .iter()
        .map(|c| col(total_table, c))
        .collect::<Result<_, _>>()?;

    // Totals keyed once; a duplicate key is an upstream de-duplication
    // failure, not something to resolve silently.
    let mut totals: HashMap<Vec<Cell>, Option<Decimal>> =
        HashMap::with_capacity(total_table.row_count());
    for row in 0..total_table.row_count() {
        let key: Vec<Cell> = total_key_idxs
            .iter()
            .map(|i| total_table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        let value = number_or_null(total_table, row, total_value_idx, total_column)?;
        if totals.insert(key.clone(), value).is_some() {
            return Err(CheckError::AmbiguousTotal {
                table: total_table.name().to_string(),
                key: key_display(&key),
                count: 2,
            });
        }
    }

    #[derive(Clone)]
    struct Group {
        sum: i128,
        min_row: RowId,
    }

    struct ChunkGroups {
        groups: BTreeMap<Vec<Cell>, Group>,
        null_key_rows: u64,
    }

    let ranges = chunk_ranges(detail_table.row_count(), opts.chunk_rows);
    let chunks: Result<Vec<ChunkGroups>, CheckError> = ranges
        .into_par_iter()
        .map(|range| {
            let mut out = ChunkGroups {
                groups: BTreeMap::new(),
                null_key_rows: 0,
            };
            for row in range {
                if let Some(cond) = where_ {
                    if !eval_condition(cond, detail_table, row)? {
                        continue;
                    }
                }
                let key: Vec<Cell> = group_idxs
                    .iter()
                    .map(|i| detail_table.cell(row, *i).clone())
                    .collect();
                if key.iter().any(|c| c.is_null()) {
                    out.null_key_rows += 1;
                    continue;
                }
                let value = number_or_null(detail_table, row, value_idx, value_column)?
                    .map(|n| n.raw() as i128)
                    .unwrap_or(0);
                let row_id = detail_table.row_id(row);
                out.groups
                    .entry(key)
                    .and_modify(|g| {
                        g.sum += value;
                        g.min_row = g.min_row.min(row_id);
                    })
                    .or_insert(Group {
                        sum: value,
                        min_row: row_id,
                    });
            }
            Ok(out)
        })
        .collect();

    let mut groups: BTreeMap<Vec<Cell>, Group> = BTreeMap::new();
    let mut null_key_rows = 0;
    for chunk in chunks? {
        null_key_rows += chunk.null_key_rows;
        for (key, group) in chunk.groups {
            groups
                .entry(key)
                .and_modify(|g| {
                    g.sum += group.sum;
                    g.min_row = g.min_row.min(group.min_row);
                })
                .or_insert(group);
        }
    }

    let mut outcome = CheckOutcome::default();
    let mut unmatched_groups: u64 = 0;
    let mut null_total_groups: u64 = 0;
    let mut failing_rows: Vec<RowId> = Vec::new();
    for (key, group) in &groups {
        match totals.get(key) {
            None => unmatched_groups += 1,
            Some(None) => null_total_groups += 1,
            Some(Some(total)) => {
                outcome.evaluated += 1;
                if group.sum <= total.raw() as i128 {
                    outcome.passed += 1;
                } else {
                    outcome.failed += 1;
                    failing_rows.push(group.min_row);
                }
            }
        }
    }
    failing_rows.sort_unstable();
    failing_rows.truncate(opts.sample_cap);
    outcome.failing_samples = failing_rows;
    if unmatched_groups > 0 {
        outcome
            .diagnostics
            .insert("unmatched_groups".to_string(), json!(unmatched_groups));
    }
    if null_total_groups > 0 {
        outcome
            .diagnostics
            .insert("null_total_groups".to_string(), json!(null_total_groups));
    }
    if null_key_rows > 0 {
        outcome
            .diagnostics
            .insert("null_key_rows".to_string(), json!(null_key_rows));
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Compensation lower bound
// ---------------------------------------------------------------------------

/// Σ bracket-count × bracket-lower-bound must not exceed the joined total
/// compensation. Null counts contribute zero; a negative count fails the row
/// with a diagnostic. Rows with a null or missing total are excluded.
#[allow(clippy::too_many_arguments)]
pub fn check_compensation_lower_bound(
    comp_table: &Table,
    brackets: &SalaryBracketSchema,
    total_table: &Table,
    total_column: &str,
    join_keys: &[String],
    where_: Option<&ConditionExpr>,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let bracket_idxs: Vec<(usize, Decimal)> = brackets
        .brackets
        .iter()
        .map(|b| numeric_col(comp_table, &b.count_column).map(|idx| (idx, b.lower_bound)))
        .collect::<Result<_, _>>()?;
    let join_idxs: Vec<usize> = join_keys
        .iter()
        .map(|c| col(comp_table, c))
        .collect::<Result<_, _>>()?;
    let total_value_idx = numeric_col(total_table, total_column)?;
    let total_key_idxs: Vec<usize> = join_keys
        .iter()
        .map(|c| col(total_table, c))
        .collect::<Result<_, _>>()?;

    let mut totals: HashMap<Vec<Cell>, Option<Decimal>> =
        HashMap::with_capacity(total_table.row_count());
    for row in 0..total_table.row_count() {
        let key: Vec<Cell> = total_key_idxs
            .iter()
            .map(|i| total_table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        let value = number_or_null(total_table, row, total_value_idx, total_column)?;
        if totals.insert(key.clone(), value).is_some() {
            return Err(CheckError::AmbiguousTotal {
                table: total_table.name().to_string(),
                key: key_display(&key),
                count: 2,
            });
        }
    }

    let acc = run_rowwise(comp_table, where_, opts, |row, acc| {
        let mut bound: i128 = 0;
        let mut negative = false;
        for (idx, lower) in &bracket_idxs {
            let column = &comp_table.columns()[*idx].name;
            if let Some(count) = number_or_null(comp_table, row, *idx, column)? {
                if count.is_negative() {
                    negative = true;
                    break;
                }
                bound += count.mul_raw_wide(*lower);
            }
        }
        if negative {
            acc.exclude("negative_count_rows");
            acc.fail(comp_table.row_id(row));
            return Ok(());
        }
        let mut key = Vec::with_capacity(join_idxs.len());
        for idx in &join_idxs {
            let cell = comp_table.cell(row, *idx);
            if cell.is_null() {
                acc.exclude("null_key_rows");
                return Ok(());
            }
            key.push(cell.clone());
        }
        match totals.get(&key) {
            None => acc.exclude("unmatched_rows"),
            Some(None) => acc.exclude("null_total_rows"),
            Some(Some(total)) => {
                if bound <= total.raw() as i128 {
                    acc.pass();
                } else {
                    acc.fail(comp_table.row_id(row));
                }
            }
        }
        Ok(())
    })?;
    Ok(acc.into_outcome())
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Run one expectation against its table, resolving cross-table references
/// and registries.
pub fn run_expectation(
    exp: &Expectation,
    table: &Table,
    tables: &BTreeMap<String, Table>,
    registries: &Registries,
    opts: &EvalOptions,
) -> Result<CheckOutcome, CheckError> {
    let where_ = exp.where_.as_ref();
    match &exp.kind {
        ExpectationKind::NotNull => check_not_null(table, &exp.columns[0], where_, opts),
        ExpectationKind::AnyNotNull => check_any_not_null(table, &exp.columns, where_, opts),
        ExpectationKind::Pattern { regex, .. } => {
            check_pattern(table, &exp.columns[0], regex, where_, opts)
        }
        ExpectationKind::InSet { allowed } => {
            check_set_membership(table, &exp.columns[0], allowed, where_, opts)
        }
        ExpectationKind::PairSumTolerance { tolerance } => check_pair_sum_tolerance(
            table,
            &exp.columns[0],
            &exp.columns[1..],
            *tolerance,
            where_,
            opts,
        ),
        ExpectationKind::SchemaWindowNullness { year_column } => {
            let windows = registries.windows_for_table(table.name());
            check_schema_window_nullness(table, &windows, year_column, where_, opts)
        }
        ExpectationKind::ForeignKey {
            target_table,
            target_columns,
        } => {
            let target = tables
                .get(target_table)
                .ok_or_else(|| CheckError::MissingTable(target_table.clone()))?;
            check_foreign_key(table, &exp.columns, target, target_columns, where_, opts)
        }
        ExpectationKind::BenchmarkUpperBound {
            amount_column,
            region_column,
            year_column,
            donor_class,
            exemptions,
        } => {
            let benchmarks = registries
                .benchmark
                .as_ref()
                .ok_or(CheckError::MissingBenchmark)?;
            check_benchmark_upper_bound(
                table,
                amount_column,
                region_column,
                year_column,
                donor_class,
                benchmarks,
                exemptions,
                where_,
                opts,
            )
        }
        ExpectationKind::CrossAggregateLeq {
            value_column,
            group_by,
            total_table,
            total_column,
            total_keys,
        } => {
            let total = tables
                .get(total_table)
                .ok_or_else(|| CheckError::MissingTable(total_table.clone()))?;
            check_cross_aggregate_leq(
                table,
                value_column,
                group_by,
                total,
                total_column,
                total_keys,
                where_,
                opts,
            )
        }
        ExpectationKind::CompensationLowerBound {
            era_start,
            era_end,
            total_table,
            total_column,
            join_keys,
        } => {
            let brackets = registries.brackets_for_era(*era_start, *era_end).ok_or(
                CheckError::MissingBrackets {
                    era_start: *era_start,
                    era_end: *era_end,
                },
            )?;
            let total = tables
                .get(total_table)
                .ok_or_else(|| CheckError::MissingTable(total_table.clone()))?;
            check_compensation_lower_bound(
                table,
                brackets,
                total,
                total_column,
                join_keys,
                where_,
                opts,
            )
        }
    }
}
