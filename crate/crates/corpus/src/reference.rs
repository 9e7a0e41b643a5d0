//! Naive single-pass reference interpreter.
//!
//! A deliberately plain, per-row re-statement of every expectation kind's
//! semantics, written without any of the evaluation engine's machinery (no
//! chunking, no worker threads, no shared check code). Manifests freeze its
//! output at generation time, and the acceptance suite compares the engine
//! against it across randomized tables; the two implementations must agree
//! on (evaluated, passed, failed) everywhere.

use std::collections::{BTreeMap, HashMap, HashSet};

use veritas_core::cell::Cell;
use veritas_core::condition::{eval_condition, ConditionExpr};
use veritas_core::decimal::Decimal;
use veritas_core::model::{
    Expectation, ExpectationKind, ExpectationSuite, Registries, SalaryBracketSchema, SchemaWindow,
};
use veritas_core::table::Table;

use crate::manifest::ExpectedResult;

/// (evaluated, passed, failed) or an error message.
type Counts = Result<(u64, u64, u64), String>;

fn in_scope(where_: &Option<ConditionExpr>, table: &Table, row: usize) -> Result<bool, String> {
    match where_ {
        Some(cond) => eval_condition(cond, table, row).map_err(|e| e.to_string()),
        None => Ok(true),
    }
}

fn col(table: &Table, name: &str) -> Result<usize, String> {
    table
        .column_index(name)
        .ok_or_else(|| format!("unknown column {name:?} in table {:?}", table.name()))
}

fn number_cell(table: &Table, row: usize, idx: usize) -> Result<Option<Decimal>, String> {
    match table.cell(row, idx) {
        Cell::Null => Ok(None),
        Cell::Number(n) => Ok(Some(*n)),
        other => Err(format!("expected a number, found {}", other.kind())),
    }
}

fn year_cell(cell: &Cell) -> Option<i32> {
    use chrono::Datelike;
    match cell {
        Cell::Date(d) => Some(d.year()),
        Cell::Number(n) => n.as_int().and_then(|v| i32::try_from(v).ok()),
        _ => None,
    }
}

fn not_null(table: &Table, exp: &Expectation) -> Counts {
    let idx = col(table, &exp.columns[0])?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        e += 1;
        if table.cell(row, idx).is_null() {
            f += 1;
        } else {
            p += 1;
        }
    }
    Ok((e, p, f))
}

fn any_not_null(table: &Table, exp: &Expectation) -> Counts {
    let idxs: Vec<usize> = exp
        .columns
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        e += 1;
        if idxs.iter().any(|i| !table.cell(row, *i).is_null()) {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

fn pattern(table: &Table, exp: &Expectation, regex: &regex::Regex) -> Counts {
    let idx = col(table, &exp.columns[0])?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let cell = table.cell(row, idx);
        if cell.is_null() {
            continue;
        }
        e += 1;
        if regex.is_match(&cell.render()) {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

fn in_set(table: &Table, exp: &Expectation, allowed: &[String]) -> Counts {
    let idx = col(table, &exp.columns[0])?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let cell = table.cell(row, idx);
        if cell.is_null() {
            continue;
        }
        e += 1;
        if allowed.iter().any(|a| *a == cell.render()) {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

fn pair_sum(table: &Table, exp: &Expectation, tolerance: Decimal) -> Counts {
    let total_idx = col(table, &exp.columns[0])?;
    let part_idxs: Vec<usize> = exp.columns[1..]
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let mut any = false;
        let mut sum: i128 = 0;
        for idx in &part_idxs {
            if let Some(n) = number_cell(table, row, *idx)? {
                any = true;
                sum += n.raw() as i128;
            }
        }
        if !any {
            continue;
        }
        let total = match number_cell(table, row, total_idx)? {
            Some(n) => n.raw() as i128,
            None => continue,
        };
        e += 1;
        if (total - sum).abs() <= tolerance.raw() as i128 {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

fn schema_windows(
    table: &Table,
    exp: &Expectation,
    windows: &[&SchemaWindow],
    year_column: &str,
) -> Counts {
    let year_idx = col(table, year_column)?;
    let window_idxs: Vec<(usize, &SchemaWindow)> = windows
        .iter()
        .map(|w| col(table, &w.column).map(|i| (i, *w)))
        .collect::<Result<_, _>>()?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let year = match year_cell(table.cell(row, year_idx)) {
            Some(y) => y,
            None => continue,
        };
        for (idx, w) in &window_idxs {
            e += 1;
            let outside = year < w.start_year || year > w.end_year;
            if outside && !table.cell(row, *idx).is_null() {
                f += 1;
            } else {
                p += 1;
            }
        }
    }
    Ok((e, p, f))
}

fn foreign_key(
    table: &Table,
    exp: &Expectation,
    target: &Table,
    target_columns: &[String],
) -> Counts {
    let src: Vec<usize> = exp
        .columns
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let dst: Vec<usize> = target_columns
        .iter()
        .map(|c| col(target, c))
        .collect::<Result<_, _>>()?;
    let mut keys: HashSet<Vec<Cell>> = HashSet::new();
    for row in 0..target.row_count() {
        keys.insert(dst.iter().map(|i| target.cell(row, *i).clone()).collect());
    }
    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let key: Vec<Cell> = src.iter().map(|i| table.cell(row, *i).clone()).collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        e += 1;
        if keys.contains(&key) {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

#[allow(clippy::too_many_arguments)]
fn benchmark(
    table: &Table,
    exp: &Expectation,
    amount_column: &str,
    region_column: &str,
    year_column: &str,
    donor_class: &str,
    exemptions: &[ConditionExpr],
    registries: &Registries,
) -> Counts {
    let benchmarks = registries
        .benchmark
        .as_ref()
        .ok_or_else(|| "no benchmark table loaded".to_string())?;
    let amount_idx = col(table, amount_column)?;
    let region_idx = col(table, region_column)?;
    let year_idx = col(table, year_column)?;
    let (mut e, mut p, mut f) = (0, 0, 0);
    'rows: for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        for exemption in exemptions {
            if eval_condition(exemption, table, row).map_err(|err| err.to_string())? {
                continue 'rows;
            }
        }
        let region = match table.cell(row, region_idx) {
            Cell::Text(s) => s.clone(),
            Cell::Null => continue,
            other => return Err(format!("expected text region, found {}", other.kind())),
        };
        let year = match year_cell(table.cell(row, year_idx)) {
            Some(y) => y,
            None => continue,
        };
        let limit = match benchmarks.lookup(&region, year, donor_class) {
            Some(l) => l,
            None => continue,
        };
        let amount = match number_cell(table, row, amount_idx)? {
            Some(a) => a,
            None => continue,
        };
        e += 1;
        if amount <= limit {
            p += 1;
        } else {
            f += 1;
        }
    }
    Ok((e, p, f))
}

#[allow(clippy::too_many_arguments)]
fn cross_aggregate(
    table: &Table,
    exp: &Expectation,
    value_column: &str,
    group_by: &[String],
    total_table: &Table,
    total_column: &str,
    total_keys: &[String],
) -> Counts {
    let value_idx = col(table, value_column)?;
    let group_idxs: Vec<usize> = group_by
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let total_idx = col(total_table, total_column)?;
    let total_key_idxs: Vec<usize> = total_keys
        .iter()
        .map(|c| col(total_table, c))
        .collect::<Result<_, _>>()?;

    let mut totals: HashMap<Vec<Cell>, Option<Decimal>> = HashMap::new();
    for row in 0..total_table.row_count() {
        let key: Vec<Cell> = total_key_idxs
            .iter()
            .map(|i| total_table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        let value = number_cell(total_table, row, total_idx)?;
        if totals.insert(key, value).is_some() {
            return Err("ambiguous total: duplicate key".to_string());
        }
    }

    let mut sums: BTreeMap<Vec<Cell>, i128> = BTreeMap::new();
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let key: Vec<Cell> = group_idxs
            .iter()
            .map(|i| table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        let value = number_cell(table, row, value_idx)?
            .map(|n| n.raw() as i128)
            .unwrap_or(0);
        *sums.entry(key).or_insert(0) += value;
    }

    let (mut e, mut p, mut f) = (0, 0, 0);
    for (key, sum) in &sums {
        match totals.get(key) {
            None | Some(None) => continue,
            Some(Some(total)) => {
                e += 1;
                if *sum <= total.raw() as i128 {
                    p += 1;
                } else {
                    f += 1;
                }
            }
        }
    }
    Ok((e, p, f))
}

fn compensation(
    table: &Table,
    exp: &Expectation,
    brackets: &SalaryBracketSchema,
    total_table: &Table,
    total_column: &str,
    join_keys: &[String],
) -> Counts {
    let bracket_idxs: Vec<(usize, Decimal)> = brackets
        .brackets
        .iter()
        .map(|b| col(table, &b.count_column).map(|i| (i, b.lower_bound)))
        .collect::<Result<_, _>>()?;
    let join_idxs: Vec<usize> = join_keys
        .iter()
        .map(|c| col(table, c))
        .collect::<Result<_, _>>()?;
    let total_idx = col(total_table, total_column)?;
    let total_key_idxs: Vec<usize> = join_keys
        .iter()
        .map(|c| col(total_table, c))
        .collect::<Result<_, _>>()?;

    let mut totals: HashMap<Vec<Cell>, Option<Decimal>> = HashMap::new();
    for row in 0..total_table.row_count() {
        let key: Vec<Cell> = total_key_idxs
            .iter()
            .map(|i| total_table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        let value = number_cell(total_table, row, total_idx)?;
        if totals.insert(key, value).is_some() {
            return Err("ambiguous total: duplicate key".to_string());
        }
    }

    let (mut e, mut p, mut f) = (0, 0, 0);
    for row in 0..table.row_count() {
        if !in_scope(&exp.where_, table, row)? {
            continue;
        }
        let mut bound: i128 = 0;
        let mut negative = false;
        for (idx, lower) in &bracket_idxs {
            if let Some(count) = number_cell(table, row, *idx)? {
                if count.is_negative() {
                    negative = true;
                    break;
                }
                bound += count.mul_raw_wide(*lower);
            }
        }
        if negative {
            e += 1;
            f += 1;
            continue;
        }
        let key: Vec<Cell> = join_idxs
            .iter()
            .map(|i| table.cell(row, *i).clone())
            .collect();
        if key.iter().any(|c| c.is_null()) {
            continue;
        }
        match totals.get(&key) {
            None | Some(None) => continue,
            Some(Some(total)) => {
                e += 1;
                if bound <= total.raw() as i128 {
                    p += 1;
                } else {
                    f += 1;
                }
            }
        }
    }
    Ok((e, p, f))
}

/// Reference counts for one expectation.
pub fn expectation_counts(
    exp: &Expectation,
    table: &Table,
    tables: &BTreeMap<String, Table>,
    registries: &Registries,
) -> Counts {
    match &exp.kind {
        ExpectationKind::NotNull => not_null(table, exp),
        ExpectationKind::AnyNotNull => any_not_null(table, exp),
        ExpectationKind::Pattern { regex, .. } => pattern(table, exp, regex),
        ExpectationKind::InSet { allowed } => in_set(table, exp, allowed),
        ExpectationKind::PairSumTolerance { tolerance } => pair_sum(table, exp, *tolerance),
        ExpectationKind::SchemaWindowNullness { year_column } => {
            let windows = registries.windows_for_table(table.name());
            schema_windows(table, exp, &windows, year_column)
        }
        ExpectationKind::ForeignKey {
            target_table,
            target_columns,
        } => {
            let target = tables
                .get(target_table)
                .ok_or_else(|| format!("table not loaded: {target_table:?}"))?;
            foreign_key(table, exp, target, target_columns)
        }
        ExpectationKind::BenchmarkUpperBound {
            amount_column,
            region_column,
            year_column,
            donor_class,
            exemptions,
        } => benchmark(
            table,
            exp,
            amount_column,
            region_column,
            year_column,
            donor_class,
            exemptions,
            registries,
        ),
        ExpectationKind::CrossAggregateLeq {
            value_column,
            group_by,
            total_table,
            total_column,
            total_keys,
        } => {
            let total = tables
                .get(total_table)
                .ok_or_else(|| format!("table not loaded: {total_table:?}"))?;
            cross_aggregate(
                table,
                exp,
                value_column,
                group_by,
                total,
                total_column,
                total_keys,
            )
        }
        ExpectationKind::CompensationLowerBound {
            era_start,
            era_end,
            total_table,
            total_column,
            join_keys,
        } => {
            let brackets = registries
                .brackets_for_era(*era_start, *era_end)
                .ok_or_else(|| format!("no bracket schema for era {era_start}-{era_end}"))?;
            let total = tables
                .get(total_table)
                .ok_or_else(|| format!("table not loaded: {total_table:?}"))?;
            compensation(table, exp, brackets, total, total_column, join_keys)
        }
    }
}

/// Evaluate a whole suite with the reference interpreter.
pub fn evaluate_suite_reference(
    suite: &ExpectationSuite,
    tables: &BTreeMap<String, Table>,
    registries: &Registries,
) -> Vec<ExpectedResult> {
    let table = match tables.get(&suite.table) {
        Some(t) => t,
        None => {
            return suite
                .expectations
                .iter()
                .map(|exp| ExpectedResult {
                    id: exp.id.clone(),
                    kind: exp.kind.name().to_string(),
                    status: "errored".to_string(),
                    evaluated: 0,
                    passed: 0,
                    failed: 0,
                    success_rate: 0.0,
                })
                .collect()
        }
    };
    suite
        .expectations
        .iter()
        .map(
            |exp| match expectation_counts(exp, table, tables, registries) {
                Ok((evaluated, passed, failed)) => ExpectedResult {
                    id: exp.id.clone(),
                    kind: exp.kind.name().to_string(),
                    status: if evaluated == 0 {
                        "vacuous".to_string()
                    } else {
                        "ok".to_string()
                    },
                    evaluated,
                    passed,
                    failed,
                    success_rate: if evaluated > 0 {
                        passed as f64 / evaluated as f64
                    } else {
                        1.0
                    },
                },
                Err(_) => ExpectedResult {
                    id: exp.id.clone(),
                    kind: exp.kind.name().to_string(),
                    status: "errored".to_string(),
                    evaluated: 0,
                    passed: 0,
                    failed: 0,
                    success_rate: 0.0,
                },
            },
        )
        .collect()
}
