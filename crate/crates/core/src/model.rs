//! Expectation suites, schema windows, benchmark tables, and salary
//! brackets, with load-time validation.
//!
//! Suites travel as JSON documents ([`SuiteDoc`]) and are compiled into
//! typed [`ExpectationSuite`] values up front: conditions parsed, patterns
//! compiled, kind-specific parameters checked. A suite that compiles never
//! produces a missing-parameter error at evaluation time.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::condition::{parse_condition, ConditionExpr, ParseError};
use crate::decimal::Decimal;

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

/// Suite document as it appears on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteDoc {
    pub name: String,
    pub table: String,
    pub expectations: Vec<ExpectationDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectationDoc {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub columns: Vec<String>,
    #[serde(rename = "where", default, skip_serializing_if = "Option::is_none")]
    pub where_: Option<String>,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
}

impl ExpectationDoc {
    pub fn new(id: &str, kind: &str) -> ExpectationDoc {
        ExpectationDoc {
            id: id.to_string(),
            kind: kind.to_string(),
            columns: Vec::new(),
            where_: None,
            params: serde_json::Map::new(),
        }
    }

    pub fn columns(mut self, columns: &[&str]) -> ExpectationDoc {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn where_clause(mut self, cond: &str) -> ExpectationDoc {
        self.where_ = Some(cond.to_string());
        self
    }

    pub fn param(mut self, key: &str, value: Value) -> ExpectationDoc {
        self.params.insert(key.to_string(), value);
        self
    }
}

// ---------------------------------------------------------------------------
// Compiled model
// ---------------------------------------------------------------------------

/// One validation rule, compiled and ready to evaluate.
#[derive(Clone, Debug)]
pub struct Expectation {
    pub id: String,
    pub columns: Vec<String>,
    pub where_: Option<ConditionExpr>,
    pub kind: ExpectationKind,
}

#[derive(Clone, Debug)]
pub enum ExpectationKind {
    /// Every in-scope cell of `columns[0]` must be non-null.
    NotNull,
    /// At least one of the listed cells must be non-null per row.
    AnyNotNull,
    /// Non-null text in `columns[0]` must fully match the pattern.
    Pattern { pattern: String, regex: Regex },
    /// Non-null text in `columns[0]` must be one of the allowed values,
    /// case-sensitively.
    InSet { allowed: Vec<String> },
    /// |columns[0] − Σ columns[1..]| ≤ tolerance, nulls summing as zero.
    PairSumTolerance { tolerance: Decimal },
    /// Line-item cells must be null outside their collection window.
    SchemaWindowNullness { year_column: String },
    /// The composite key must exist in the target table.
    ForeignKey {
        target_table: String,
        target_columns: Vec<String>,
    },
    /// Amounts must not exceed the benchmark limit for (region, year,
    /// donor class); exemption-matched rows are excluded.
    BenchmarkUpperBound {
        amount_column: String,
        region_column: String,
        year_column: String,
        donor_class: String,
        exemptions: Vec<ConditionExpr>,
    },
    /// Per-group sums in this table must not exceed the matching total row.
    CrossAggregateLeq {
        value_column: String,
        group_by: Vec<String>,
        total_table: String,
        total_column: String,
        total_keys: Vec<String>,
    },
    /// Σ bracket-count × bracket-lower-bound must not exceed the joined
    /// total-compensation amount.
    CompensationLowerBound {
        era_start: i32,
        era_end: i32,
        total_table: String,
        total_column: String,
        join_keys: Vec<String>,
    },
}

impl ExpectationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExpectationKind::NotNull => "not_null",
            ExpectationKind::AnyNotNull => "any_not_null",
            ExpectationKind::Pattern { .. } => "pattern",
            ExpectationKind::InSet { .. } => "in_set",
            ExpectationKind::PairSumTolerance { .. } => "pair_sum_tolerance",
            ExpectationKind::SchemaWindowNullness { .. } => "schema_window_nullness",
            ExpectationKind::ForeignKey { .. } => "foreign_key",
            ExpectationKind::BenchmarkUpperBound { .. } => "benchmark_upper_bound",
            ExpectationKind::CrossAggregateLeq { .. } => "cross_aggregate_leq",
            ExpectationKind::CompensationLowerBound { .. } => "compensation_lower_bound",
        }
    }
}

/// An ordered list of expectations against one table. Report order equals
/// suite order.
#[derive(Clone, Debug)]
pub struct ExpectationSuite {
    pub name: String,
    pub table: String,
    pub expectations: Vec<Expectation>,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("duplicate expectation id {id:?}")]
    DuplicateId { id: String },
    #[error("expectation {id:?}: unknown kind {kind:?}")]
    UnknownKind { id: String, kind: String },
    #[error("expectation {id:?}: bad condition: {source}")]
    Condition { id: String, source: ParseError },
    #[error("expectation {id:?}: {message}")]
    Param { id: String, message: String },
}

fn param_err(id: &str, message: impl Into<String>) -> SuiteError {
    SuiteError::Param {
        id: id.to_string(),
        message: message.into(),
    }
}

fn req_str(
    id: &str,
    params: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<String, SuiteError> {
    match params.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(param_err(id, format!("param {key:?} must be a string"))),
        None => Err(param_err(id, format!("missing required param {key:?}"))),
    }
}

fn opt_str(
    id: &str,
    params: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Option<String>, SuiteError> {
    match params.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(param_err(id, format!("param {key:?} must be a string"))),
    }
}

fn req_decimal(
    id: &str,
    params: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Decimal, SuiteError> {
    let text = match params.get(key) {
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(param_err(id, format!("param {key:?} must be a number"))),
        None => return Err(param_err(id, format!("missing required param {key:?}"))),
    };
    text.parse()
        .map_err(|e: crate::decimal::ParseDecimalError| {
            param_err(id, format!("param {key:?}: {}", e.reason))
        })
}

fn req_i32(
    id: &str,
    params: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<i32, SuiteError> {
    match params.get(key) {
        Some(Value::Number(n)) => n
            .as_i64()
            .and_then(|v| i32::try_from(v).ok())
            .ok_or_else(|| param_err(id, format!("param {key:?} must be an integer"))),
        Some(_) => Err(param_err(id, format!("param {key:?} must be an integer"))),
        None => Err(param_err(id, format!("missing required param {key:?}"))),
    }
}

fn req_str_list(
    id: &str,
    params: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Vec<String>, SuiteError> {
    match params.get(key) {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                _ => Err(param_err(id, format!("param {key:?} must hold strings"))),
            })
            .collect(),
        Some(_) => Err(param_err(id, format!("param {key:?} must be a list"))),
        None => Err(param_err(id, format!("missing required param {key:?}"))),
    }
}

fn columns_exactly(id: &str, columns: &[String], n: usize) -> Result<(), SuiteError> {
    if columns.len() != n {
        return Err(param_err(
            id,
            format!(
                "expected exactly {n} target column(s), found {}",
                columns.len()
            ),
        ));
    }
    Ok(())
}

fn compile_expectation(doc: &ExpectationDoc) -> Result<Expectation, SuiteError> {
    let id = &doc.id;
    let where_ = match &doc.where_ {
        Some(text) => Some(
            parse_condition(text).map_err(|source| SuiteError::Condition {
                id: id.clone(),
                source,
            })?,
        ),
        None => None,
    };
    let kind = match doc.kind.as_str() {
        "not_null" => {
            columns_exactly(id, &doc.columns, 1)?;
            ExpectationKind::NotNull
        }
        "any_not_null" => {
            if doc.columns.len() < 2 {
                return Err(param_err(id, "any_not_null needs at least two columns"));
            }
            ExpectationKind::AnyNotNull
        }
        "pattern" => {
            columns_exactly(id, &doc.columns, 1)?;
            let pattern = req_str(id, &doc.params, "pattern")?;
            let regex = Regex::new(&format!("^(?:{pattern})$"))
                .map_err(|e| param_err(id, format!("invalid pattern: {e}")))?;
            ExpectationKind::Pattern { pattern, regex }
        }
        "in_set" => {
            columns_exactly(id, &doc.columns, 1)?;
            let allowed = req_str_list(id, &doc.params, "allowed")?;
            if allowed.is_empty() {
                return Err(param_err(id, "allowed set must not be empty"));
            }
            ExpectationKind::InSet { allowed }
        }
        "pair_sum_tolerance" => {
            if doc.columns.len() < 2 {
                return Err(param_err(
                    id,
                    "pair_sum_tolerance needs a total column and at least one part column",
                ));
            }
            let tolerance = req_decimal(id, &doc.params, "tolerance")?;
            if tolerance.is_negative() {
                return Err(param_err(id, "tolerance must be non-negative"));
            }
            ExpectationKind::PairSumTolerance { tolerance }
        }
        "schema_window_nullness" => {
            if !doc.columns.is_empty() {
                return Err(param_err(
                    id,
                    "schema_window_nullness takes its columns from the schema windows",
                ));
            }
            let year_column = req_str(id, &doc.params, "year_column")?;
            ExpectationKind::SchemaWindowNullness { year_column }
        }
        "foreign_key" => {
            if doc.columns.is_empty() {
                return Err(param_err(id, "foreign_key needs at least one key column"));
            }
            let target_table = req_str(id, &doc.params, "target_table")?;
            let target_columns = req_str_list(id, &doc.params, "target_columns")?;
            if target_columns.len() != doc.columns.len() {
                return Err(param_err(
                    id,
                    format!(
                        "key arity mismatch: {} source column(s) vs {} target column(s)",
                        doc.columns.len(),
                        target_columns.len()
                    ),
                ));
            }
            ExpectationKind::ForeignKey {
                target_table,
                target_columns,
            }
        }
        "benchmark_upper_bound" => {
            if !doc.columns.is_empty() {
                return Err(param_err(
                    id,
                    "benchmark_upper_bound names its columns in params",
                ));
            }
            let exemptions = match doc.params.get("exemptions") {
                None => Vec::new(),
                Some(Value::Array(items)) => {
                    let mut parsed = Vec::with_capacity(items.len());
                    for item in items {
                        let text = item.as_str().ok_or_else(|| {
                            param_err(id, "param \"exemptions\" must hold condition strings")
                        })?;
                        parsed.push(parse_condition(text).map_err(|source| {
                            SuiteError::Condition {
                                id: id.clone(),
                                source,
                            }
                        })?);
                    }
                    parsed
                }
                Some(_) => {
                    return Err(param_err(id, "param \"exemptions\" must be a list"));
                }
            };
            ExpectationKind::BenchmarkUpperBound {
                amount_column: req_str(id, &doc.params, "amount_column")?,
                region_column: req_str(id, &doc.params, "region_column")?,
                year_column: req_str(id, &doc.params, "year_column")?,
                donor_class: opt_str(id, &doc.params, "donor_class")?
                    .unwrap_or_else(|| "individual".to_string()),
                exemptions,
            }
        }
        "cross_aggregate_leq" => {
            if !doc.columns.is_empty() {
                return Err(param_err(
                    id,
                    "cross_aggregate_leq names its columns in params",
                ));
            }
            let group_by = req_str_list(id, &doc.params, "group_by")?;
            let total_keys = req_str_list(id, &doc.params, "total_keys")?;
            if group_by.is_empty() {
                return Err(param_err(id, "group_by must not be empty"));
            }
            if group_by.len() != total_keys.len() {
                return Err(param_err(
                    id,
                    format!(
                        "key arity mismatch: {} group key(s) vs {} total key(s)",
                        group_by.len(),
                        total_keys.len()
                    ),
                ));
            }
            ExpectationKind::CrossAggregateLeq {
                value_column: req_str(id, &doc.params, "value_column")?,
                group_by,
                total_table: req_str(id, &doc.params, "total_table")?,
                total_column: req_str(id, &doc.params, "total_column")?,
                total_keys,
            }
        }
        "compensation_lower_bound" => {
            if !doc.columns.is_empty() {
                return Err(param_err(
                    id,
                    "compensation_lower_bound takes its columns from the bracket schema",
                ));
            }
            let join_keys = req_str_list(id, &doc.params, "join_keys")?;
            if join_keys.is_empty() {
                return Err(param_err(id, "join_keys must not be empty"));
            }
            ExpectationKind::CompensationLowerBound {
                era_start: req_i32(id, &doc.params, "era_start")?,
                era_end: req_i32(id, &doc.params, "era_end")?,
                total_table: req_str(id, &doc.params, "total_table")?,
                total_column: req_str(id, &doc.params, "total_column")?,
                join_keys,
            }
        }
        other => {
            return Err(SuiteError::UnknownKind {
                id: id.clone(),
                kind: other.to_string(),
            })
        }
    };
    Ok(Expectation {
        id: id.clone(),
        columns: doc.columns.clone(),
        where_,
        kind,
    })
}

/// Compile a suite document, validating ids, kinds, conditions, and params.
pub fn compile_suite(doc: &SuiteDoc) -> Result<ExpectationSuite, SuiteError> {
    let mut seen = BTreeSet::new();
    let mut expectations = Vec::with_capacity(doc.expectations.len());
    for exp in &doc.expectations {
        if !seen.insert(exp.id.clone()) {
            return Err(SuiteError::DuplicateId { id: exp.id.clone() });
        }
        expectations.push(compile_expectation(exp)?);
    }
    Ok(ExpectationSuite {
        name: doc.name.clone(),
        table: doc.table.clone(),
        expectations,
    })
}

/// Load and compile a suite from a JSON file.
pub fn load_suite(path: &Path) -> Result<ExpectationSuite, SuiteError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: display.clone(),
        source,
    })?;
    let doc: SuiteDoc = serde_json::from_str(&text).map_err(|source| SuiteError::Json {
        path: display,
        source,
    })?;
    compile_suite(&doc)
}

// ---------------------------------------------------------------------------
// Schema windows
// ---------------------------------------------------------------------------

/// The year range during which one line-item column was collected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaWindow {
    pub column: String,
    pub start_year: i32,
    pub end_year: i32,
    pub table: String,
    pub label: String,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path} line {line}: inverted window ({start_year} > {end_year}) for column {column}")]
    InvertedWindow {
        path: String,
        line: u64,
        column: String,
        start_year: i32,
        end_year: i32,
    },
    #[error("{path} line {line}: duplicate benchmark key ({region}, {year}, {donor_class})")]
    DuplicateBenchmark {
        path: String,
        line: u64,
        region: String,
        year: i32,
        donor_class: String,
    },
    #[error("{path} line {line}: benchmark limit must be positive, found {limit}")]
    NonPositiveLimit {
        path: String,
        line: u64,
        limit: Decimal,
    },
    #[error("{path} line {line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },
}

struct CsvRows {
    path: String,
    reader: csv::Reader<std::fs::File>,
    positions: Vec<usize>,
}

fn open_csv(path: &Path, required: &[&str]) -> Result<CsvRows, RegistryError> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| {
            let message = e.to_string();
            match e.into_kind() {
                csv::ErrorKind::Io(source) => RegistryError::Io {
                    path: display.clone(),
                    source,
                },
                _ => RegistryError::Format {
                    path: display.clone(),
                    message,
                },
            }
        })?;
    let headers = reader
        .headers()
        .map_err(|e| RegistryError::Format {
            path: display.clone(),
            message: e.to_string(),
        })?
        .clone();
    let mut positions = Vec::with_capacity(required.len());
    for name in required {
        match headers.iter().position(|h| h == *name) {
            Some(p) => positions.push(p),
            None => {
                return Err(RegistryError::Format {
                    path: display,
                    message: format!("missing required column {name:?}"),
                })
            }
        }
    }
    Ok(CsvRows {
        path: display,
        reader,
        positions,
    })
}

fn parse_year(path: &str, line: u64, what: &str, raw: &str) -> Result<i32, RegistryError> {
    raw.trim().parse().map_err(|_| RegistryError::Row {
        path: path.to_string(),
        line,
        message: format!("{what} is not an integer year: {raw:?}"),
    })
}

/// Load schema windows from CSV with columns
/// `start_year,end_year,table,column,label`. Inverted windows are rejected.
pub fn load_schema_windows(path: &Path) -> Result<Vec<SchemaWindow>, RegistryError> {
    let CsvRows {
        path,
        mut reader,
        positions,
    } = open_csv(
        path,
        &["start_year", "end_year", "table", "column", "label"],
    )?;
    let mut out = Vec::new();
    let mut line: u64 = 1;
    for record in reader.records() {
        line += 1;
        let record = record.map_err(|e| RegistryError::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let get = |i: usize| record[positions[i]].to_string();
        let start_year = parse_year(&path, line, "start_year", &get(0))?;
        let end_year = parse_year(&path, line, "end_year", &get(1))?;
        let column = get(3);
        if start_year > end_year {
            return Err(RegistryError::InvertedWindow {
                path: path.clone(),
                line,
                column,
                start_year,
                end_year,
            });
        }
        out.push(SchemaWindow {
            column,
            start_year,
            end_year,
            table: get(2),
            label: get(4),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Benchmark tables
// ---------------------------------------------------------------------------

/// External benchmark limits keyed by (region, year, donor class).
#[derive(Clone, Debug, Default)]
pub struct BenchmarkTable {
    entries: BTreeMap<(String, i32, String), Decimal>,
}

impl BenchmarkTable {
    pub fn insert(&mut self, region: &str, year: i32, donor_class: &str, limit: Decimal) -> bool {
        self.entries
            .insert((region.to_string(), year, donor_class.to_string()), limit)
            .is_none()
    }

    pub fn lookup(&self, region: &str, year: i32, donor_class: &str) -> Option<Decimal> {
        self.entries
            .get(&(region.to_string(), year, donor_class.to_string()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Load a benchmark table from CSV with columns
/// `region,year,donor_class,limit`. Duplicate keys and non-positive limits
/// are rejected.
pub fn load_benchmark_table(path: &Path) -> Result<BenchmarkTable, RegistryError> {
    let CsvRows {
        path,
        mut reader,
        positions,
    } = open_csv(path, &["region", "year", "donor_class", "limit"])?;
    let mut out = BenchmarkTable::default();
    let mut line: u64 = 1;
    for record in reader.records() {
        line += 1;
        let record = record.map_err(|e| RegistryError::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let get = |i: usize| record[positions[i]].to_string();
        let region = get(0);
        let year = parse_year(&path, line, "year", &get(1))?;
        let donor_class = get(2);
        let limit: Decimal =
            get(3)
                .trim()
                .parse()
                .map_err(|e: crate::decimal::ParseDecimalError| RegistryError::Row {
                    path: path.clone(),
                    line,
                    message: format!("bad limit: {}", e.reason),
                })?;
        if limit <= Decimal::ZERO {
            return Err(RegistryError::NonPositiveLimit {
                path: path.clone(),
                line,
                limit,
            });
        }
        if !out.insert(&region, year, &donor_class, limit) {
            return Err(RegistryError::DuplicateBenchmark {
                path: path.clone(),
                line,
                region,
                year,
                donor_class,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Salary brackets
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalaryBracket {
    pub count_column: String,
    pub lower_bound: Decimal,
}

/// Bracket definitions for one era of the compensation form: each bracket
/// names the staff-count column and the low end of its salary range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalaryBracketSchema {
    pub era_start: i32,
    pub era_end: i32,
    pub brackets: Vec<SalaryBracket>,
}

/// Load salary brackets from CSV with columns
/// `era_start,era_end,count_column,lower_bound`. Rows sharing an era form
/// one schema; lower bounds must be non-negative and strictly increasing in
/// file order within an era.
pub fn load_salary_brackets(path: &Path) -> Result<Vec<SalaryBracketSchema>, RegistryError> {
    let CsvRows {
        path,
        mut reader,
        positions,
    } = open_csv(
        path,
        &["era_start", "era_end", "count_column", "lower_bound"],
    )?;
    let mut eras: BTreeMap<(i32, i32), Vec<(u64, SalaryBracket)>> = BTreeMap::new();
    let mut order: Vec<(i32, i32)> = Vec::new();
    let mut line: u64 = 1;
    for record in reader.records() {
        line += 1;
        let record = record.map_err(|e| RegistryError::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let get = |i: usize| record[positions[i]].to_string();
        let era_start = parse_year(&path, line, "era_start", &get(0))?;
        let era_end = parse_year(&path, line, "era_end", &get(1))?;
        if era_start > era_end {
            return Err(RegistryError::Row {
                path: path.clone(),
                line,
                message: format!("inverted era ({era_start} > {era_end})"),
            });
        }
        let lower_bound: Decimal =
            get(3)
                .trim()
                .parse()
                .map_err(|e: crate::decimal::ParseDecimalError| RegistryError::Row {
                    path: path.clone(),
                    line,
                    message: format!("bad lower_bound: {}", e.reason),
                })?;
        if lower_bound.is_negative() {
            return Err(RegistryError::Row {
                path: path.clone(),
                line,
                message: "lower_bound must be non-negative".to_string(),
            });
        }
        let key = (era_start, era_end);
        if !eras.contains_key(&key) {
            order.push(key);
        }
        let bucket = eras.entry(key).or_default();
        if let Some((_, last)) = bucket.last() {
            if lower_bound <= last.lower_bound {
                return Err(RegistryError::Row {
                    path: path.clone(),
                    line,
                    message: format!(
                        "lower bounds must be strictly increasing within an era ({} after {})",
                        lower_bound, last.lower_bound
                    ),
                });
            }
        }
        bucket.push((
            line,
            SalaryBracket {
                count_column: get(2),
                lower_bound,
            },
        ));
    }
    Ok(order
        .into_iter()
        .map(|(era_start, era_end)| SalaryBracketSchema {
            era_start,
            era_end,
            brackets: eras
                .remove(&(era_start, era_end))
                .unwrap()
                .into_iter()
                .map(|(_, b)| b)
                .collect(),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Registries
// ---------------------------------------------------------------------------

/// Everything an evaluation needs besides the data tables.
#[derive(Clone, Debug, Default)]
pub struct Registries {
    pub windows: Vec<SchemaWindow>,
    pub benchmark: Option<BenchmarkTable>,
    pub brackets: Vec<SalaryBracketSchema>,
}

impl Registries {
    pub fn windows_for_table<'a>(&'a self, table: &str) -> Vec<&'a SchemaWindow> {
        self.windows.iter().filter(|w| w.table == table).collect()
    }

    pub fn brackets_for_era(&self, era_start: i32, era_end: i32) -> Option<&SalaryBracketSchema> {
        self.brackets
            .iter()
            .find(|b| b.era_start == era_start && b.era_end == era_end)
    }
}
