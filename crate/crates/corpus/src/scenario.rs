//! Scenario configuration and deterministic generation.
//!
//! A scenario names its tables (with per-column value generators), the
//! violations to inject at exact counts, the suites paired with the data,
//! and any registry content (schema windows, benchmark limits, salary
//! brackets). Generation is seeded and single-threaded per scenario: the
//! same config and seed always produce byte-identical CSV files and
//! manifest.
//!
//! Every clean row satisfies every paired expectation by construction;
//! injections then break exactly `count` rows each. Injections claim rows
//! exclusively, so two injections can never touch the same row and the
//! configured counts stay exact.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use veritas_core::cell::Cell;
use veritas_core::condition::{parse_condition, ConditionExpr, ParseError};
use veritas_core::decimal::{Decimal, SCALE};
use veritas_core::model::{compile_suite, BenchmarkTable, Registries, SchemaWindow, SuiteDoc};
use veritas_core::rng::SplitMix64;
use veritas_core::table::{ColumnMeta, DeclaredType, Table, TableError};

use crate::manifest::{ExpectedResult, Manifest, ManifestRegistries, ManifestSuite, ManifestTable};
use crate::reference;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub tables: Vec<TableSpec>,
    #[serde(default)]
    pub injections: Vec<InjectionSpec>,
    pub suites: Vec<SuiteDoc>,
    #[serde(default)]
    pub windows: Vec<SchemaWindow>,
    #[serde(default)]
    pub benchmark: Vec<BenchmarkEntry>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub region: String,
    pub year: i32,
    pub donor_class: String,
    pub limit: Decimal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketEntry {
    pub era_start: i32,
    pub era_end: i32,
    pub count_column: String,
    pub lower_bound: Decimal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableSpec {
    pub name: String,
    pub rows: usize,
    pub columns: Vec<ColumnSpec>,
    #[serde(default)]
    pub post: Vec<PostOp>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub declared_type: DeclaredType,
    pub gen: Gen,
}

/// Literal cell values in configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSpec {
    Null,
    Text(String),
    Number(Decimal),
    Date(String),
}

impl CellSpec {
    pub fn number(n: i64) -> CellSpec {
        CellSpec::Number(Decimal::from_int(n))
    }

    fn to_cell(&self) -> Result<Cell, GenerateError> {
        Ok(match self {
            CellSpec::Null => Cell::Null,
            CellSpec::Text(s) => Cell::Text(s.clone()),
            CellSpec::Number(n) => Cell::Number(*n),
            CellSpec::Date(s) => Cell::Date(
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map_err(|_| GenerateError::BadValue(format!("bad date literal {s:?}")))?,
            ),
        })
    }
}

/// Per-column value generators. Row-dependent generators may read columns
/// listed earlier in the table spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gen {
    Const {
        value: CellSpec,
    },
    /// prefix + 1-based row ordinal, zero-padded: unique keys.
    SeqText {
        prefix: String,
        pad: usize,
    },
    /// prefix + (row % modulo + 1), zero-padded: a repeating key universe.
    CycleText {
        prefix: String,
        modulo: usize,
        pad: usize,
    },
    Choice {
        options: Vec<String>,
    },
    PersonName,
    OrgName,
    DateInYears {
        start_year: i32,
        end_year: i32,
    },
    DateFromYear {
        year_column: String,
        month: u32,
        day: u32,
    },
    YearOfDate {
        date_column: String,
    },
    /// years[(row / stride) % years.len()]
    CycleYears {
        years: Vec<i32>,
        stride: usize,
    },
    CurrencyRange {
        min_cents: i64,
        max_cents: i64,
    },
    NumberRange {
        min: i64,
        max: i64,
    },
    /// Uniform amount in (0, limit] for the row's region under the given
    /// benchmark year and donor class.
    AmountUnderRegionLimit {
        region_column: String,
        year: i32,
        donor_class: String,
    },
    /// 1 when row % modulo == one_when, else 0.
    Alternating {
        modulo: usize,
        one_when: usize,
    },
    /// Currency value inside the window years, null outside; inside the
    /// window, null with the given per-mille probability.
    WindowedCurrency {
        start_year: i32,
        end_year: i32,
        year_column: String,
        null_permille: u32,
        min_cents: i64,
        max_cents: i64,
    },
    /// Small integer count inside the window years, null outside.
    WindowedCount {
        start_year: i32,
        end_year: i32,
        year_column: String,
        max: i64,
        null_permille: u32,
    },
}

/// Row transforms applied after all columns of a table are generated.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostOp {
    /// Where `when` holds, split `total` into two parts that sum back to it
    /// within ±jitter_cents; elsewhere both parts stay null.
    SplitPair {
        total: String,
        part1: String,
        part2: String,
        when: String,
        jitter_cents: i64,
    },
    /// Null the column on every row where `when` does not hold.
    NullUnless { column: String, when: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub label: String,
    pub table: String,
    pub columns: Vec<String>,
    pub count: usize,
    pub kind: InjectKind,
    #[serde(rename = "where", default, skip_serializing_if = "Option::is_none")]
    pub where_: Option<String>,
}

/// Expectation-shaped violations (and a few deliberate non-violations such
/// as boundary rows) written into generated tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectKind {
    /// Null every target column on the chosen rows.
    Null,
    /// Write fixed values, one per target column.
    SetCells { values: Vec<CellSpec> },
    /// Write prefix + ordinal text, distinct per chosen row.
    IndexedText { prefix: String },
    /// For each target column, pick rows whose year lies outside that
    /// column's schema window and write a non-null value. `count` applies
    /// per column.
    OutOfWindowValue {
        year_column: String,
        value: CellSpec,
    },
    /// Pick `count` distinct groups and overwrite the single target column
    /// on one member row of each.
    GroupDistinctValue {
        group_by: Vec<String>,
        value: CellSpec,
    },
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("unknown table {0:?} in scenario")]
    UnknownTable(String),
    #[error("unknown column {column:?} in table {table:?}")]
    UnknownColumn { table: String, column: String },
    #[error("injection {label:?}: needs {requested} rows but only {available} are eligible")]
    OverInjection {
        label: String,
        requested: usize,
        available: usize,
    },
    #[error("injection {label:?}: {message}")]
    Injection { label: String, message: String },
    #[error("{context}: {source}")]
    Condition { context: String, source: ParseError },
    #[error("{context}: {message}")]
    Eval { context: String, message: String },
    #[error("{0}")]
    BadValue(String),
    #[error("no schema window for column {column:?} of table {table:?}")]
    MissingWindow { table: String, column: String },
    #[error("no benchmark entry for ({region}, {year}, {donor_class})")]
    MissingBenchmarkEntry {
        region: String,
        year: i32,
        donor_class: String,
    },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("suite {name:?} does not compile: {message}")]
    Suite { name: String, message: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

const FIRST_NAMES: &[&str] = &[
    "James",
    "Mary",
    "Robert",
    "Patricia",
    "John",
    "Jennifer",
    "Michael",
    "Linda",
    "David",
    "Elizabeth",
    "William",
    "Susan",
    "Richard",
    "Jessica",
    "Joseph",
    "Sarah",
    "Thomas",
    "Karen",
    "Marie",
    "Pierre",
];

const LAST_NAMES: &[&str] = &[
    "Smith", "Johnson", "Williams", "Brown", "Jones", "Miller", "Davis", "Tremblay", "Gagnon",
    "Roy", "Wilson", "Moore", "Taylor", "Anderson", "Côté", "Leblanc", "Martin", "Lee", "Walker",
    "Hall",
];

const ORG_FIRST: &[&str] = &[
    "Northern", "Maple", "Harbour", "Prairie", "Summit", "Lakeside", "Granite", "Pacific",
    "Capital", "Aurora",
];

const ORG_MIDDLE: &[&str] = &[
    "Health",
    "Energy",
    "Housing",
    "Transport",
    "Futures",
    "Relief",
    "Heritage",
    "Research",
    "Trade",
    "Arts",
];

const ORG_LAST: &[&str] = &[
    "Society",
    "Foundation",
    "Council",
    "Alliance",
    "Network",
    "Institute",
    "Coalition",
    "Association",
    "Group",
    "Trust",
];

fn pick<'a>(rng: &mut SplitMix64, options: &[&'a str]) -> &'a str {
    options[rng.bounded(options.len() as u64) as usize]
}

fn pad_number(prefix: &str, n: usize, pad: usize) -> String {
    format!("{prefix}{n:0pad$}")
}

fn parse_where(
    context: &str,
    text: &Option<String>,
) -> Result<Option<ConditionExpr>, GenerateError> {
    match text {
        None => Ok(None),
        Some(t) => parse_condition(t)
            .map(Some)
            .map_err(|source| GenerateError::Condition {
                context: context.to_string(),
                source,
            }),
    }
}

fn eval_where(
    context: &str,
    cond: &ConditionExpr,
    table: &Table,
    row: usize,
) -> Result<bool, GenerateError> {
    veritas_core::condition::eval_condition(cond, table, row).map_err(|e| GenerateError::Eval {
        context: context.to_string(),
        message: e.to_string(),
    })
}

fn benchmark_from_entries(entries: &[BenchmarkEntry]) -> BenchmarkTable {
    let mut b = BenchmarkTable::default();
    for e in entries {
        b.insert(&e.region, e.year, &e.donor_class, e.limit);
    }
    b
}

/// Registries equivalent to what a `validate` run would load from the
/// scenario's registry files.
pub fn registries_from_config(config: &ScenarioConfig) -> Registries {
    let mut brackets: Vec<veritas_core::model::SalaryBracketSchema> = Vec::new();
    for entry in &config.brackets {
        let schema = brackets
            .iter_mut()
            .find(|s| s.era_start == entry.era_start && s.era_end == entry.era_end);
        let bracket = veritas_core::model::SalaryBracket {
            count_column: entry.count_column.clone(),
            lower_bound: entry.lower_bound,
        };
        match schema {
            Some(s) => s.brackets.push(bracket),
            None => brackets.push(veritas_core::model::SalaryBracketSchema {
                era_start: entry.era_start,
                era_end: entry.era_end,
                brackets: vec![bracket],
            }),
        }
    }
    Registries {
        windows: config.windows.clone(),
        benchmark: if config.benchmark.is_empty() {
            None
        } else {
            Some(benchmark_from_entries(&config.benchmark))
        },
        brackets,
    }
}

fn generate_cell(
    gen: &Gen,
    row: usize,
    partial: &[Cell],
    spec: &TableSpec,
    benchmark: &BenchmarkTable,
    declared: DeclaredType,
    rng: &mut SplitMix64,
) -> Result<Cell, GenerateError> {
    let col_by_name = |name: &str| -> Result<usize, GenerateError> {
        spec.columns
            .iter()
            .position(|c| c.name == name)
            .filter(|idx| *idx < partial.len())
            .ok_or_else(|| GenerateError::UnknownColumn {
                table: spec.name.clone(),
                column: name.to_string(),
            })
    };
    let year_from = |name: &str, partial: &[Cell]| -> Result<Option<i32>, GenerateError> {
        use chrono::Datelike;
        let idx = col_by_name(name)?;
        Ok(match &partial[idx] {
            Cell::Number(n) => n.as_int().and_then(|v| i32::try_from(v).ok()),
            Cell::Date(d) => Some(d.year()),
            Cell::Text(s) => NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .ok()
                .map(|d| d.year()),
            Cell::Null => None,
        })
    };
    let date_cell = |year: i32, month: u32, day: u32| -> Result<Cell, GenerateError> {
        let date = NaiveDate::from_ymd_opt(year, month, day)
            .ok_or_else(|| GenerateError::BadValue(format!("bad date {year}-{month}-{day}")))?;
        Ok(match declared {
            DeclaredType::Date => Cell::Date(date),
            _ => Cell::Text(date.format("%Y-%m-%d").to_string()),
        })
    };

    Ok(match gen {
        Gen::Const { value } => value.to_cell()?,
        Gen::SeqText { prefix, pad } => Cell::Text(pad_number(prefix, row + 1, *pad)),
        Gen::CycleText {
            prefix,
            modulo,
            pad,
        } => Cell::Text(pad_number(prefix, row % modulo.max(&1) + 1, *pad)),
        Gen::Choice { options } => {
            Cell::Text(options[rng.bounded(options.len() as u64) as usize].clone())
        }
        Gen::PersonName => Cell::Text(format!(
            "{} {}",
            pick(rng, FIRST_NAMES),
            pick(rng, LAST_NAMES)
        )),
        Gen::OrgName => Cell::Text(format!(
            "{} {} {}",
            pick(rng, ORG_FIRST),
            pick(rng, ORG_MIDDLE),
            pick(rng, ORG_LAST)
        )),
        Gen::DateInYears {
            start_year,
            end_year,
        } => {
            let year = rng.range_i64(*start_year as i64, *end_year as i64) as i32;
            let month = rng.range_i64(1, 12) as u32;
            let day = rng.range_i64(1, 28) as u32;
            date_cell(year, month, day)?
        }
        Gen::DateFromYear {
            year_column,
            month,
            day,
        } => match year_from(year_column, partial)? {
            Some(year) => date_cell(year, *month, *day)?,
            None => Cell::Null,
        },
        Gen::YearOfDate { date_column } => match year_from(date_column, partial)? {
            Some(year) => Cell::number(year as i64),
            None => Cell::Null,
        },
        Gen::CycleYears { years, stride } => {
            let idx = (row / stride.max(&1)) % years.len();
            Cell::number(years[idx] as i64)
        }
        Gen::CurrencyRange {
            min_cents,
            max_cents,
        } => Cell::Number(Decimal::from_cents(rng.range_i64(*min_cents, *max_cents))),
        Gen::NumberRange { min, max } => Cell::number(rng.range_i64(*min, *max)),
        Gen::AmountUnderRegionLimit {
            region_column,
            year,
            donor_class,
        } => {
            let idx = col_by_name(region_column)?;
            let region = match &partial[idx] {
                Cell::Text(s) => s.clone(),
                _ => {
                    return Err(GenerateError::BadValue(format!(
                        "region column {region_column:?} must generate text"
                    )))
                }
            };
            let limit = benchmark
                .lookup(&region, *year, donor_class)
                .ok_or_else(|| GenerateError::MissingBenchmarkEntry {
                    region: region.clone(),
                    year: *year,
                    donor_class: donor_class.clone(),
                })?;
            let limit_cents = limit.raw() / (SCALE / 100);
            Cell::Number(Decimal::from_cents(rng.range_i64(1, limit_cents.max(1))))
        }
        Gen::Alternating { modulo, one_when } => {
            Cell::number(if row % modulo.max(&1) == *one_when {
                1
            } else {
                0
            })
        }
        Gen::WindowedCurrency {
            start_year,
            end_year,
            year_column,
            null_permille,
            min_cents,
            max_cents,
        } => match year_from(year_column, partial)? {
            Some(year) if year >= *start_year && year <= *end_year => {
                if rng.chance_permille(*null_permille) {
                    Cell::Null
                } else {
                    Cell::Number(Decimal::from_cents(rng.range_i64(*min_cents, *max_cents)))
                }
            }
            _ => Cell::Null,
        },
        Gen::WindowedCount {
            start_year,
            end_year,
            year_column,
            max,
            null_permille,
        } => match year_from(year_column, partial)? {
            Some(year) if year >= *start_year && year <= *end_year => {
                if rng.chance_permille(*null_permille) {
                    Cell::Null
                } else {
                    Cell::number(rng.range_i64(0, (*max).max(0)))
                }
            }
            _ => Cell::Null,
        },
    })
}

fn apply_post_ops(spec: &TableSpec, table: &mut Table, seed: u64) -> Result<(), GenerateError> {
    for (pi, post) in spec.post.iter().enumerate() {
        let context = format!("post op {pi} of table {:?}", spec.name);
        let mut rng = SplitMix64::derived(seed, &format!("post:{}:{pi}", spec.name));
        match post {
            PostOp::SplitPair {
                total,
                part1,
                part2,
                when,
                jitter_cents,
            } => {
                let cond = parse_condition(when).map_err(|source| GenerateError::Condition {
                    context: context.clone(),
                    source,
                })?;
                let total_idx =
                    table
                        .column_index(total)
                        .ok_or_else(|| GenerateError::UnknownColumn {
                            table: spec.name.clone(),
                            column: total.clone(),
                        })?;
                let p1_idx =
                    table
                        .column_index(part1)
                        .ok_or_else(|| GenerateError::UnknownColumn {
                            table: spec.name.clone(),
                            column: part1.clone(),
                        })?;
                let p2_idx =
                    table
                        .column_index(part2)
                        .ok_or_else(|| GenerateError::UnknownColumn {
                            table: spec.name.clone(),
                            column: part2.clone(),
                        })?;
                for row in 0..table.row_count() {
                    if !eval_where(&context, &cond, table, row)? {
                        continue;
                    }
                    let total_cents = match table.cell(row, total_idx) {
                        Cell::Number(n) => n.raw() / (SCALE / 100),
                        _ => continue,
                    };
                    // part2 stays comfortably above the jitter so it cannot
                    // go negative.
                    let p1_max = (total_cents - jitter_cents.abs() - 100).max(0);
                    let p1 = if p1_max > 0 {
                        rng.range_i64(0, p1_max)
                    } else {
                        0
                    };
                    let jitter = rng.range_i64(-jitter_cents.abs(), jitter_cents.abs());
                    let p2 = total_cents - p1 + jitter;
                    *table.cell_mut(row, p1_idx) = Cell::Number(Decimal::from_cents(p1));
                    *table.cell_mut(row, p2_idx) = Cell::Number(Decimal::from_cents(p2));
                }
            }
            PostOp::NullUnless { column, when } => {
                let cond = parse_condition(when).map_err(|source| GenerateError::Condition {
                    context: context.clone(),
                    source,
                })?;
                let idx =
                    table
                        .column_index(column)
                        .ok_or_else(|| GenerateError::UnknownColumn {
                            table: spec.name.clone(),
                            column: column.clone(),
                        })?;
                for row in 0..table.row_count() {
                    if !eval_where(&context, &cond, table, row)? {
                        *table.cell_mut(row, idx) = Cell::Null;
                    }
                }
            }
        }
    }
    Ok(())
}

fn apply_injections(
    config: &ScenarioConfig,
    tables: &mut BTreeMap<String, Table>,
) -> Result<(), GenerateError> {
    let mut claimed: BTreeMap<String, HashSet<usize>> = BTreeMap::new();
    for (ii, inj) in config.injections.iter().enumerate() {
        let mut rng = SplitMix64::derived(config.seed, &format!("injection:{ii}:{}", inj.label));
        let table = tables
            .get_mut(&inj.table)
            .ok_or_else(|| GenerateError::UnknownTable(inj.table.clone()))?;
        let claimed_rows = claimed.entry(inj.table.clone()).or_default();
        let where_ = parse_where(&format!("injection {:?}", inj.label), &inj.where_)?;
        let col_idx = |name: &str, table: &Table| -> Result<usize, GenerateError> {
            table
                .column_index(name)
                .ok_or_else(|| GenerateError::UnknownColumn {
                    table: inj.table.clone(),
                    column: name.to_string(),
                })
        };

        let eligible = |table: &Table,
                        claimed_rows: &HashSet<usize>,
                        extra: &dyn Fn(usize) -> bool|
         -> Result<Vec<usize>, GenerateError> {
            let mut out = Vec::new();
            for row in 0..table.row_count() {
                if claimed_rows.contains(&row) {
                    continue;
                }
                if let Some(cond) = &where_ {
                    if !eval_where(&format!("injection {:?}", inj.label), cond, table, row)? {
                        continue;
                    }
                }
                if extra(row) {
                    out.push(row);
                }
            }
            Ok(out)
        };

        let take = |candidates: &mut Vec<usize>,
                    count: usize,
                    rng: &mut SplitMix64|
         -> Result<Vec<usize>, GenerateError> {
            if candidates.len() < count {
                return Err(GenerateError::OverInjection {
                    label: inj.label.clone(),
                    requested: count,
                    available: candidates.len(),
                });
            }
            rng.partial_shuffle(candidates, count);
            let mut rows: Vec<usize> = candidates[..count].to_vec();
            rows.sort_unstable();
            Ok(rows)
        };

        match &inj.kind {
            InjectKind::Null => {
                let idxs: Vec<usize> = inj
                    .columns
                    .iter()
                    .map(|c| col_idx(c, table))
                    .collect::<Result<_, _>>()?;
                let mut candidates = eligible(table, claimed_rows, &|_| true)?;
                for row in take(&mut candidates, inj.count, &mut rng)? {
                    for idx in &idxs {
                        *table.cell_mut(row, *idx) = Cell::Null;
                    }
                    claimed_rows.insert(row);
                }
            }
            InjectKind::SetCells { values } => {
                if values.len() != inj.columns.len() {
                    return Err(GenerateError::Injection {
                        label: inj.label.clone(),
                        message: format!(
                            "{} values for {} columns",
                            values.len(),
                            inj.columns.len()
                        ),
                    });
                }
                let idxs: Vec<usize> = inj
                    .columns
                    .iter()
                    .map(|c| col_idx(c, table))
                    .collect::<Result<_, _>>()?;
                let cells: Vec<Cell> = values
                    .iter()
                    .map(|v| v.to_cell())
                    .collect::<Result<_, _>>()?;
                let mut candidates = eligible(table, claimed_rows, &|_| true)?;
                for row in take(&mut candidates, inj.count, &mut rng)? {
                    for (idx, cell) in idxs.iter().zip(&cells) {
                        *table.cell_mut(row, *idx) = cell.clone();
                    }
                    claimed_rows.insert(row);
                }
            }
            InjectKind::IndexedText { prefix } => {
                if inj.columns.len() != 1 {
                    return Err(GenerateError::Injection {
                        label: inj.label.clone(),
                        message: "indexed_text takes exactly one column".to_string(),
                    });
                }
                let idx = col_idx(&inj.columns[0], table)?;
                let mut candidates = eligible(table, claimed_rows, &|_| true)?;
                for (i, row) in take(&mut candidates, inj.count, &mut rng)?
                    .into_iter()
                    .enumerate()
                {
                    *table.cell_mut(row, idx) = Cell::Text(format!("{prefix}{i:04}"));
                    claimed_rows.insert(row);
                }
            }
            InjectKind::OutOfWindowValue { year_column, value } => {
                let year_idx = col_idx(year_column, table)?;
                let cell = value.to_cell()?;
                for column in &inj.columns {
                    let idx = col_idx(column, table)?;
                    let window = config
                        .windows
                        .iter()
                        .find(|w| w.table == inj.table && w.column == *column)
                        .ok_or_else(|| GenerateError::MissingWindow {
                            table: inj.table.clone(),
                            column: column.clone(),
                        })?;
                    let outside = |row: usize| -> bool {
                        year_of(table.cell(row, year_idx))
                            .map(|y| y < window.start_year || y > window.end_year)
                            .unwrap_or(false)
                    };
                    let mut candidates = eligible(table, claimed_rows, &outside)?;
                    for row in take(&mut candidates, inj.count, &mut rng)? {
                        *table.cell_mut(row, idx) = cell.clone();
                        claimed_rows.insert(row);
                    }
                }
            }
            InjectKind::GroupDistinctValue { group_by, value } => {
                if inj.columns.len() != 1 {
                    return Err(GenerateError::Injection {
                        label: inj.label.clone(),
                        message: "group_distinct_value takes exactly one column".to_string(),
                    });
                }
                let idx = col_idx(&inj.columns[0], table)?;
                let group_idxs: Vec<usize> = group_by
                    .iter()
                    .map(|c| col_idx(c, table))
                    .collect::<Result<_, _>>()?;
                let cell = value.to_cell()?;
                let rows = eligible(table, claimed_rows, &|_| true)?;
                let mut groups: BTreeMap<Vec<Cell>, usize> = BTreeMap::new();
                for row in rows {
                    let key: Vec<Cell> = group_idxs
                        .iter()
                        .map(|i| table.cell(row, *i).clone())
                        .collect();
                    if key.iter().any(|c| c.is_null()) {
                        continue;
                    }
                    groups.entry(key).or_insert(row);
                }
                let mut group_rows: Vec<usize> = groups.into_values().collect();
                group_rows.sort_unstable();
                for row in take(&mut group_rows, inj.count, &mut rng)? {
                    *table.cell_mut(row, idx) = cell.clone();
                    claimed_rows.insert(row);
                }
            }
        }
    }
    Ok(())
}

fn year_of(cell: &Cell) -> Option<i32> {
    use chrono::Datelike;
    match cell {
        Cell::Date(d) => Some(d.year()),
        Cell::Number(n) => n.as_int().and_then(|v| i32::try_from(v).ok()),
        _ => None,
    }
}

/// Build every table of the scenario in memory: clean rows, post ops, then
/// injections.
pub fn build_tables(config: &ScenarioConfig) -> Result<BTreeMap<String, Table>, GenerateError> {
    let benchmark = benchmark_from_entries(&config.benchmark);
    let mut tables = BTreeMap::new();
    for spec in &config.tables {
        let metas: Vec<ColumnMeta> = spec
            .columns
            .iter()
            .map(|c| ColumnMeta::new(&c.name, c.declared_type))
            .collect();
        let mut table = Table::new(&spec.name, metas)?;
        let mut rng = SplitMix64::derived(config.seed, &format!("table:{}", spec.name));
        for row in 0..spec.rows {
            let mut cells: Vec<Cell> = Vec::with_capacity(spec.columns.len());
            for column in &spec.columns {
                let cell = generate_cell(
                    &column.gen,
                    row,
                    &cells,
                    spec,
                    &benchmark,
                    column.declared_type,
                    &mut rng,
                )?;
                cells.push(cell);
            }
            table.push_row(cells)?;
        }
        apply_post_ops(spec, &mut table, config.seed)?;
        tables.insert(spec.name.clone(), table);
    }
    apply_injections(config, &mut tables)?;
    Ok(tables)
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

fn group_thousands(digits: &str) -> String {
    let bytes = digits.as_bytes();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, b) in bytes.iter().enumerate() {
        if i > 0 && (bytes.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(*b as char);
    }
    out
}

/// Currency fields carry dollar signs and thousands separators in the CSV
/// so loading exercises the coercion path.
fn render_field(cell: &Cell, declared: DeclaredType) -> String {
    match (declared, cell) {
        (DeclaredType::Currency, Cell::Number(n)) => {
            let raw = n.raw();
            let sign = if raw < 0 { "-" } else { "" };
            let abs = raw.unsigned_abs();
            let int = abs / SCALE as u64;
            let frac = abs % SCALE as u64;
            let grouped = group_thousands(&int.to_string());
            if frac == 0 {
                format!("{sign}${grouped}")
            } else if frac.is_multiple_of(SCALE as u64 / 100) {
                format!("{sign}${grouped}.{:02}", frac / (SCALE as u64 / 100))
            } else {
                format!("{sign}${}", n.abs())
            }
        }
        (_, cell) => cell.render(),
    }
}

fn table_to_csv(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(table.columns().iter().map(|c| c.name.as_str()))
        .expect("header writes");
    for row in 0..table.row_count() {
        let fields: Vec<String> = table
            .columns()
            .iter()
            .enumerate()
            .map(|(i, meta)| render_field(table.cell(row, i), meta.declared_type))
            .collect();
        w.write_record(&fields).expect("row writes");
    }
    String::from_utf8(w.into_inner().expect("csv flushes")).expect("csv is utf-8")
}

// ---------------------------------------------------------------------------
// Full generation to disk
// ---------------------------------------------------------------------------

fn write_file(path: &Path, content: &str) -> Result<(), GenerateError> {
    std::fs::write(path, content).map_err(|source| GenerateError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn windows_csv(windows: &[SchemaWindow]) -> String {
    let mut out = String::from("start_year,end_year,table,column,label\n");
    for w in windows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            w.start_year, w.end_year, w.table, w.column, w.label
        ));
    }
    out
}

fn benchmark_csv(entries: &[BenchmarkEntry]) -> String {
    let mut out = String::from("region,year,donor_class,limit\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.region, e.year, e.donor_class, e.limit
        ));
    }
    out
}

fn brackets_csv(entries: &[BracketEntry]) -> String {
    let mut out = String::from("era_start,era_end,count_column,lower_bound\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.era_start, e.era_end, e.count_column, e.lower_bound
        ));
    }
    out
}

/// Generate the scenario: CSV per table, one suite file per paired suite,
/// registry CSVs, and a manifest listing the expected per-expectation
/// counts from the reference interpreter.
pub fn generate_scenario(
    config: &ScenarioConfig,
    out_dir: &Path,
) -> Result<Manifest, GenerateError> {
    std::fs::create_dir_all(out_dir).map_err(|source| GenerateError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let tables = build_tables(config)?;

    for spec in &config.tables {
        let table = &tables[&spec.name];
        write_file(
            &out_dir.join(format!("{}.csv", spec.name)),
            &table_to_csv(table),
        )?;
    }

    let mut registries_entry = ManifestRegistries::default();
    if !config.windows.is_empty() {
        write_file(
            &out_dir.join("schema_windows.csv"),
            &windows_csv(&config.windows),
        )?;
        registries_entry.windows = Some("schema_windows.csv".to_string());
    }
    if !config.benchmark.is_empty() {
        write_file(
            &out_dir.join("benchmarks.csv"),
            &benchmark_csv(&config.benchmark),
        )?;
        registries_entry.benchmarks = Some("benchmarks.csv".to_string());
    }
    if !config.brackets.is_empty() {
        write_file(
            &out_dir.join("salary_brackets.csv"),
            &brackets_csv(&config.brackets),
        )?;
        registries_entry.brackets = Some("salary_brackets.csv".to_string());
    }

    let registries = registries_from_config(config);
    let mut suites = Vec::with_capacity(config.suites.len());
    for doc in &config.suites {
        let suite = compile_suite(doc).map_err(|e| GenerateError::Suite {
            name: doc.name.clone(),
            message: e.to_string(),
        })?;
        let file = format!("{}.suite.json", doc.name);
        let mut text = serde_json::to_string_pretty(doc).expect("suite serializes");
        text.push('\n');
        write_file(&out_dir.join(&file), &text)?;
        let expected: Vec<ExpectedResult> =
            reference::evaluate_suite_reference(&suite, &tables, &registries);
        suites.push(ManifestSuite {
            name: doc.name.clone(),
            file,
            table: doc.table.clone(),
            expected,
        });
    }

    let manifest = Manifest {
        scenario: config.name.clone(),
        seed: config.seed,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        tables: config
            .tables
            .iter()
            .map(|spec| ManifestTable {
                name: spec.name.clone(),
                file: format!("{}.csv", spec.name),
                rows: spec.rows as u64,
                columns: tables[&spec.name].columns().to_vec(),
                derived: Vec::new(),
            })
            .collect(),
        registries: registries_entry,
        suites,
    };
    write_file(&out_dir.join("manifest.json"), &manifest.to_json_string())?;
    Ok(manifest)
}
