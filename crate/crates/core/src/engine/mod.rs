//! Expectation evaluation and report assembly.
//!
//! Each expectation kind has a dedicated check in [`checks`]; the suite
//! driver dispatches to them in suite order and assembles a
//! [`ValidationReport`]. Rows are partitioned across worker threads in fixed
//! chunks and merged in chunk order, so every count, sample list, and
//! serialized report is byte-identical regardless of worker count.

pub mod checks;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::model::{ExpectationSuite, Registries};
use crate::table::{RowId, Table};

pub use checks::{CheckError, CheckOutcome};

/// Evaluation tuning. `threads == 0` uses the current rayon pool.
#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub threads: usize,
    /// Maximum failing row ids kept per expectation.
    pub sample_cap: usize,
    /// Rows per parallel work unit.
    pub chunk_rows: usize,
    /// Sampling seed recorded in the report, when the caller sampled.
    pub sample_seed: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> EvalOptions {
        EvalOptions {
            threads: 0,
            sample_cap: 25,
            chunk_rows: 32_768,
            sample_seed: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Errored,
    Vacuous,
}

/// Serialize a success rate as a JSON number with exactly six decimal
/// places. Only meaningful with a JSON serializer.
pub fn serialize_rate6<S: Serializer>(rate: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{rate:.6}"))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// Per-expectation evaluation result.
///
/// `evaluated = passed + failed`; rows outside the row condition and rows
/// excluded by kind-specific rules (null cells for pattern/set checks,
/// exemption matches, missing benchmarks) count in neither. A result with
/// `evaluated == 0` reports success 1.0 and the `vacuous` status so silent
/// mis-scoping stays visible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub id: String,
    pub kind: String,
    pub status: Status,
    pub evaluated: u64,
    pub passed: u64,
    pub failed: u64,
    #[serde(serialize_with = "serialize_rate6")]
    pub success_rate: f64,
    pub failing_samples: Vec<RowId>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ExpectationResult {
    pub fn from_outcome(id: &str, kind: &str, outcome: CheckOutcome) -> ExpectationResult {
        let status = if outcome.evaluated == 0 {
            Status::Vacuous
        } else {
            Status::Ok
        };
        let success_rate = if outcome.evaluated > 0 {
            outcome.passed as f64 / outcome.evaluated as f64
        } else {
            1.0
        };
        ExpectationResult {
            id: id.to_string(),
            kind: kind.to_string(),
            status,
            evaluated: outcome.evaluated,
            passed: outcome.passed,
            failed: outcome.failed,
            success_rate,
            failing_samples: outcome.failing_samples,
            diagnostics: outcome.diagnostics,
            error: None,
        }
    }

    pub fn errored(id: &str, kind: &str, message: String) -> ExpectationResult {
        ExpectationResult {
            id: id.to_string(),
            kind: kind.to_string(),
            status: Status::Errored,
            evaluated: 0,
            passed: 0,
            failed: 0,
            success_rate: 0.0,
            failing_samples: Vec::new(),
            diagnostics: BTreeMap::new(),
            error: Some(message),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReportTotals {
    pub expectations: u64,
    pub ok: u64,
    pub errored: u64,
    pub vacuous: u64,
    pub evaluated: u64,
    pub passed: u64,
    pub failed: u64,
}

/// The full outcome of evaluating one suite against one table set.
/// Serialization contains no timestamps; two identical runs produce
/// byte-identical documents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: String,
    pub table: String,
    pub engine_version: String,
    pub sample_seed: Option<u64>,
    pub results: Vec<ExpectationResult>,
    pub totals: ReportTotals,
}

impl ValidationReport {
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("suite targets table {0:?} which is not loaded")]
    MissingPrimaryTable(String),
}

/// Run every expectation of `suite` against the named table set, in suite
/// order. Per-expectation errors become `errored` results; the remaining
/// expectations still run.
pub fn evaluate_suite(
    suite: &ExpectationSuite,
    tables: &BTreeMap<String, Table>,
    registries: &Registries,
    opts: &EvalOptions,
) -> Result<ValidationReport, EngineError> {
    let table = tables
        .get(&suite.table)
        .ok_or_else(|| EngineError::MissingPrimaryTable(suite.table.clone()))?;

    let run = || -> Vec<ExpectationResult> {
        suite
            .expectations
            .iter()
            .map(|exp| {
                let kind = exp.kind.name();
                match checks::run_expectation(exp, table, tables, registries, opts) {
                    Ok(outcome) => ExpectationResult::from_outcome(&exp.id, kind, outcome),
                    Err(e) => ExpectationResult::errored(&exp.id, kind, e.to_string()),
                }
            })
            .collect()
    };

    let results = if opts.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("thread pool builds");
        pool.install(run)
    } else {
        run()
    };

    let mut totals = ReportTotals {
        expectations: results.len() as u64,
        ..ReportTotals::default()
    };
    for r in &results {
        match r.status {
            Status::Ok => totals.ok += 1,
            Status::Errored => totals.errored += 1,
            Status::Vacuous => totals.vacuous += 1,
        }
        totals.evaluated += r.evaluated;
        totals.passed += r.passed;
        totals.failed += r.failed;
    }

    Ok(ValidationReport {
        suite: suite.name.clone(),
        table: suite.table.clone(),
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        sample_seed: opts.sample_seed,
        results,
        totals,
    })
}
