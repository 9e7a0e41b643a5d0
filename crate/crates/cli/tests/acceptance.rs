//! Acceptance suite.
//!
//! One test per criterion, each printing a PASS line once its assertions
//! hold:
//!
//! 1. Golden findings: every shipped scenario, generated and validated end
//!    to end, reproduces its manifest exactly (counts equal, rates equal at
//!    six decimals) and carries the published figures, in under ten
//!    seconds.
//! 2. Charities scenario: 61 violating line-item columns and the
//!    0.950000 / 0.978000 / 0.985000 / 0.973000 rates, exactly.
//! 3. Boundary fidelity: pair-sum tolerance and benchmark limits are
//!    inclusive at the boundary and fail one cent past it.
//! 4. Oracle equivalence: the engine and the naive reference interpreter
//!    agree on (evaluated, passed, failed) across ≥ 1000 randomized tables
//!    per expectation kind.
//! 5. Scoping law: evaluated counts equal brute-force row-condition counts
//!    after kind-specific exclusions, across ≥ 1000 random cases.
//! 6. Determinism: serialized reports are byte-identical across three runs
//!    and worker counts {1, 2, 8}.
//! 7. Performance: a three-expectation suite over a generated
//!    1,000,000-row donations table finishes single-threaded in < 15 s and
//!    speeds up ≥ 2x with four workers.
//! 8. Coercion: a corpus with injected OCR artifacts loads with exactly
//!    the injected number of diagnostics and no failures.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use veritas_core::cell::Cell;
use veritas_core::decimal::Decimal;
use veritas_core::engine::{checks, evaluate_suite, EvalOptions, Status};
use veritas_core::model::{
    compile_suite, load_benchmark_table, load_salary_brackets, load_schema_windows, load_suite,
    BenchmarkTable, Expectation, ExpectationDoc, ExpectationSuite, Registries, SchemaWindow,
    SuiteDoc,
};
use veritas_core::rng::SplitMix64;
use veritas_core::table::{load_table, ColumnMeta, DeclaredType, Table};
use veritas_corpus::reference;
use veritas_corpus::scenario::{
    CellSpec, ColumnSpec, Gen, InjectKind, InjectionSpec, PostOp, ScenarioConfig, TableSpec,
};
use veritas_corpus::{build_tables, builtin_scenarios, find_scenario, generate_scenario, Manifest};

/// Criteria run one at a time so the timing-sensitive ones measure an idle
/// machine rather than sibling tests.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn rate6(rate: f64) -> String {
    format!("{rate:.6}")
}

fn status_name(status: Status) -> &'static str {
    match status {
        Status::Ok => "ok",
        Status::Errored => "errored",
        Status::Vacuous => "vacuous",
    }
}

/// Load a generated corpus directory the way the CLI does: tables from CSV
/// per the manifest, registries from their CSV files.
fn load_corpus(dir: &Path) -> (Manifest, BTreeMap<String, Table>, Registries) {
    let manifest = Manifest::load(&dir.join("manifest.json")).unwrap();
    let mut tables = BTreeMap::new();
    for entry in &manifest.tables {
        let outcome = load_table(&dir.join(&entry.file), &entry.name, &entry.columns).unwrap();
        assert!(
            outcome.diagnostics.is_empty(),
            "clean corpus {} loads without diagnostics",
            entry.file
        );
        tables.insert(entry.name.clone(), outcome.table);
    }
    let mut registries = Registries::default();
    if let Some(file) = &manifest.registries.windows {
        registries.windows = load_schema_windows(&dir.join(file)).unwrap();
    }
    if let Some(file) = &manifest.registries.benchmarks {
        registries.benchmark = Some(load_benchmark_table(&dir.join(file)).unwrap());
    }
    if let Some(file) = &manifest.registries.brackets {
        registries.brackets = load_salary_brackets(&dir.join(file)).unwrap();
    }
    (manifest, tables, registries)
}

/// Validate one suite of a generated corpus and require exact agreement
/// with the manifest's expected block.
fn validate_against_manifest(
    dir: &Path,
    manifest: &Manifest,
    tables: &BTreeMap<String, Table>,
    registries: &Registries,
) -> BTreeMap<String, veritas_core::engine::ValidationReport> {
    let mut reports = BTreeMap::new();
    for suite_entry in &manifest.suites {
        let suite = load_suite(&dir.join(&suite_entry.file)).unwrap();
        let report = evaluate_suite(&suite, tables, registries, &EvalOptions::default()).unwrap();
        assert_eq!(report.results.len(), suite_entry.expected.len());
        for (result, expected) in report.results.iter().zip(&suite_entry.expected) {
            assert_eq!(result.id, expected.id);
            assert_eq!(result.kind, expected.kind);
            assert_eq!(
                status_name(result.status),
                expected.status,
                "status of {}",
                expected.id
            );
            assert_eq!(
                (result.evaluated, result.passed, result.failed),
                (expected.evaluated, expected.passed, expected.failed),
                "counts of {}",
                expected.id
            );
            assert_eq!(
                rate6(result.success_rate),
                rate6(expected.success_rate),
                "rate of {}",
                expected.id
            );
        }
        reports.insert(suite_entry.name.clone(), report);
    }
    reports
}

fn result_by_id<'a>(
    report: &'a veritas_core::engine::ValidationReport,
    id: &str,
) -> &'a veritas_core::engine::ExpectationResult {
    report
        .results
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("no result {id}"))
}

// ---------------------------------------------------------------------------
// 1. Golden findings
// ---------------------------------------------------------------------------

#[test]
fn acceptance_golden_findings() {
    let _guard = serial();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut reports_by_scenario = BTreeMap::new();
    for config in builtin_scenarios() {
        let out = dir.path().join(&config.name);
        generate_scenario(&config, &out).unwrap();
        let (manifest, tables, registries) = load_corpus(&out);
        let reports = validate_against_manifest(&out, &manifest, &tables, &registries);
        reports_by_scenario.insert(config.name.clone(), reports);
    }
    let elapsed = started.elapsed();

    let donations = &reports_by_scenario["donations-findings"]["donations-findings"];
    let rates: Vec<String> = donations
        .results
        .iter()
        .map(|r| rate6(r.success_rate))
        .collect();
    assert_eq!(rates, ["1.000000", "0.977600", "1.000000", "1.000000"]);

    let registrations = &reports_by_scenario["registrations-findings"]["registrations-findings"];
    assert_eq!(
        rate6(result_by_id(registrations, "registrations_number_not_null").success_rate),
        "0.996600"
    );
    assert_eq!(
        rate6(result_by_id(registrations, "registrations_org_name_not_null").success_rate),
        "0.994400"
    );
    assert_eq!(
        rate6(result_by_id(registrations, "registrations_region_not_null").success_rate),
        "0.994500"
    );

    let funding = &reports_by_scenario["funding-findings"]["funding-findings"];
    assert_eq!(
        rate6(result_by_id(funding, "funding_source_not_null").success_rate),
        "0.989100"
    );

    let communications = &reports_by_scenario["communications-findings"]["communications-findings"];
    assert_eq!(
        result_by_id(communications, "communications_targets_not_null").failed,
        2
    );
    assert_eq!(
        result_by_id(communications, "communications_subject_matters_not_null").failed,
        25
    );
    assert_eq!(
        result_by_id(communications, "communications_region_canonical").failed,
        644
    );

    let revolving = &reports_by_scenario["revolving-door-findings"]["revolving-door-findings"];
    assert_eq!(
        rate6(result_by_id(revolving, "revolving_door_rid_in_registrations").success_rate),
        "0.995800"
    );

    let legal = &reports_by_scenario["legal-limit-findings"]["legal-limit-findings"];
    let limit_result = result_by_id(legal, "donations_2022_within_legal_limit");
    assert_eq!(limit_result.failed, 14);
    let by_region = &limit_result.diagnostics["failures_by_region"];
    assert_eq!(by_region["Federal"], 2);
    assert_eq!(by_region["British Columbia"], 1);
    assert_eq!(by_region["Quebec"], 11);

    assert!(
        elapsed.as_secs_f64() < 10.0,
        "golden scenarios took {elapsed:?}, limit is 10 s"
    );
    println!(
        "ACCEPTANCE golden-findings: PASS (7 scenarios in {:.2} s)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// 2. Charities scenario
// ---------------------------------------------------------------------------

#[test]
fn acceptance_charities_scenario() {
    let _guard = serial();
    let dir = tempfile::tempdir().unwrap();
    let config = find_scenario("charities-findings").unwrap();
    generate_scenario(&config, dir.path()).unwrap();
    let (manifest, tables, registries) = load_corpus(dir.path());
    let reports = validate_against_manifest(dir.path(), &manifest, &tables, &registries);

    let returns = &reports["charities-returns-findings"];
    let windows = result_by_id(returns, "tax_returns_line_item_windows");
    assert_eq!(windows.diagnostics["violating_columns"], 61);
    assert_eq!(windows.failed, 61);
    assert_eq!(
        rate6(result_by_id(returns, "tax_returns_any_total_present").success_rate),
        "0.973000"
    );

    let gifts = &reports["charities-gifts-findings"];
    assert_eq!(
        rate6(result_by_id(gifts, "gifts_sum_within_reported_total").success_rate),
        "0.950000"
    );

    let comp = &reports["charities-compensation-findings"];
    assert_eq!(
        rate6(result_by_id(comp, "compensation_bound_2003_2008").success_rate),
        "0.978000"
    );
    assert_eq!(
        rate6(result_by_id(comp, "compensation_bound_2009_2022").success_rate),
        "0.985000"
    );
    println!("ACCEPTANCE charities-scenario: PASS");
}

// ---------------------------------------------------------------------------
// 3. Boundary fidelity
// ---------------------------------------------------------------------------

#[test]
fn acceptance_boundary_fidelity() {
    let _guard = serial();
    let opts = EvalOptions::default();

    let mut t = Table::new(
        "t",
        vec![
            ColumnMeta::new("total", DeclaredType::Currency),
            ColumnMeta::new("p1", DeclaredType::Currency),
            ColumnMeta::new("p2", DeclaredType::Currency),
        ],
    )
    .unwrap();
    // |100 - 105| = 5 exactly; |100 - 105.01| = 5.01.
    t.push_row(vec![Cell::number(100), Cell::number(60), Cell::number(45)])
        .unwrap();
    t.push_row(vec![
        Cell::number(100),
        Cell::number(60),
        Cell::Number("45.01".parse().unwrap()),
    ])
    .unwrap();
    let parts = vec!["p1".to_string(), "p2".to_string()];
    let out =
        checks::check_pair_sum_tolerance(&t, "total", &parts, Decimal::from_int(5), None, &opts)
            .unwrap();
    assert_eq!((out.evaluated, out.passed, out.failed), (2, 1, 1));
    assert_eq!(out.failing_samples, vec![1]);

    let mut donations = Table::new(
        "d",
        vec![
            ColumnMeta::new("region", DeclaredType::Text),
            ColumnMeta::new("year", DeclaredType::Number),
            ColumnMeta::new("amount", DeclaredType::Currency),
        ],
    )
    .unwrap();
    donations
        .push_row(vec![
            Cell::text("Federal"),
            Cell::number(2022),
            Cell::number(1675),
        ])
        .unwrap();
    donations
        .push_row(vec![
            Cell::text("Federal"),
            Cell::number(2022),
            Cell::Number("1675.01".parse().unwrap()),
        ])
        .unwrap();
    let mut benchmarks = BenchmarkTable::default();
    benchmarks.insert("Federal", 2022, "individual", Decimal::from_int(1675));
    let out = checks::check_benchmark_upper_bound(
        &donations,
        "amount",
        "region",
        "year",
        "individual",
        &benchmarks,
        &[],
        None,
        &opts,
    )
    .unwrap();
    assert_eq!((out.evaluated, out.passed, out.failed), (2, 1, 1));
    assert_eq!(out.failing_samples, vec![1]);
    println!("ACCEPTANCE boundary-fidelity: PASS");
}

// ---------------------------------------------------------------------------
// Random tables for the oracle and scoping properties
// ---------------------------------------------------------------------------

const TEXT_POOL: [&str; 10] = [
    "Federal",
    "Ontario",
    "Quebec",
    "British Columbia",
    "Estate of Ada",
    "x",
    "y z",
    "2014-03-07",
    "",
    "Bc_Reports",
];

fn random_cell(rng: &mut SplitMix64, ty: DeclaredType) -> Cell {
    if rng.chance_permille(200) {
        return Cell::Null;
    }
    match ty {
        DeclaredType::Text => Cell::text(TEXT_POOL[rng.bounded(TEXT_POOL.len() as u64) as usize]),
        DeclaredType::Number | DeclaredType::Currency => {
            Cell::Number(Decimal::from_cents(rng.range_i64(-2_000, 20_000)))
        }
        DeclaredType::Date => {
            let year = rng.range_i64(1995, 2025) as i32;
            let month = rng.range_i64(1, 12) as u32;
            let day = rng.range_i64(1, 28) as u32;
            Cell::Date(chrono_date(year, month, day))
        }
    }
}

fn chrono_date(year: i32, month: u32, day: u32) -> chrono::NaiveDate {
    chrono::NaiveDate::from_ymd_opt(year, month, day).unwrap()
}

/// Eight columns: three text, three numeric, one date, one integer year.
fn random_table(rng: &mut SplitMix64, name: &str, rows: usize) -> Table {
    let metas = vec![
        ColumnMeta::new("t1", DeclaredType::Text),
        ColumnMeta::new("t2", DeclaredType::Text),
        ColumnMeta::new("t3", DeclaredType::Text),
        ColumnMeta::new("n1", DeclaredType::Currency),
        ColumnMeta::new("n2", DeclaredType::Currency),
        ColumnMeta::new("n3", DeclaredType::Currency),
        ColumnMeta::new("d1", DeclaredType::Date),
        ColumnMeta::new("y1", DeclaredType::Number),
    ];
    let mut t = Table::new(name, metas).unwrap();
    for _ in 0..rows {
        let year = if rng.chance_permille(150) {
            Cell::Null
        } else {
            Cell::number(rng.range_i64(1995, 2025))
        };
        t.push_row(vec![
            random_cell(rng, DeclaredType::Text),
            random_cell(rng, DeclaredType::Text),
            random_cell(rng, DeclaredType::Text),
            random_cell(rng, DeclaredType::Currency),
            random_cell(rng, DeclaredType::Currency),
            random_cell(rng, DeclaredType::Currency),
            random_cell(rng, DeclaredType::Date),
            year,
        ])
        .unwrap();
    }
    t
}

const WHERE_POOL: [&str; 9] = [
    "t1 == \"Federal\"",
    "n1 > 0",
    "t1 is null",
    "not (t2 is null)",
    "year(d1) > 2010",
    "t1 in [\"Federal\", \"Quebec\"]",
    "contains(t2, \"a\")",
    "n1 > 0 and t1 == \"Ontario\"",
    "t3 == \"x\" or n2 <= 50",
];

fn random_where(rng: &mut SplitMix64) -> Option<String> {
    if rng.chance_permille(300) {
        None
    } else {
        Some(WHERE_POOL[rng.bounded(WHERE_POOL.len() as u64) as usize].to_string())
    }
}

/// One randomized expectation of the given kind, compiled through the suite
/// loader.
fn random_expectation(rng: &mut SplitMix64, kind: &str) -> Expectation {
    let mut doc = ExpectationDoc::new("case", kind);
    doc.where_ = random_where(rng);
    let text_col = |rng: &mut SplitMix64| ["t1", "t2", "t3"][rng.bounded(3) as usize];
    let num_col = |rng: &mut SplitMix64| ["n1", "n2", "n3"][rng.bounded(3) as usize];
    match kind {
        "not_null" => {
            let all = ["t1", "t2", "t3", "n1", "n2", "n3", "d1", "y1"];
            doc = doc.columns(&[all[rng.bounded(8) as usize]]);
        }
        "any_not_null" => {
            doc = doc.columns(&[text_col(rng), num_col(rng), "d1"]);
        }
        "pattern" => {
            let patterns = [r"\d{4}-\d{2}-\d{2}", "[A-Za-z ]+", "F.*", "x|y z"];
            doc = doc.columns(&[text_col(rng)]).param(
                "pattern",
                serde_json::json!(patterns[rng.bounded(4) as usize]),
            );
        }
        "in_set" => {
            doc = doc.columns(&[text_col(rng)]).param(
                "allowed",
                serde_json::json!(["Federal", "Quebec", "x", "2014-03-07"]),
            );
        }
        "pair_sum_tolerance" => {
            let tolerances = ["0", "2.5", "5"];
            doc = doc.columns(&["n1", "n2", "n3"]).param(
                "tolerance",
                serde_json::json!(tolerances[rng.bounded(3) as usize]),
            );
        }
        "schema_window_nullness" => {
            doc = doc.param("year_column", serde_json::json!("y1"));
        }
        "foreign_key" => {
            doc = doc
                .columns(&[text_col(rng)])
                .param("target_table", serde_json::json!("target"))
                .param("target_columns", serde_json::json!(["t1"]));
        }
        "benchmark_upper_bound" => {
            doc = doc
                .param("amount_column", serde_json::json!("n1"))
                .param("region_column", serde_json::json!("t1"))
                .param("year_column", serde_json::json!("y1"))
                .param("donor_class", serde_json::json!("individual"))
                .param(
                    "exemptions",
                    serde_json::json!(["contains(t2, \"Estate\")", "t3 == \"x\""]),
                );
        }
        "cross_aggregate_leq" => {
            doc = doc
                .param("value_column", serde_json::json!("n1"))
                .param("group_by", serde_json::json!(["t1"]))
                .param("total_table", serde_json::json!("target"))
                .param("total_column", serde_json::json!("n1"))
                .param("total_keys", serde_json::json!(["t1"]));
        }
        "compensation_lower_bound" => {
            doc = doc
                .param("era_start", serde_json::json!(2003))
                .param("era_end", serde_json::json!(2008))
                .param("total_table", serde_json::json!("target"))
                .param("total_column", serde_json::json!("n1"))
                .param("join_keys", serde_json::json!(["t1"]));
        }
        other => panic!("unknown kind {other}"),
    }
    let suite = compile_suite(&SuiteDoc {
        name: "case".to_string(),
        table: "main".to_string(),
        expectations: vec![doc],
    })
    .unwrap();
    suite.expectations.into_iter().next().unwrap()
}

fn random_registries(rng: &mut SplitMix64) -> Registries {
    let mut benchmark = BenchmarkTable::default();
    for region in ["Federal", "Ontario", "Quebec"] {
        if rng.chance_permille(800) {
            benchmark.insert(
                region,
                2022,
                "individual",
                Decimal::from_cents(rng.range_i64(100, 15_000)),
            );
        }
    }
    let windows = vec![
        SchemaWindow {
            column: "n2".to_string(),
            start_year: 2000,
            end_year: rng.range_i64(2001, 2015) as i32,
            table: "main".to_string(),
            label: "w1".to_string(),
        },
        SchemaWindow {
            column: "n3".to_string(),
            start_year: rng.range_i64(1995, 2005) as i32,
            end_year: 2022,
            table: "main".to_string(),
            label: "w2".to_string(),
        },
        SchemaWindow {
            column: "d1".to_string(),
            start_year: 2005,
            end_year: 2010,
            table: "main".to_string(),
            label: "w3".to_string(),
        },
    ];
    let brackets = vec![veritas_core::model::SalaryBracketSchema {
        era_start: 2003,
        era_end: 2008,
        brackets: vec![
            veritas_core::model::SalaryBracket {
                count_column: "n2".to_string(),
                lower_bound: Decimal::from_int(40_000),
            },
            veritas_core::model::SalaryBracket {
                count_column: "n3".to_string(),
                lower_bound: Decimal::from_int(80_000),
            },
        ],
    }];
    Registries {
        windows,
        benchmark: Some(benchmark),
        brackets,
    }
}

// ---------------------------------------------------------------------------
// 4. Oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn acceptance_oracle_equivalence() {
    let _guard = serial();
    const KINDS: [&str; 10] = [
        "not_null",
        "any_not_null",
        "pattern",
        "in_set",
        "pair_sum_tolerance",
        "schema_window_nullness",
        "foreign_key",
        "benchmark_upper_bound",
        "cross_aggregate_leq",
        "compensation_lower_bound",
    ];
    const CASES_PER_KIND: usize = 1000;

    let mut rng = SplitMix64::new(0xACCE97);
    let opts = EvalOptions {
        chunk_rows: 17,
        ..EvalOptions::default()
    };
    let mut total = 0u64;
    for kind in KINDS {
        for case in 0..CASES_PER_KIND {
            let rows = rng.bounded(201) as usize;
            let table = random_table(&mut rng, "main", rows);
            let target_rows = rng.bounded(51) as usize;
            let target = random_table(&mut rng, "target", target_rows);
            let mut tables = BTreeMap::new();
            tables.insert("main".to_string(), table);
            tables.insert("target".to_string(), target);
            let registries = random_registries(&mut rng);
            let exp = random_expectation(&mut rng, kind);

            let main = &tables["main"];
            let engine = checks::run_expectation(&exp, main, &tables, &registries, &opts);
            let oracle = reference::expectation_counts(&exp, main, &tables, &registries);
            match (engine, oracle) {
                (Ok(out), Ok((e, p, f))) => {
                    assert_eq!(
                        (out.evaluated, out.passed, out.failed),
                        (e, p, f),
                        "kind {kind} case {case} disagrees with the oracle"
                    );
                }
                (Err(_), Err(_)) => {}
                (engine, oracle) => panic!(
                    "kind {kind} case {case}: error behaviour diverges \
                     (engine ok={}, oracle ok={})",
                    engine.is_ok(),
                    oracle.is_ok()
                ),
            }
            total += 1;
        }
    }
    println!("ACCEPTANCE oracle-equivalence: PASS ({total} cases, zero mismatches)");
}

// ---------------------------------------------------------------------------
// 5. Scoping law
// ---------------------------------------------------------------------------

#[test]
fn acceptance_scoping_law() {
    let _guard = serial();
    const KINDS: [&str; 5] = [
        "not_null",
        "any_not_null",
        "pattern",
        "in_set",
        "pair_sum_tolerance",
    ];
    const CASES_PER_KIND: usize = 300;

    let mut rng = SplitMix64::new(0x5C09E);
    let opts = EvalOptions::default();
    let mut total = 0u64;
    for kind in KINDS {
        for case in 0..CASES_PER_KIND {
            let rows = rng.bounded(201) as usize;
            let table = random_table(&mut rng, "main", rows);
            let exp = random_expectation(&mut rng, kind);

            // Brute force: count rows in scope, then apply the kind's
            // exclusion rule directly.
            let mut expected_evaluated = 0u64;
            for row in 0..table.row_count() {
                if let Some(cond) = &exp.where_ {
                    if !veritas_core::condition::eval_condition(cond, &table, row).unwrap() {
                        continue;
                    }
                }
                let included = match kind {
                    "not_null" | "any_not_null" => true,
                    "pattern" | "in_set" => {
                        let idx = table.column_index(&exp.columns[0]).unwrap();
                        !table.cell(row, idx).is_null()
                    }
                    "pair_sum_tolerance" => {
                        let any_part = exp.columns[1..].iter().any(|c| {
                            let idx = table.column_index(c).unwrap();
                            !table.cell(row, idx).is_null()
                        });
                        let total_idx = table.column_index(&exp.columns[0]).unwrap();
                        any_part && !table.cell(row, total_idx).is_null()
                    }
                    _ => unreachable!(),
                };
                if included {
                    expected_evaluated += 1;
                }
            }

            let tables = BTreeMap::new();
            let out = checks::run_expectation(&exp, &table, &tables, &Registries::default(), &opts)
                .unwrap();
            assert_eq!(
                out.evaluated, expected_evaluated,
                "kind {kind} case {case}: scoping law violated"
            );
            assert_eq!(out.evaluated, out.passed + out.failed);
            total += 1;
        }
    }
    println!("ACCEPTANCE scoping-law: PASS ({total} cases, zero mismatches)");
}

// ---------------------------------------------------------------------------
// 6. Determinism
// ---------------------------------------------------------------------------

#[test]
fn acceptance_determinism() {
    let _guard = serial();
    let dir = tempfile::tempdir().unwrap();
    let config = find_scenario("donations-findings").unwrap();
    generate_scenario(&config, dir.path()).unwrap();
    let (manifest, tables, registries) = load_corpus(dir.path());
    let suite = load_suite(&dir.path().join(&manifest.suites[0].file)).unwrap();

    let mut serialized: Vec<String> = Vec::new();
    for threads in [1usize, 2, 8] {
        for _run in 0..3 {
            let opts = EvalOptions {
                threads,
                ..EvalOptions::default()
            };
            let report = evaluate_suite(&suite, &tables, &registries, &opts).unwrap();
            serialized.push(report.to_json_string());
        }
    }
    for (i, s) in serialized.iter().enumerate() {
        assert_eq!(
            *s, serialized[0],
            "serialized report {i} differs from the first run"
        );
    }
    println!(
        "ACCEPTANCE determinism: PASS ({} byte-identical reports across workers 1/2/8)",
        serialized.len()
    );
}

// ---------------------------------------------------------------------------
// 7. Performance
// ---------------------------------------------------------------------------

fn million_row_config() -> ScenarioConfig {
    let column = |name: &str, declared_type: DeclaredType, gen: Gen| ColumnSpec {
        name: name.to_string(),
        declared_type,
        gen,
    };
    let table = TableSpec {
        name: "donations".to_string(),
        rows: 1_000_000,
        columns: vec![
            column(
                "date",
                DeclaredType::Text,
                Gen::DateInYears {
                    start_year: 2001,
                    end_year: 2022,
                },
            ),
            column(
                "year",
                DeclaredType::Number,
                Gen::YearOfDate {
                    date_column: "date".to_string(),
                },
            ),
            column(
                "amount",
                DeclaredType::Currency,
                Gen::CurrencyRange {
                    min_cents: 600,
                    max_cents: 500_000,
                },
            ),
            column(
                "political_entity",
                DeclaredType::Text,
                Gen::Choice {
                    options: vec![
                        "Liberal Party of Canada".to_string(),
                        "Conservative Party of Canada".to_string(),
                        "NDP Federal Council".to_string(),
                    ],
                },
            ),
            column(
                "amount_monetary",
                DeclaredType::Currency,
                Gen::Const {
                    value: CellSpec::Null,
                },
            ),
            column(
                "amount_non_monetary",
                DeclaredType::Currency,
                Gen::Const {
                    value: CellSpec::Null,
                },
            ),
        ],
        post: vec![PostOp::SplitPair {
            total: "amount".to_string(),
            part1: "amount_monetary".to_string(),
            part2: "amount_non_monetary".to_string(),
            when: "year > 2000".to_string(),
            jitter_cents: 500,
        }],
    };
    let suite = SuiteDoc {
        name: "perf".to_string(),
        table: "donations".to_string(),
        expectations: vec![
            ExpectationDoc::new("entity_not_null", "not_null").columns(&["political_entity"]),
            ExpectationDoc::new("date_pattern", "pattern")
                .columns(&["date"])
                .param("pattern", serde_json::json!(r"\d{4}-\d{2}-\d{2}")),
            ExpectationDoc::new("parts_sum", "pair_sum_tolerance")
                .columns(&["amount", "amount_monetary", "amount_non_monetary"])
                .param("tolerance", serde_json::json!(5)),
        ],
    };
    ScenarioConfig {
        name: "perf-donations".to_string(),
        seed: 99,
        tables: vec![table],
        injections: vec![InjectionSpec {
            label: "entity_nulls".to_string(),
            table: "donations".to_string(),
            columns: vec!["political_entity".to_string()],
            count: 22_400,
            kind: InjectKind::Null,
            where_: None,
        }],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

#[test]
fn acceptance_performance() {
    let _guard = serial();
    let config = million_row_config();
    let tables = build_tables(&config).unwrap();
    let suite: ExpectationSuite = compile_suite(&config.suites[0]).unwrap();
    let registries = Registries::default();

    let timed = |threads: usize| {
        let opts = EvalOptions {
            threads,
            ..EvalOptions::default()
        };
        let start = Instant::now();
        let report = evaluate_suite(&suite, &tables, &registries, &opts).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert_eq!(report.results[0].failed, 22_400);
        assert_eq!(report.results[0].evaluated, 1_000_000);
        assert_eq!(rate6(report.results[1].success_rate), "1.000000");
        assert_eq!(rate6(report.results[2].success_rate), "1.000000");
        elapsed
    };
    // Warm-up pass, then best of three per configuration to shed scheduler
    // noise.
    timed(1);
    let best = |threads: usize| (0..3).map(|_| timed(threads)).fold(f64::INFINITY, f64::min);
    let single = best(1);
    let four_workers = best(4);
    let speedup = single / four_workers;
    println!(
        "ACCEPTANCE performance: single-threaded {single:.3} s, \
         4 workers {four_workers:.3} s, speedup {speedup:.2}x \
         (host has {} cores)",
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(0)
    );
    assert!(
        single < 15.0,
        "single-threaded run took {single:.3} s, limit is 15 s"
    );
    assert!(
        speedup >= 2.0,
        "4-worker speedup is {speedup:.2}x, required at least 2x"
    );
    println!("ACCEPTANCE performance: PASS");
}

// ---------------------------------------------------------------------------
// 8. Coercion diagnostics
// ---------------------------------------------------------------------------

#[test]
fn acceptance_coercion_diagnostics() {
    let _guard = serial();
    const ROWS: usize = 5_000;
    const ARTIFACTS: usize = 137;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("amounts.csv");
    let mut rng = SplitMix64::new(0x0C12);
    let mut dirty_rows: Vec<usize> = (0..ROWS).collect();
    rng.partial_shuffle(&mut dirty_rows, ARTIFACTS);
    let dirty: std::collections::HashSet<usize> = dirty_rows[..ARTIFACTS].iter().copied().collect();

    let mut csv = String::from("donor,amount\n");
    let artifacts = ["S500", "1O75", "\"$1,2X4.50\""];
    for row in 0..ROWS {
        let amount = if dirty.contains(&row) {
            artifacts[rng.bounded(3) as usize].to_string()
        } else {
            format!(
                "\"${},{:03}.{:02}\"",
                rng.range_i64(1, 9),
                rng.range_i64(0, 999),
                rng.range_i64(0, 99)
            )
        };
        csv.push_str(&format!("donor {row},{amount}\n"));
    }
    std::fs::write(&path, csv).unwrap();

    let metas = vec![
        ColumnMeta::new("donor", DeclaredType::Text),
        ColumnMeta::new("amount", DeclaredType::Currency),
    ];
    let outcome = load_table(&path, "amounts", &metas).unwrap();
    assert_eq!(outcome.table.row_count(), ROWS);
    assert_eq!(
        outcome.diagnostics.len(),
        ARTIFACTS,
        "exactly the injected cells must surface as diagnostics"
    );
    for diagnostic in &outcome.diagnostics {
        assert!(dirty.contains(&(diagnostic.row as usize)));
        assert_eq!(diagnostic.column, "amount");
        let idx = outcome.table.column_index("amount").unwrap();
        assert!(outcome.table.cell(diagnostic.row as usize, idx).is_null());
    }

    // The dirty table still evaluates; the nulled cells simply fail the
    // presence check.
    let out =
        checks::check_not_null(&outcome.table, "amount", None, &EvalOptions::default()).unwrap();
    assert_eq!(out.failed, ARTIFACTS as u64);
    println!("ACCEPTANCE coercion: PASS ({ARTIFACTS} diagnostics, zero crashes)");
}

// ---------------------------------------------------------------------------
// Sanity: the condition evaluation errors propagate as errored results
// rather than silent scope changes.
// ---------------------------------------------------------------------------

#[test]
fn condition_errors_surface_as_errored_results() {
    let _guard = serial();
    let mut rng = SplitMix64::new(3);
    let table = random_table(&mut rng, "main", 20);
    let doc = SuiteDoc {
        name: "s".to_string(),
        table: "main".to_string(),
        expectations: vec![ExpectationDoc::new("bad_scope", "not_null")
            .columns(&["t1"])
            // year() over a text column is a type error at evaluation time.
            .where_clause("year(t2) > 2000")],
    };
    let suite = compile_suite(&doc).unwrap();
    let mut tables = BTreeMap::new();
    tables.insert("main".to_string(), table);
    let report = evaluate_suite(
        &suite,
        &tables,
        &Registries::default(),
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(report.results[0].status, Status::Errored);
}
