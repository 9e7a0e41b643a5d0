//! Engine-level properties: determinism across worker counts, rate
//! monotonicity, and the derived-column equivalence.

use std::collections::BTreeMap;

use veritas_core::cell::Cell;
use veritas_core::decimal::Decimal;
use veritas_core::engine::{checks, evaluate_suite, EvalOptions};
use veritas_core::model::{compile_suite, ExpectationDoc, Registries, SuiteDoc};
use veritas_core::rng::SplitMix64;
use veritas_core::table::{ColumnMeta, DeclaredType, Table};
use veritas_core::wrangle::derive_abs_diff_column;

fn numeric_table(rng: &mut SplitMix64, rows: usize) -> Table {
    let mut t = Table::new(
        "t",
        vec![
            ColumnMeta::new("total", DeclaredType::Currency),
            ColumnMeta::new("p1", DeclaredType::Currency),
            ColumnMeta::new("p2", DeclaredType::Currency),
        ],
    )
    .unwrap();
    for _ in 0..rows {
        let cell = |rng: &mut SplitMix64| {
            if rng.chance_permille(250) {
                Cell::Null
            } else {
                Cell::Number(Decimal::from_cents(rng.range_i64(-2_000, 12_000)))
            }
        };
        let row = vec![cell(rng), cell(rng), cell(rng)];
        t.push_row(row).unwrap();
    }
    t
}

#[test]
fn reports_are_identical_across_worker_counts() {
    let mut rng = SplitMix64::new(4242);
    let mut table = Table::new(
        "t",
        vec![
            ColumnMeta::new("a", DeclaredType::Text),
            ColumnMeta::new("total", DeclaredType::Currency),
            ColumnMeta::new("p1", DeclaredType::Currency),
            ColumnMeta::new("p2", DeclaredType::Currency),
        ],
    )
    .unwrap();
    for i in 0..5000 {
        let a = if rng.chance_permille(100) {
            Cell::Null
        } else {
            Cell::text(format!("v{i}"))
        };
        table
            .push_row(vec![
                a,
                Cell::number(rng.range_i64(0, 100)),
                Cell::number(rng.range_i64(0, 60)),
                Cell::number(rng.range_i64(0, 60)),
            ])
            .unwrap();
    }
    let doc = SuiteDoc {
        name: "p".to_string(),
        table: "t".to_string(),
        expectations: vec![
            ExpectationDoc::new("a_not_null", "not_null").columns(&["a"]),
            ExpectationDoc::new("sum", "pair_sum_tolerance")
                .columns(&["total", "p1", "p2"])
                .param("tolerance", serde_json::json!(30)),
        ],
    };
    let suite = compile_suite(&doc).unwrap();
    let mut tables = BTreeMap::new();
    tables.insert("t".to_string(), table);
    let registries = Registries::default();

    let mut serialized = Vec::new();
    for threads in [1, 2, 8] {
        for _ in 0..2 {
            let opts = EvalOptions {
                threads,
                chunk_rows: 333,
                ..EvalOptions::default()
            };
            let report = evaluate_suite(&suite, &tables, &registries, &opts).unwrap();
            serialized.push(report.to_json_string());
        }
    }
    for s in &serialized[1..] {
        assert_eq!(*s, serialized[0]);
    }
}

#[test]
fn adding_rows_moves_rates_monotonically() {
    let mut rng = SplitMix64::new(7001);
    for _ in 0..200 {
        let rows = rng.range_i64(1, 40) as usize;
        let mut t = Table::new("t", vec![ColumnMeta::new("a", DeclaredType::Text)]).unwrap();
        for _ in 0..rows {
            let cell = if rng.chance_permille(400) {
                Cell::Null
            } else {
                Cell::text("x")
            };
            t.push_row(vec![cell]).unwrap();
        }
        let opts = EvalOptions::default();
        let base = checks::check_not_null(&t, "a", None, &opts).unwrap();
        let base_rate = base.passed as f64 / base.evaluated as f64;

        let mut with_pass = t.clone();
        with_pass.push_row(vec![Cell::text("y")]).unwrap();
        let passed = checks::check_not_null(&with_pass, "a", None, &opts).unwrap();
        let pass_rate = passed.passed as f64 / passed.evaluated as f64;
        assert!(pass_rate >= base_rate);

        let mut with_fail = t.clone();
        with_fail.push_row(vec![Cell::Null]).unwrap();
        let failed = checks::check_not_null(&with_fail, "a", None, &opts).unwrap();
        let fail_rate = failed.passed as f64 / failed.evaluated as f64;
        assert!(fail_rate <= base_rate);
    }
}

#[test]
fn zero_tolerance_pair_sum_is_strict_equality() {
    let mut rng = SplitMix64::new(88);
    let opts = EvalOptions::default();
    let parts = vec!["p1".to_string(), "p2".to_string()];
    for _ in 0..100 {
        let t = numeric_table(&mut rng, 60);
        let out = checks::check_pair_sum_tolerance(&t, "total", &parts, Decimal::ZERO, None, &opts)
            .unwrap();
        let mut expect_pass = 0;
        let mut expect_eval = 0;
        for row in 0..t.row_count() {
            let p1 = t.cell(row, 1).as_number();
            let p2 = t.cell(row, 2).as_number();
            if p1.is_none() && p2.is_none() {
                continue;
            }
            let total = match t.cell(row, 0).as_number() {
                Some(n) => n,
                None => continue,
            };
            expect_eval += 1;
            let sum = p1.map(|n| n.raw()).unwrap_or(0) + p2.map(|n| n.raw()).unwrap_or(0);
            if sum == total.raw() {
                expect_pass += 1;
            }
        }
        assert_eq!(out.evaluated, expect_eval);
        assert_eq!(out.passed, expect_pass);
    }
}

/// Appending the |total - parts| column and thresholding it agrees with the
/// pair-sum check wherever the derived cell is non-null.
#[test]
fn derived_diff_column_matches_pair_sum_check() {
    let mut rng = SplitMix64::new(505);
    let opts = EvalOptions::default();
    let parts = vec!["p1".to_string(), "p2".to_string()];
    for case in 0..100 {
        let t = numeric_table(&mut rng, 50);
        let tolerance = Decimal::from_cents(rng.range_i64(0, 1_000));
        let check =
            checks::check_pair_sum_tolerance(&t, "total", &parts, tolerance, None, &opts).unwrap();

        let derived = derive_abs_diff_column(&t, "total", &parts, "diff").unwrap();
        let idx = derived.column_index("diff").unwrap();
        let mut evaluated = 0;
        let mut passed = 0;
        for row in 0..derived.row_count() {
            if let Some(diff) = derived.cell(row, idx).as_number() {
                evaluated += 1;
                if diff <= tolerance {
                    passed += 1;
                }
            }
        }
        assert_eq!(check.evaluated, evaluated, "case {case}");
        assert_eq!(check.passed, passed, "case {case}");
    }
}

#[test]
fn errored_expectations_do_not_stop_the_suite() {
    let mut t = Table::new("t", vec![ColumnMeta::new("a", DeclaredType::Text)]).unwrap();
    t.push_row(vec![Cell::text("x")]).unwrap();
    let doc = SuiteDoc {
        name: "s".to_string(),
        table: "t".to_string(),
        expectations: vec![
            ExpectationDoc::new("ok1", "not_null").columns(&["a"]),
            ExpectationDoc::new("bad", "not_null").columns(&["missing"]),
            ExpectationDoc::new("ok2", "not_null").columns(&["a"]),
        ],
    };
    let suite = compile_suite(&doc).unwrap();
    let mut tables = BTreeMap::new();
    tables.insert("t".to_string(), t);
    let report = evaluate_suite(
        &suite,
        &tables,
        &Registries::default(),
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(report.results.len(), 3);
    assert_eq!(report.results[0].status, veritas_core::engine::Status::Ok);
    assert_eq!(
        report.results[1].status,
        veritas_core::engine::Status::Errored
    );
    assert!(report.results[1]
        .error
        .as_deref()
        .unwrap()
        .contains("missing"));
    assert_eq!(report.results[2].status, veritas_core::engine::Status::Ok);
    assert_eq!(report.totals.errored, 1);
}

#[test]
fn vacuous_scope_is_flagged_with_perfect_rate() {
    let mut t = Table::new(
        "t",
        vec![
            ColumnMeta::new("a", DeclaredType::Text),
            ColumnMeta::new("region", DeclaredType::Text),
        ],
    )
    .unwrap();
    t.push_row(vec![Cell::Null, Cell::text("Quebec")]).unwrap();
    let doc = SuiteDoc {
        name: "s".to_string(),
        table: "t".to_string(),
        expectations: vec![ExpectationDoc::new("scoped", "not_null")
            .columns(&["a"])
            .where_clause("region == \"Federal\"")],
    };
    let suite = compile_suite(&doc).unwrap();
    let mut tables = BTreeMap::new();
    tables.insert("t".to_string(), t);
    let report = evaluate_suite(
        &suite,
        &tables,
        &Registries::default(),
        &EvalOptions::default(),
    )
    .unwrap();
    let result = &report.results[0];
    assert_eq!(result.status, veritas_core::engine::Status::Vacuous);
    assert_eq!(result.evaluated, 0);
    assert_eq!(result.success_rate, 1.0);
    assert!(report.to_json_string().contains("\"vacuous\""));
}
