//! The shipped scenarios.
//!
//! Each scenario fixes row counts and injection counts so the paired suite
//! reproduces its published success rates exactly: the donations table
//! reports 0.9776 on political-entity presence, the registrations trio
//! reports 0.9966/0.9944/0.9945, funding sources 0.9891, communications
//! carries 2 missing targets, 25 missing subject matters, and 644 bad
//! region labels, the revolving-door link resolves at 0.9958, the charities
//! sample violates 61 line-item windows with 0.95/0.978/0.985/0.973 on its
//! aggregate checks, and the 2022 legal-limit screen flags 2 Federal, 1
//! British Columbia, and 11 Quebec rows.

use serde_json::json;

use veritas_core::model::{ExpectationDoc, SchemaWindow, SuiteDoc};
use veritas_core::table::DeclaredType;

use crate::scenario::{
    BenchmarkEntry, BracketEntry, CellSpec, ColumnSpec, Gen, InjectKind, InjectionSpec, PostOp,
    ScenarioConfig, TableSpec,
};

/// The official English province and territory names, plus the federal
/// jurisdiction.
pub const CANONICAL_REGIONS: [&str; 14] = [
    "Alberta",
    "British Columbia",
    "Federal",
    "Manitoba",
    "New Brunswick",
    "Newfoundland and Labrador",
    "Northwest Territories",
    "Nova Scotia",
    "Nunavut",
    "Ontario",
    "Prince Edward Island",
    "Quebec",
    "Saskatchewan",
    "Yukon",
];

fn regions_value() -> serde_json::Value {
    json!(CANONICAL_REGIONS)
}

fn column(name: &str, declared_type: DeclaredType, gen: Gen) -> ColumnSpec {
    ColumnSpec {
        name: name.to_string(),
        declared_type,
        gen,
    }
}

fn text_choice(name: &str, options: &[&str]) -> ColumnSpec {
    column(
        name,
        DeclaredType::Text,
        Gen::Choice {
            options: options.iter().map(|s| s.to_string()).collect(),
        },
    )
}

fn inject(
    label: &str,
    table: &str,
    columns: &[&str],
    count: usize,
    kind: InjectKind,
    where_: Option<&str>,
) -> InjectionSpec {
    InjectionSpec {
        label: label.to_string(),
        table: table.to_string(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        count,
        kind,
        where_: where_.map(|w| w.to_string()),
    }
}

fn null_injection(label: &str, table: &str, columns: &[&str], count: usize) -> InjectionSpec {
    inject(label, table, columns, count, InjectKind::Null, None)
}

fn window(table: &str, column: &str, start: i32, end: i32, label: &str) -> SchemaWindow {
    SchemaWindow {
        column: column.to_string(),
        start_year: start,
        end_year: end,
        table: table.to_string(),
        label: label.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Donations
// ---------------------------------------------------------------------------

fn donations_findings() -> ScenarioConfig {
    let table = TableSpec {
        name: "donations".to_string(),
        rows: 10_000,
        columns: vec![
            column(
                "date",
                DeclaredType::Text,
                Gen::DateInYears {
                    start_year: 1995,
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
            column("donor_full_name", DeclaredType::Text, Gen::PersonName),
            text_choice(
                "political_party",
                &[
                    "Liberal Party",
                    "Conservative Party",
                    "New Democratic Party",
                    "Green Party",
                    "Bloc Québécois",
                ],
            ),
            text_choice(
                "region",
                &[
                    "Federal",
                    "Ontario",
                    "British Columbia",
                    "Quebec",
                    "Alberta",
                    "Manitoba",
                ],
            ),
            column("recipient", DeclaredType::Text, Gen::PersonName),
            text_choice(
                "political_entity",
                &[
                    "Liberal Party of Canada",
                    "Conservative Party of Canada",
                    "NDP Federal Council",
                    "Green Party Fund",
                    "Ontario PC Party",
                ],
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
        name: "donations-findings".to_string(),
        table: "donations".to_string(),
        expectations: vec![
            ExpectationDoc::new("donations_amount_not_null", "not_null").columns(&["amount"]),
            ExpectationDoc::new("donations_political_entity_not_null", "not_null")
                .columns(&["political_entity"]),
            ExpectationDoc::new("donations_amount_parts_sum", "pair_sum_tolerance")
                .columns(&["amount", "amount_monetary", "amount_non_monetary"])
                .param("tolerance", json!(5))
                .where_clause(
                    "year > 2000 and region == \"Federal\" and \
                     (not (amount_monetary is null) or not (amount_non_monetary is null))",
                ),
            ExpectationDoc::new("donations_date_pattern", "pattern")
                .columns(&["date"])
                .param("pattern", json!(r"\d{4}-\d{2}-\d{2}")),
        ],
    };

    ScenarioConfig {
        name: "donations-findings".to_string(),
        seed: 7,
        tables: vec![table],
        injections: vec![null_injection(
            "political_entity_nulls",
            "donations",
            &["political_entity"],
            224,
        )],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Lobbying registrations
// ---------------------------------------------------------------------------

fn registrations_findings() -> ScenarioConfig {
    let table = TableSpec {
        name: "registrations".to_string(),
        rows: 10_000,
        columns: vec![
            column(
                "registration_number",
                DeclaredType::Text,
                Gen::SeqText {
                    prefix: "REG-".to_string(),
                    pad: 6,
                },
            ),
            column("org_name", DeclaredType::Text, Gen::OrgName),
            text_choice(
                "region",
                &["Federal", "Ontario", "British Columbia", "Quebec", "Yukon"],
            ),
            text_choice(
                "subject_matters",
                &[
                    "Health",
                    "Energy",
                    "Taxation",
                    "Environment",
                    "Agriculture",
                    "Transport",
                ],
            ),
            text_choice(
                "targets",
                &[
                    "Ministry of Health",
                    "Treasury Board",
                    "Parliament",
                    "Cabinet Office",
                ],
            ),
            column("affiliates", DeclaredType::Text, Gen::PersonName),
            text_choice("categories", &["Consultant", "In-house"]),
        ],
        post: Vec::new(),
    };

    let suite = SuiteDoc {
        name: "registrations-findings".to_string(),
        table: "registrations".to_string(),
        expectations: vec![
            ExpectationDoc::new("registrations_number_not_null", "not_null")
                .columns(&["registration_number"]),
            ExpectationDoc::new("registrations_org_name_not_null", "not_null")
                .columns(&["org_name"]),
            ExpectationDoc::new("registrations_region_not_null", "not_null").columns(&["region"]),
            ExpectationDoc::new("registrations_region_canonical", "in_set")
                .columns(&["region"])
                .param("allowed", regions_value()),
        ],
    };

    ScenarioConfig {
        name: "registrations-findings".to_string(),
        seed: 11,
        tables: vec![table],
        injections: vec![
            null_injection(
                "registration_number_nulls",
                "registrations",
                &["registration_number"],
                34,
            ),
            null_injection("org_name_nulls", "registrations", &["org_name"], 56),
            null_injection("region_nulls", "registrations", &["region"], 55),
        ],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Government funding
// ---------------------------------------------------------------------------

fn funding_findings() -> ScenarioConfig {
    let table = TableSpec {
        name: "funding".to_string(),
        rows: 10_000,
        columns: vec![
            text_choice(
                "region",
                &["Federal", "Saskatchewan", "Ontario", "Quebec", "Alberta"],
            ),
            column("entity", DeclaredType::Text, Gen::OrgName),
            column(
                "registration_number",
                DeclaredType::Text,
                Gen::SeqText {
                    prefix: "FND-".to_string(),
                    pad: 6,
                },
            ),
            column(
                "sum",
                DeclaredType::Currency,
                Gen::CurrencyRange {
                    min_cents: 10_000,
                    max_cents: 10_000_000,
                },
            ),
            text_choice("source", &["Grant", "Contribution", "Contract"]),
            column(
                "financial_end",
                DeclaredType::Date,
                Gen::DateInYears {
                    start_year: 2015,
                    end_year: 2022,
                },
            ),
        ],
        post: vec![PostOp::NullUnless {
            column: "financial_end".to_string(),
            when: "region in [\"Federal\", \"Saskatchewan\"]".to_string(),
        }],
    };

    let suite = SuiteDoc {
        name: "funding-findings".to_string(),
        table: "funding".to_string(),
        expectations: vec![
            ExpectationDoc::new("funding_source_not_null", "not_null").columns(&["source"]),
            ExpectationDoc::new("funding_financial_end_not_null", "not_null")
                .columns(&["financial_end"])
                .where_clause("region in [\"Federal\", \"Saskatchewan\"]"),
            ExpectationDoc::new("funding_region_canonical", "in_set")
                .columns(&["region"])
                .param("allowed", regions_value()),
        ],
    };

    ScenarioConfig {
        name: "funding-findings".to_string(),
        seed: 13,
        tables: vec![table],
        injections: vec![null_injection("source_nulls", "funding", &["source"], 109)],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Lobbying communications
// ---------------------------------------------------------------------------

fn communications_findings() -> ScenarioConfig {
    let table = TableSpec {
        name: "communications".to_string(),
        rows: 10_000,
        columns: vec![
            column("name", DeclaredType::Text, Gen::PersonName),
            column("lobbyist", DeclaredType::Text, Gen::PersonName),
            text_choice(
                "subject_matters",
                &["Health", "Energy", "Taxation", "Environment", "Defence"],
            ),
            text_choice(
                "targets",
                &[
                    "Minister of Finance",
                    "Privy Council",
                    "Health Canada",
                    "Transport Canada",
                ],
            ),
            text_choice("region", &["Federal", "British Columbia"]),
        ],
        post: Vec::new(),
    };

    let suite = SuiteDoc {
        name: "communications-findings".to_string(),
        table: "communications".to_string(),
        expectations: vec![
            ExpectationDoc::new("communications_name_not_null", "not_null").columns(&["name"]),
            ExpectationDoc::new("communications_lobbyist_not_null", "not_null")
                .columns(&["lobbyist"]),
            ExpectationDoc::new("communications_targets_not_null", "not_null")
                .columns(&["targets"]),
            ExpectationDoc::new("communications_subject_matters_not_null", "not_null")
                .columns(&["subject_matters"]),
            ExpectationDoc::new("communications_region_canonical", "in_set")
                .columns(&["region"])
                .param("allowed", regions_value()),
        ],
    };

    ScenarioConfig {
        name: "communications-findings".to_string(),
        seed: 17,
        tables: vec![table],
        injections: vec![
            null_injection("target_nulls", "communications", &["targets"], 2),
            null_injection(
                "subject_matter_nulls",
                "communications",
                &["subject_matters"],
                25,
            ),
            inject(
                "bc_reports_regions",
                "communications",
                &["region"],
                644,
                InjectKind::SetCells {
                    values: vec![CellSpec::Text("Bc_Reports".to_string())],
                },
                None,
            ),
        ],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Revolving door
// ---------------------------------------------------------------------------

fn revolving_door_findings() -> ScenarioConfig {
    let registrations = TableSpec {
        name: "registrations".to_string(),
        rows: 3_000,
        columns: vec![
            column(
                "rid",
                DeclaredType::Text,
                Gen::SeqText {
                    prefix: "RID-".to_string(),
                    pad: 6,
                },
            ),
            column("org_name", DeclaredType::Text, Gen::OrgName),
            text_choice(
                "region",
                &["Federal", "Ontario", "British Columbia", "Yukon"],
            ),
        ],
        post: Vec::new(),
    };
    let revolving_door = TableSpec {
        name: "revolving_door".to_string(),
        rows: 10_000,
        columns: vec![
            column(
                "rid",
                DeclaredType::Text,
                Gen::CycleText {
                    prefix: "RID-".to_string(),
                    modulo: 3_000,
                    pad: 6,
                },
            ),
            column("lobbyist", DeclaredType::Text, Gen::PersonName),
            text_choice(
                "former_office",
                &[
                    "Deputy Minister",
                    "Chief of Staff",
                    "Policy Advisor",
                    "Director General",
                ],
            ),
            text_choice(
                "region",
                &["Federal", "Ontario", "British Columbia", "Yukon"],
            ),
        ],
        post: Vec::new(),
    };

    let suite = SuiteDoc {
        name: "revolving-door-findings".to_string(),
        table: "revolving_door".to_string(),
        expectations: vec![
            ExpectationDoc::new("revolving_door_rid_in_registrations", "foreign_key")
                .columns(&["rid"])
                .param("target_table", json!("registrations"))
                .param("target_columns", json!(["rid"])),
            ExpectationDoc::new("revolving_door_region_canonical", "in_set")
                .columns(&["region"])
                .param("allowed", regions_value()),
        ],
    };

    ScenarioConfig {
        name: "revolving-door-findings".to_string(),
        seed: 19,
        tables: vec![registrations, revolving_door],
        injections: vec![inject(
            "orphan_rids",
            "revolving_door",
            &["rid"],
            42,
            InjectKind::IndexedText {
                prefix: "ORPHAN-".to_string(),
            },
            None,
        )],
        suites: vec![suite],
        windows: Vec::new(),
        benchmark: Vec::new(),
        brackets: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Charities
// ---------------------------------------------------------------------------

const CHARITY_YEARS: [i32; 8] = [2003, 2005, 2007, 2008, 2010, 2014, 2018, 2022];
const GIFT_YEARS: [i32; 4] = [2005, 2008, 2014, 2022];
const CHARITY_COUNT: usize = 250;

fn line_item_name(i: usize) -> String {
    format!("li_{i:03}")
}

fn line_item_window(i: usize) -> (i32, i32) {
    if i <= 40 {
        (1990, 1996)
    } else if i <= 65 {
        (1997, 2002)
    } else {
        (2003, 2022)
    }
}

fn charities_findings() -> ScenarioConfig {
    let year_gen = Gen::CycleYears {
        years: CHARITY_YEARS.to_vec(),
        stride: CHARITY_COUNT,
    };
    let reg_gen = Gen::CycleText {
        prefix: "CHR-".to_string(),
        modulo: CHARITY_COUNT,
        pad: 5,
    };
    let windowed =
        |start: i32, end: i32, null_permille: u32, min: i64, max: i64| Gen::WindowedCurrency {
            start_year: start,
            end_year: end,
            year_column: "fiscal_year".to_string(),
            null_permille,
            min_cents: min,
            max_cents: max,
        };

    let mut tax_columns = vec![
        column("registration_number", DeclaredType::Text, reg_gen.clone()),
        column("fiscal_year", DeclaredType::Number, year_gen.clone()),
        column(
            "fiscal_period_end",
            DeclaredType::Date,
            Gen::DateFromYear {
                year_column: "fiscal_year".to_string(),
                month: 12,
                day: 31,
            },
        ),
        column(
            "first_return",
            DeclaredType::Number,
            Gen::Alternating {
                modulo: 2,
                one_when: 1,
            },
        ),
        column(
            "total_assets",
            DeclaredType::Currency,
            windowed(1990, 2022, 0, 100_000, 500_000_000),
        ),
        column(
            "total_expenditures",
            DeclaredType::Currency,
            windowed(1990, 2022, 100, 100_000, 500_000_000),
        ),
        column(
            "total_revenue",
            DeclaredType::Currency,
            windowed(1990, 2022, 100, 100_000, 500_000_000),
        ),
        column(
            "total_liabilities",
            DeclaredType::Currency,
            windowed(1990, 2022, 100, 100_000, 500_000_000),
        ),
        column(
            "total_compensation",
            DeclaredType::Currency,
            windowed(2003, 2022, 0, 10_000_000, 90_000_000),
        ),
        column(
            "ch5050_gifts_to_qualified_donees",
            DeclaredType::Currency,
            windowed(2003, 2022, 0, 100_000, 500_000),
        ),
    ];
    let mut windows = vec![
        window("tax_returns", "total_assets", 1990, 2022, "Total assets"),
        window(
            "tax_returns",
            "total_expenditures",
            1990,
            2022,
            "Total expenditures",
        ),
        window("tax_returns", "total_revenue", 1990, 2022, "Total revenue"),
        window(
            "tax_returns",
            "total_liabilities",
            1990,
            2022,
            "Total liabilities",
        ),
        window(
            "tax_returns",
            "total_compensation",
            2003,
            2022,
            "Total compensation",
        ),
        window(
            "tax_returns",
            "ch5050_gifts_to_qualified_donees",
            2003,
            2022,
            "Total amount of gifts to qualified donees",
        ),
    ];
    for i in 1..=70 {
        let (start, end) = line_item_window(i);
        let name = line_item_name(i);
        tax_columns.push(column(
            &name,
            DeclaredType::Currency,
            windowed(start, end, 300, 10_000, 10_000_000),
        ));
        windows.push(window(
            "tax_returns",
            &name,
            start,
            end,
            &format!("Line item {i}"),
        ));
    }

    let tax_returns = TableSpec {
        name: "tax_returns".to_string(),
        rows: CHARITY_COUNT * CHARITY_YEARS.len(),
        columns: tax_columns,
        post: Vec::new(),
    };

    let gifts = TableSpec {
        name: "gifts".to_string(),
        rows: CHARITY_COUNT * GIFT_YEARS.len() * 3,
        columns: vec![
            column("registration_number", DeclaredType::Text, reg_gen.clone()),
            column(
                "fiscal_year",
                DeclaredType::Number,
                Gen::CycleYears {
                    years: GIFT_YEARS.to_vec(),
                    stride: CHARITY_COUNT,
                },
            ),
            column("donee_name", DeclaredType::Text, Gen::OrgName),
            column(
                "gift_amount",
                DeclaredType::Currency,
                Gen::CurrencyRange {
                    min_cents: 1_000,
                    max_cents: 20_000,
                },
            ),
        ],
        post: Vec::new(),
    };

    let count_gen = |start: i32, end: i32, max: i64, null_permille: u32| Gen::WindowedCount {
        start_year: start,
        end_year: end,
        year_column: "fiscal_year".to_string(),
        max,
        null_permille,
    };
    let comp03_cols = [
        ("comp03_staff_0_39999", 0i64, 5i64),
        ("comp03_staff_40000_79999", 40_000, 2),
        ("comp03_staff_80000_119999", 80_000, 0),
        ("comp03_staff_120000_plus", 120_000, 0),
    ];
    let comp09_cols = [
        ("comp09_staff_1_39999", 1i64, 5i64),
        ("comp09_staff_40000_79999", 40_000, 2),
        ("comp09_staff_80000_119999", 80_000, 0),
        ("comp09_staff_120000_159999", 120_000, 0),
        ("comp09_staff_160000_199999", 160_000, 0),
        ("comp09_staff_200000_plus", 200_000, 0),
    ];

    let mut comp_columns = vec![
        column("registration_number", DeclaredType::Text, reg_gen),
        column("fiscal_year", DeclaredType::Number, year_gen),
        column(
            "fiscal_period_end",
            DeclaredType::Date,
            Gen::DateFromYear {
                year_column: "fiscal_year".to_string(),
                month: 12,
                day: 31,
            },
        ),
    ];
    let mut brackets = Vec::new();
    for (name, lower, max) in comp03_cols {
        comp_columns.push(column(
            name,
            DeclaredType::Number,
            count_gen(2003, 2008, max, 200),
        ));
        windows.push(window("compensation", name, 2003, 2008, name));
        brackets.push(BracketEntry {
            era_start: 2003,
            era_end: 2008,
            count_column: name.to_string(),
            lower_bound: veritas_core::Decimal::from_int(lower),
        });
    }
    for (name, lower, max) in comp09_cols {
        comp_columns.push(column(
            name,
            DeclaredType::Number,
            count_gen(2009, 2022, max, 200),
        ));
        windows.push(window("compensation", name, 2009, 2022, name));
        brackets.push(BracketEntry {
            era_start: 2009,
            era_end: 2022,
            count_column: name.to_string(),
            lower_bound: veritas_core::Decimal::from_int(lower),
        });
    }

    let compensation = TableSpec {
        name: "compensation".to_string(),
        rows: CHARITY_COUNT * CHARITY_YEARS.len(),
        columns: comp_columns,
        post: Vec::new(),
    };

    let injections = vec![
        inject(
            "all_totals_null",
            "tax_returns",
            &[
                "total_assets",
                "total_expenditures",
                "total_revenue",
                "total_liabilities",
            ],
            27,
            InjectKind::Null,
            Some("first_return == 0"),
        ),
        InjectionSpec {
            label: "out_of_window_line_items".to_string(),
            table: "tax_returns".to_string(),
            columns: (1..=61).map(line_item_name).collect(),
            count: 1,
            kind: InjectKind::OutOfWindowValue {
                year_column: "fiscal_year".to_string(),
                value: CellSpec::number(1_000),
            },
            where_: None,
        },
        inject(
            "comp_2003_2008_overcounts",
            "compensation",
            &["comp03_staff_120000_plus"],
            22,
            InjectKind::SetCells {
                values: vec![CellSpec::number(10)],
            },
            Some("fiscal_year >= 2003 and fiscal_year <= 2008"),
        ),
        inject(
            "comp_2009_2022_overcounts",
            "compensation",
            &["comp09_staff_200000_plus"],
            15,
            InjectKind::SetCells {
                values: vec![CellSpec::number(10)],
            },
            Some("fiscal_year >= 2009"),
        ),
        inject(
            "gift_sum_excesses",
            "gifts",
            &["gift_amount"],
            50,
            InjectKind::GroupDistinctValue {
                group_by: vec!["registration_number".to_string(), "fiscal_year".to_string()],
                value: CellSpec::number(50_000),
            },
            None,
        ),
    ];

    let returns_suite = SuiteDoc {
        name: "charities-returns-findings".to_string(),
        table: "tax_returns".to_string(),
        expectations: vec![
            ExpectationDoc::new("tax_returns_line_item_windows", "schema_window_nullness")
                .param("year_column", json!("fiscal_year")),
            ExpectationDoc::new("tax_returns_any_total_present", "any_not_null")
                .columns(&[
                    "total_assets",
                    "total_expenditures",
                    "total_revenue",
                    "total_liabilities",
                ])
                .where_clause("first_return == 0"),
        ],
    };
    let gifts_suite = SuiteDoc {
        name: "charities-gifts-findings".to_string(),
        table: "gifts".to_string(),
        expectations: vec![ExpectationDoc::new(
            "gifts_sum_within_reported_total",
            "cross_aggregate_leq",
        )
        .param("value_column", json!("gift_amount"))
        .param("group_by", json!(["registration_number", "fiscal_year"]))
        .param("total_table", json!("tax_returns"))
        .param("total_column", json!("ch5050_gifts_to_qualified_donees"))
        .param("total_keys", json!(["registration_number", "fiscal_year"]))],
    };
    let comp_suite = SuiteDoc {
        name: "charities-compensation-findings".to_string(),
        table: "compensation".to_string(),
        expectations: vec![
            ExpectationDoc::new("compensation_bound_2003_2008", "compensation_lower_bound")
                .param("era_start", json!(2003))
                .param("era_end", json!(2008))
                .param("total_table", json!("tax_returns"))
                .param("total_column", json!("total_compensation"))
                .param("join_keys", json!(["registration_number", "fiscal_year"]))
                .where_clause(
                    "year(fiscal_period_end) >= 2003 and year(fiscal_period_end) <= 2008",
                ),
            ExpectationDoc::new("compensation_bound_2009_2022", "compensation_lower_bound")
                .param("era_start", json!(2009))
                .param("era_end", json!(2022))
                .param("total_table", json!("tax_returns"))
                .param("total_column", json!("total_compensation"))
                .param("join_keys", json!(["registration_number", "fiscal_year"]))
                .where_clause("year(fiscal_period_end) >= 2009"),
            ExpectationDoc::new("compensation_bracket_windows", "schema_window_nullness")
                .param("year_column", json!("fiscal_year")),
        ],
    };

    ScenarioConfig {
        name: "charities-findings".to_string(),
        seed: 23,
        tables: vec![tax_returns, gifts, compensation],
        injections,
        suites: vec![returns_suite, gifts_suite, comp_suite],
        windows,
        benchmark: Vec::new(),
        brackets,
    }
}

// ---------------------------------------------------------------------------
// Legal limits
// ---------------------------------------------------------------------------

fn legal_limit_findings() -> ScenarioConfig {
    let benchmark = [
        ("Federal", "1675"),
        ("Ontario", "3325"),
        ("British Columbia", "1309.09"),
        ("Quebec", "100"),
        ("Alberta", "4300"),
        ("Manitoba", "5000"),
    ]
    .iter()
    .map(|(region, limit)| BenchmarkEntry {
        region: region.to_string(),
        year: 2022,
        donor_class: "individual".to_string(),
        limit: limit.parse().unwrap(),
    })
    .collect();

    let table = TableSpec {
        name: "donations_2022".to_string(),
        rows: 5_000,
        columns: vec![
            column("donor_full_name", DeclaredType::Text, Gen::PersonName),
            text_choice(
                "region",
                &[
                    "Federal",
                    "Ontario",
                    "British Columbia",
                    "Quebec",
                    "Alberta",
                    "Manitoba",
                ],
            ),
            column(
                "year",
                DeclaredType::Number,
                Gen::CycleYears {
                    years: vec![2021, 2022],
                    stride: 1,
                },
            ),
            column(
                "date",
                DeclaredType::Text,
                Gen::DateFromYear {
                    year_column: "year".to_string(),
                    month: 6,
                    day: 15,
                },
            ),
            column(
                "amount",
                DeclaredType::Currency,
                Gen::AmountUnderRegionLimit {
                    region_column: "region".to_string(),
                    year: 2022,
                    donor_class: "individual".to_string(),
                },
            ),
            text_choice(
                "political_entity",
                &[
                    "Liberal Party",
                    "Conservative Association",
                    "Green Fund",
                    "NDP Riding Assoc",
                ],
            ),
        ],
        post: Vec::new(),
    };

    let set = |donor: &str, amount: &str| InjectKind::SetCells {
        values: vec![
            CellSpec::Text(donor.to_string()),
            CellSpec::Number(amount.parse().unwrap()),
        ],
    };
    let injections = vec![
        inject(
            "bc_estate_exempt",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Estate of Margaret Hughes", "5000"),
            Some("region == \"British Columbia\" and year == 2022"),
        ),
        inject(
            "bc_estate_duplicate",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Margaret Hughes", "5000"),
            Some("region == \"British Columbia\" and year == 2022"),
        ),
        inject(
            "federal_estate_exempt",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Estate of Harold Weiss", "9000"),
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "aggregate_contributions",
            "donations_2022",
            &["donor_full_name", "amount"],
            2,
            set(
                "Contributions Of $200 Or Less/Contributions De 200 $ Ou Moins",
                "50000",
            ),
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "aggregate_contributions_lowercase",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Contributions of $200 or less", "12000"),
            Some("region == \"Ontario\" and year == 2022"),
        ),
        inject(
            "anonymous_total",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Total Anonymous Contributions", "30000"),
            Some("region == \"Manitoba\" and year == 2022"),
        ),
        inject(
            "leadership_contest",
            "donations_2022",
            &["political_entity", "amount"],
            1,
            InjectKind::SetCells {
                values: vec![
                    CellSpec::Text("Conservative Leadership 2022".to_string()),
                    CellSpec::Number("8000".parse().unwrap()),
                ],
            },
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "federal_candidate_1",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Pierre Tremblay", "5200"),
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "federal_candidate_2",
            "donations_2022",
            &["donor_full_name", "amount"],
            1,
            set("Anita Desai", "5300"),
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "quebec_excesses",
            "donations_2022",
            &["amount"],
            11,
            InjectKind::SetCells {
                values: vec![CellSpec::number(2_500)],
            },
            Some("region == \"Quebec\" and year == 2022"),
        ),
        inject(
            "federal_boundary_amount",
            "donations_2022",
            &["amount"],
            1,
            InjectKind::SetCells {
                values: vec![CellSpec::number(1_675)],
            },
            Some("region == \"Federal\" and year == 2022"),
        ),
        inject(
            "nunavut_no_benchmark",
            "donations_2022",
            &["region"],
            1,
            InjectKind::SetCells {
                values: vec![CellSpec::Text("Nunavut".to_string())],
            },
            Some("year == 2022"),
        ),
    ];

    let suite = SuiteDoc {
        name: "legal-limit-findings".to_string(),
        table: "donations_2022".to_string(),
        expectations: vec![
            ExpectationDoc::new("donations_2022_amount_not_null", "not_null").columns(&["amount"]),
            ExpectationDoc::new("donations_2022_within_legal_limit", "benchmark_upper_bound")
                .param("amount_column", json!("amount"))
                .param("region_column", json!("region"))
                .param("year_column", json!("year"))
                .param("donor_class", json!("individual"))
                .param(
                    "exemptions",
                    json!([
                        "contains(donor_full_name, \"Estate of\")",
                        "contains(donor_full_name, \"Contributions of\")",
                        "contains(donor_full_name, \"Contributions Of\")",
                        "contains(donor_full_name, \"Total Anonymous Contributions\")",
                        "contains(political_entity, \"Leadership\")",
                    ]),
                )
                .where_clause("year == 2022"),
            ExpectationDoc::new("donations_2022_region_canonical", "in_set")
                .columns(&["region"])
                .param("allowed", regions_value()),
        ],
    };

    ScenarioConfig {
        name: "legal-limit-findings".to_string(),
        seed: 29,
        tables: vec![table],
        injections,
        suites: vec![suite],
        windows: Vec::new(),
        benchmark,
        brackets: Vec::new(),
    }
}

/// All shipped scenarios.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    vec![
        donations_findings(),
        registrations_findings(),
        funding_findings(),
        communications_findings(),
        revolving_door_findings(),
        charities_findings(),
        legal_limit_findings(),
    ]
}

/// Look up a shipped scenario by name.
pub fn find_scenario(name: &str) -> Option<ScenarioConfig> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Names of all shipped scenarios.
pub fn scenario_names() -> Vec<String> {
    builtin_scenarios().into_iter().map(|s| s.name).collect()
}
