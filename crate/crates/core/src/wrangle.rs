//! Pre-validation transforms and text-hygiene detectors.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cell::Cell;
use crate::decimal::Decimal;
use crate::engine::{CheckOutcome, ExpectationResult};
use crate::table::{ColumnMeta, DeclaredType, RowId, Table};

#[derive(Debug, Error)]
pub enum WrangleError {
    #[error("unknown column: {0}")]
    UnknownColumn(String),
    #[error("column name already in use: {0}")]
    NameCollision(String),
    #[error("column {column:?} is not numeric")]
    NonNumeric { column: String },
    #[error("column {column:?} at row {row_id}: expected a number, found {found}")]
    CellType {
        column: String,
        row_id: RowId,
        found: &'static str,
    },
}

fn numeric_col(table: &Table, name: &str) -> Result<usize, WrangleError> {
    let idx = table
        .column_index(name)
        .ok_or_else(|| WrangleError::UnknownColumn(name.to_string()))?;
    match table.columns()[idx].declared_type {
        DeclaredType::Currency | DeclaredType::Number => Ok(idx),
        _ => Err(WrangleError::NonNumeric {
            column: name.to_string(),
        }),
    }
}

fn number_or_null(table: &Table, row: usize, idx: usize) -> Result<Option<Decimal>, WrangleError> {
    match table.cell(row, idx) {
        Cell::Null => Ok(None),
        Cell::Number(n) => Ok(Some(*n)),
        other => Err(WrangleError::CellType {
            column: table.columns()[idx].name.clone(),
            row_id: table.row_id(row),
            found: other.kind(),
        }),
    }
}

/// Append a column holding |total − Σ parts| per row, null parts summing as
/// zero. The new cell is null when the total is null or every part is null.
pub fn derive_abs_diff_column(
    table: &Table,
    total_column: &str,
    part_columns: &[String],
    new_column_name: &str,
) -> Result<Table, WrangleError> {
    if table.column_index(new_column_name).is_some() {
        return Err(WrangleError::NameCollision(new_column_name.to_string()));
    }
    let total_idx = numeric_col(table, total_column)?;
    let part_idxs: Vec<usize> = part_columns
        .iter()
        .map(|c| numeric_col(table, c))
        .collect::<Result<_, _>>()?;

    let mut cells = Vec::with_capacity(table.row_count());
    for row in 0..table.row_count() {
        let total = number_or_null(table, row, total_idx)?;
        let mut any_part = false;
        let mut sum: i128 = 0;
        for idx in &part_idxs {
            if let Some(n) = number_or_null(table, row, *idx)? {
                any_part = true;
                sum += n.raw() as i128;
            }
        }
        let cell = match total {
            Some(total) if any_part => {
                let diff = (total.raw() as i128 - sum).abs();
                Cell::Number(Decimal::from_raw(
                    i64::try_from(diff).expect("difference fits 64 bits"),
                ))
            }
            _ => Cell::Null,
        };
        cells.push(cell);
    }
    table
        .with_column(
            ColumnMeta::new(new_column_name, DeclaredType::Number),
            cells,
        )
        .map_err(|_| WrangleError::NameCollision(new_column_name.to_string()))
}

// ---------------------------------------------------------------------------
// Inverted names
// ---------------------------------------------------------------------------

/// Corporate suffixes that make a trailing comma segment legitimate.
#[derive(Clone, Debug)]
pub struct InvertedNameConfig {
    pub suffix_stoplist: Vec<String>,
}

impl Default for InvertedNameConfig {
    fn default() -> InvertedNameConfig {
        InvertedNameConfig {
            suffix_stoplist: [
                "Inc",
                "Ltd",
                "LLC",
                "LLP",
                "Corp",
                "Co",
                "Society",
                "Association",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        }
    }
}

fn wordish(segment: &str) -> bool {
    !segment.is_empty()
        && segment.split_whitespace().next().is_some()
        && segment
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, ' ' | '.' | '\'' | '-'))
}

fn normalize_suffix(segment: &str) -> String {
    segment.trim().trim_end_matches('.').to_lowercase()
}

/// Flag text cells written as "surname, firstname". A cell fails when it has
/// exactly one comma, both sides are plain word tokens, and the text after
/// the comma is not a corporate suffix. Diagnostics carry the suggested
/// "firstname surname" rewrite for the first flagged rows. Cells without a
/// comma are never flagged.
pub fn detect_inverted_names(
    table: &Table,
    name_column: &str,
    config: &InvertedNameConfig,
    sample_cap: usize,
) -> Result<ExpectationResult, WrangleError> {
    let idx = table
        .column_index(name_column)
        .ok_or_else(|| WrangleError::UnknownColumn(name_column.to_string()))?;
    let stoplist: Vec<String> = config
        .suffix_stoplist
        .iter()
        .map(|s| normalize_suffix(s))
        .collect();

    let mut outcome = CheckOutcome::default();
    let mut suggestions: BTreeMap<String, String> = BTreeMap::new();
    for row in 0..table.row_count() {
        let text = match table.cell(row, idx) {
            Cell::Text(s) => s,
            _ => continue,
        };
        let inverted = match text.split_once(',') {
            Some((last, first)) if text.matches(',').count() == 1 => {
                let last = last.trim();
                let first = first.trim();
                if wordish(last) && wordish(first) && !stoplist.contains(&normalize_suffix(first)) {
                    Some(format!("{first} {last}"))
                } else {
                    None
                }
            }
            _ => None,
        };
        outcome.evaluated += 1;
        match inverted {
            Some(suggestion) => {
                outcome.failed += 1;
                if outcome.failing_samples.len() < sample_cap {
                    outcome.failing_samples.push(table.row_id(row));
                    suggestions.insert(table.row_id(row).to_string(), suggestion);
                }
            }
            None => outcome.passed += 1,
        }
    }
    outcome
        .diagnostics
        .insert("suggestions".to_string(), serde_json::json!(suggestions));
    Ok(ExpectationResult::from_outcome(
        &format!("inverted_names({name_column})"),
        "inverted_names",
        outcome,
    ))
}

// ---------------------------------------------------------------------------
// Near-duplicate groups
// ---------------------------------------------------------------------------

/// Rows that normalize to the same key over the selected columns.
/// `exact` marks groups whose members are raw-byte identical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DuplicateGroup {
    #[serde(rename = "key")]
    pub normalized_key: String,
    #[serde(rename = "rows")]
    pub member_row_ids: Vec<RowId>,
    pub exact: bool,
}

impl DuplicateGroup {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("group serializes")
    }
}

/// Normalization for near-duplicate keys: casefold, trim, collapse internal
/// whitespace runs, and strip "$" and ",". Idempotent.
pub fn normalize_for_dedup(text: &str) -> String {
    let lowered = text.to_lowercase();
    let stripped: String = lowered.chars().filter(|c| *c != '$' && *c != ',').collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Group rows whose selected columns normalize to the same key but are not
/// all pairwise distinct in raw form. Exact raw duplicates form groups too,
/// flagged with `exact`.
pub fn near_duplicate_groups(
    table: &Table,
    columns: &[String],
) -> Result<Vec<DuplicateGroup>, WrangleError> {
    let idxs: Vec<usize> = columns
        .iter()
        .map(|c| {
            table
                .column_index(c)
                .ok_or_else(|| WrangleError::UnknownColumn(c.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut by_key: BTreeMap<String, Vec<(RowId, String)>> = BTreeMap::new();
    for row in 0..table.row_count() {
        let mut key_parts = Vec::with_capacity(idxs.len());
        let mut raw_parts = Vec::with_capacity(idxs.len());
        for idx in &idxs {
            let rendered = table.cell(row, *idx).render();
            key_parts.push(normalize_for_dedup(&rendered));
            raw_parts.push(rendered);
        }
        by_key
            .entry(key_parts.join("\u{1f}"))
            .or_default()
            .push((table.row_id(row), raw_parts.join("\u{1f}")));
    }

    let mut out = Vec::new();
    for (key, members) in by_key {
        if members.len() < 2 {
            continue;
        }
        let exact = members.iter().all(|(_, raw)| *raw == members[0].1);
        out.push(DuplicateGroup {
            normalized_key: key,
            member_row_ids: members.into_iter().map(|(id, _)| id).collect(),
            exact,
        });
    }
    out.sort_by_key(|g| g.member_row_ids[0]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_of(names: &[&str], rows: Vec<Vec<Cell>>) -> Table {
        let metas: Vec<ColumnMeta> = names
            .iter()
            .map(|n| ColumnMeta::new(*n, DeclaredType::Text))
            .collect();
        let mut t = Table::new("t", metas).unwrap();
        for row in rows {
            t.push_row(row).unwrap();
        }
        t
    }

    fn numeric_table(rows: Vec<(Cell, Cell, Cell)>) -> Table {
        let mut t = Table::new(
            "t",
            vec![
                ColumnMeta::new("total", DeclaredType::Currency),
                ColumnMeta::new("a", DeclaredType::Currency),
                ColumnMeta::new("b", DeclaredType::Currency),
            ],
        )
        .unwrap();
        for (x, y, z) in rows {
            t.push_row(vec![x, y, z]).unwrap();
        }
        t
    }

    #[test]
    fn abs_diff_handles_nulls() {
        let t = numeric_table(vec![
            (Cell::number(100), Cell::number(60), Cell::number(40)),
            (Cell::number(100), Cell::Null, Cell::number(90)),
            (Cell::Null, Cell::number(60), Cell::number(40)),
            (Cell::number(100), Cell::Null, Cell::Null),
        ]);
        let out = derive_abs_diff_column(&t, "total", &["a".into(), "b".into()], "diff").unwrap();
        let idx = out.column_index("diff").unwrap();
        assert_eq!(*out.cell(0, idx), Cell::number(0));
        assert_eq!(*out.cell(1, idx), Cell::number(10));
        assert_eq!(*out.cell(2, idx), Cell::Null);
        assert_eq!(*out.cell(3, idx), Cell::Null);
    }

    #[test]
    fn abs_diff_rejects_collisions_and_text_columns() {
        let t = numeric_table(vec![]);
        assert!(matches!(
            derive_abs_diff_column(&t, "total", &["a".into()], "b"),
            Err(WrangleError::NameCollision(_))
        ));
        let t2 = table_of(&["total"], vec![]);
        assert!(matches!(
            derive_abs_diff_column(&t2, "total", &["total".into()], "d"),
            Err(WrangleError::NonNumeric { .. })
        ));
    }

    #[test]
    fn inverted_names_flags_and_suggests() {
        let t = table_of(
            &["name"],
            vec![
                vec![Cell::text("Smith, John")],
                vec![Cell::text("John Smith")],
                vec![Cell::text("Lululemon Athletica, Inc.")],
                vec![Cell::Null],
                vec![Cell::text("Doe, Jane Marie")],
            ],
        );
        let result = detect_inverted_names(&t, "name", &InvertedNameConfig::default(), 25).unwrap();
        assert_eq!(result.evaluated, 4);
        assert_eq!(result.failed, 2);
        assert_eq!(result.failing_samples, vec![0, 4]);
        let suggestions = result.diagnostics.get("suggestions").unwrap();
        assert_eq!(suggestions["0"], "John Smith");
        assert_eq!(suggestions["4"], "Jane Marie Doe");
    }

    #[test]
    fn inverted_names_never_flags_without_comma() {
        let t = table_of(
            &["name"],
            vec![
                vec![Cell::text("plainname")],
                vec![Cell::text("two words")],
                vec![Cell::text("a, b, c")],
            ],
        );
        let result = detect_inverted_names(&t, "name", &InvertedNameConfig::default(), 25).unwrap();
        assert_eq!(result.failed, 0);
    }

    #[test]
    fn near_duplicates_group_on_normalized_key() {
        let t = table_of(
            &["name"],
            vec![
                vec![Cell::text("John  Smith")],
                vec![Cell::text("John Smith")],
                vec![Cell::text("JOHN SMITH")],
                vec![Cell::text("John Smyth")],
                vec![Cell::text("$1,675")],
                vec![Cell::text("1675")],
            ],
        );
        let groups = near_duplicate_groups(&t, &["name".into()]).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].member_row_ids, vec![0, 1, 2]);
        assert!(!groups[0].exact);
        assert_eq!(groups[1].member_row_ids, vec![4, 5]);
        let line = groups[1].to_json_line();
        assert!(line.contains("\"rows\":[4,5]"));
    }

    #[test]
    fn exact_duplicates_are_flagged_separately() {
        let t = table_of(
            &["name"],
            vec![vec![Cell::text("Acme Corp")], vec![Cell::text("Acme Corp")]],
        );
        let groups = near_duplicate_groups(&t, &["name".into()]).unwrap();
        assert_eq!(groups.len(), 1);
        assert!(groups[0].exact);
    }

    #[test]
    fn normalization_is_idempotent() {
        for s in ["  John   Smith ", "$1,6 75", "MIXED case\tText"] {
            let once = normalize_for_dedup(s);
            assert_eq!(normalize_for_dedup(&once), once);
        }
    }
}
