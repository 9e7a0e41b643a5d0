//! Row-condition predicate language.
//!
//! Conditions scope an expectation to the rows it should evaluate. The
//! grammar covers column comparisons against string and number literals,
//! `year(column)` extraction from date columns, substring `contains`, set
//! membership with `in [..]`, `is null`, and `and`/`or`/`not` with
//! parentheses. Evaluation collapses three-valued logic: any comparison,
//! `contains`, or `in` involving a `Null` cell is false, and `is null` is the
//! only predicate that sees nulls as a match.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cell::Cell;
use crate::decimal::Decimal;
use crate::table::{RowId, Table};

pub use parser::{parse_condition, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    fn apply<T: PartialOrd>(self, left: &T, right: &T) -> bool {
        match self {
            CompareOp::Eq => left == right,
            CompareOp::Ne => left != right,
            CompareOp::Lt => left < right,
            CompareOp::Le => left <= right,
            CompareOp::Gt => left > right,
            CompareOp::Ge => left >= right,
        }
    }
}

/// Left-hand side of a comparison: a column, or the year of a date column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Column(String),
    YearOf(String),
}

impl Term {
    fn column(&self) -> &str {
        match self {
            Term::Column(c) | Term::YearOf(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Text(String),
    Number(Decimal),
}

impl Literal {
    fn kind(&self) -> &'static str {
        match self {
            Literal::Text(_) => "text",
            Literal::Number(_) => "number",
        }
    }
}

/// Predicate AST evaluated per row.
#[derive(Clone, Debug, PartialEq)]
pub enum ConditionExpr {
    Compare {
        term: Term,
        op: CompareOp,
        literal: Literal,
    },
    Contains {
        column: String,
        needle: String,
    },
    InSet {
        column: String,
        values: Vec<Literal>,
    },
    IsNull {
        column: String,
    },
    And(Vec<ConditionExpr>),
    Or(Vec<ConditionExpr>),
    Not(Box<ConditionExpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown column in condition: {column}")]
    UnknownColumn { column: String },
    #[error("type mismatch in condition on column {column} at row {row_id}: {detail}")]
    TypeMismatch {
        column: String,
        row_id: RowId,
        detail: String,
    },
}

impl ConditionExpr {
    /// Every column name referenced anywhere in the expression.
    pub fn referenced_columns(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns(&self, out: &mut BTreeSet<String>) {
        match self {
            ConditionExpr::Compare { term, .. } => {
                out.insert(term.column().to_string());
            }
            ConditionExpr::Contains { column, .. }
            | ConditionExpr::InSet { column, .. }
            | ConditionExpr::IsNull { column } => {
                out.insert(column.clone());
            }
            ConditionExpr::And(items) | ConditionExpr::Or(items) => {
                for item in items {
                    item.collect_columns(out);
                }
            }
            ConditionExpr::Not(inner) => inner.collect_columns(out),
        }
    }
}

fn column_index(table: &Table, column: &str) -> Result<usize, EvalError> {
    table
        .column_index(column)
        .ok_or_else(|| EvalError::UnknownColumn {
            column: column.to_string(),
        })
}

fn compare_cell(
    cell: &Cell,
    op: CompareOp,
    literal: &Literal,
    column: &str,
    row_id: RowId,
) -> Result<bool, EvalError> {
    match (cell, literal) {
        (Cell::Null, _) => Ok(false),
        (Cell::Text(s), Literal::Text(t)) => Ok(op.apply(&s.as_str(), &t.as_str())),
        (Cell::Number(n), Literal::Number(m)) => Ok(op.apply(n, m)),
        (cell, literal) => Err(EvalError::TypeMismatch {
            column: column.to_string(),
            row_id,
            detail: format!(
                "cannot compare a {} cell with a {} literal",
                cell.kind(),
                literal.kind()
            ),
        }),
    }
}

/// Evaluate a condition on one row. Pure: the same (expression, table, row)
/// always yields the same result.
pub fn eval_condition(expr: &ConditionExpr, table: &Table, row: usize) -> Result<bool, EvalError> {
    match expr {
        ConditionExpr::Compare { term, op, literal } => {
            let col = column_index(table, term.column())?;
            let cell = table.cell(row, col);
            match term {
                Term::Column(name) => compare_cell(cell, *op, literal, name, table.row_id(row)),
                Term::YearOf(name) => match cell {
                    Cell::Null => Ok(false),
                    Cell::Date(d) => {
                        use chrono::Datelike;
                        let year = Decimal::from_int(d.year() as i64);
                        match literal {
                            Literal::Number(m) => Ok(op.apply(&year, m)),
                            Literal::Text(_) => Err(EvalError::TypeMismatch {
                                column: name.clone(),
                                row_id: table.row_id(row),
                                detail: "year() compares against numbers".to_string(),
                            }),
                        }
                    }
                    other => Err(EvalError::TypeMismatch {
                        column: name.clone(),
                        row_id: table.row_id(row),
                        detail: format!("year() requires a date column, found {}", other.kind()),
                    }),
                },
            }
        }
        ConditionExpr::Contains { column, needle } => {
            let col = column_index(table, column)?;
            match table.cell(row, col) {
                Cell::Null => Ok(false),
                Cell::Text(s) => Ok(s.contains(needle.as_str())),
                other => Err(EvalError::TypeMismatch {
                    column: column.clone(),
                    row_id: table.row_id(row),
                    detail: format!("contains() requires text, found {}", other.kind()),
                }),
            }
        }
        ConditionExpr::InSet { column, values } => {
            let col = column_index(table, column)?;
            let cell = table.cell(row, col);
            if cell.is_null() {
                return Ok(false);
            }
            for value in values {
                if compare_cell(cell, CompareOp::Eq, value, column, table.row_id(row))? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        ConditionExpr::IsNull { column } => {
            let col = column_index(table, column)?;
            Ok(table.cell(row, col).is_null())
        }
        ConditionExpr::And(items) => {
            for item in items {
                if !eval_condition(item, table, row)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ConditionExpr::Or(items) => {
            for item in items {
                if eval_condition(item, table, row)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        ConditionExpr::Not(inner) => Ok(!eval_condition(inner, table, row)?),
    }
}

// ---------------------------------------------------------------------------
// Pretty-printing (the inverse of parsing)
// ---------------------------------------------------------------------------

fn write_string_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            other => write!(f, "{other}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write_string_literal(f, s),
            Literal::Number(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for ConditionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionExpr::Compare { term, op, literal } => {
                match term {
                    Term::Column(c) => write!(f, "{c}")?,
                    Term::YearOf(c) => write!(f, "year({c})")?,
                }
                write!(f, " {} {literal}", op.symbol())
            }
            ConditionExpr::Contains { column, needle } => {
                write!(f, "contains({column}, ")?;
                write_string_literal(f, needle)?;
                f.write_str(")")
            }
            ConditionExpr::InSet { column, values } => {
                write!(f, "{column} in [")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            ConditionExpr::IsNull { column } => write!(f, "{column} is null"),
            ConditionExpr::And(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    // Nested and/or keep explicit grouping.
                    if matches!(item, ConditionExpr::And(_) | ConditionExpr::Or(_)) {
                        write!(f, "({item})")?;
                    } else {
                        write!(f, "{item}")?;
                    }
                }
                Ok(())
            }
            ConditionExpr::Or(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    if matches!(item, ConditionExpr::Or(_)) {
                        write!(f, "({item})")?;
                    } else {
                        write!(f, "{item}")?;
                    }
                }
                Ok(())
            }
            ConditionExpr::Not(inner) => write!(f, "not ({inner})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{ColumnMeta, DeclaredType};
    use chrono::NaiveDate;

    fn table_with(cells: Vec<(&str, DeclaredType, Cell)>) -> Table {
        let metas: Vec<ColumnMeta> = cells
            .iter()
            .map(|(n, t, _)| ColumnMeta::new(*n, *t))
            .collect();
        let mut t = Table::new("t", metas).unwrap();
        t.push_row(cells.into_iter().map(|(_, _, c)| c).collect())
            .unwrap();
        t
    }

    #[test]
    fn equality_on_text() {
        let t = table_with(vec![("region", DeclaredType::Text, Cell::text("Federal"))]);
        let expr = parse_condition("region == \"Federal\"").unwrap();
        assert!(eval_condition(&expr, &t, 0).unwrap());
        let expr = parse_condition("region == \"Ontario\"").unwrap();
        assert!(!eval_condition(&expr, &t, 0).unwrap());
    }

    #[test]
    fn null_collapses_to_false() {
        let t = table_with(vec![("donor_full_name", DeclaredType::Text, Cell::Null)]);
        let expr = parse_condition("contains(donor_full_name, \"Estate of\")").unwrap();
        assert!(!eval_condition(&expr, &t, 0).unwrap());
        let expr = parse_condition("donor_full_name == \"x\"").unwrap();
        assert!(!eval_condition(&expr, &t, 0).unwrap());
        let expr = parse_condition("donor_full_name is null").unwrap();
        assert!(eval_condition(&expr, &t, 0).unwrap());
    }

    #[test]
    fn year_extraction_compares_numerically() {
        let t = table_with(vec![(
            "date",
            DeclaredType::Date,
            Cell::Date(NaiveDate::from_ymd_opt(2001, 5, 1).unwrap()),
        )]);
        let expr = parse_condition("year(date) > 2000").unwrap();
        assert!(eval_condition(&expr, &t, 0).unwrap());
        let expr = parse_condition("year(date) > 2001").unwrap();
        assert!(!eval_condition(&expr, &t, 0).unwrap());
    }

    #[test]
    fn year_of_non_date_is_an_error() {
        let t = table_with(vec![("date", DeclaredType::Text, Cell::text("2001-05-01"))]);
        let expr = parse_condition("year(date) > 2000").unwrap();
        assert!(matches!(
            eval_condition(&expr, &t, 0),
            Err(EvalError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn type_mismatch_names_column_and_row() {
        let t = table_with(vec![("amount", DeclaredType::Text, Cell::text("abc"))]);
        let expr = parse_condition("amount > 5").unwrap();
        match eval_condition(&expr, &t, 0) {
            Err(EvalError::TypeMismatch { column, row_id, .. }) => {
                assert_eq!(column, "amount");
                assert_eq!(row_id, 0);
            }
            other => panic!("expected type mismatch, got {other:?}"),
        }
    }

    #[test]
    fn unknown_column_is_an_error() {
        let t = table_with(vec![("a", DeclaredType::Text, Cell::text("x"))]);
        let expr = parse_condition("b == \"x\"").unwrap();
        assert_eq!(
            eval_condition(&expr, &t, 0),
            Err(EvalError::UnknownColumn {
                column: "b".to_string()
            })
        );
    }

    #[test]
    fn referenced_columns_are_extractable() {
        let expr = parse_condition(
            "year(date) > 2000 and (region in [\"Federal\"] or not (amount is null))",
        )
        .unwrap();
        let cols: Vec<String> = expr.referenced_columns().into_iter().collect();
        assert_eq!(cols, vec!["amount", "date", "region"]);
    }
}
