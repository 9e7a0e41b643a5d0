//! Null-aware typed cells.

use chrono::NaiveDate;

use crate::decimal::Decimal;

/// One table cell. `Null` is distinct from empty text, and a number that
/// coerced to zero is not `Null`.
///
/// The derived ordering (`Null < Text < Number < Date`, then by value) is the
/// canonical order used wherever cells act as sort or sample keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Null,
    Text(String),
    Number(Decimal),
    Date(NaiveDate),
}

impl Cell {
    pub fn is_null(&self) -> bool {
        matches!(self, Cell::Null)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<Decimal> {
        match self {
            Cell::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            Cell::Date(d) => Some(*d),
            _ => None,
        }
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn number(n: i64) -> Cell {
        Cell::Number(Decimal::from_int(n))
    }

    /// Canonical text rendering: empty for `Null`, ISO dates, numbers
    /// without separators. Loading a canonical rendering under the same
    /// declared type yields the original cell.
    pub fn render(&self) -> String {
        match self {
            Cell::Null => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Number(n) => n.to_string(),
            Cell::Date(d) => d.format("%Y-%m-%d").to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Cell::Null => "null",
            Cell::Text(_) => "text",
            Cell::Number(_) => "number",
            Cell::Date(_) => "date",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_is_not_empty_text_or_zero() {
        assert_ne!(Cell::Null, Cell::text(""));
        assert_ne!(Cell::Null, Cell::number(0));
    }

    #[test]
    fn render_is_canonical() {
        assert_eq!(Cell::Null.render(), "");
        assert_eq!(Cell::number(1675).render(), "1675");
        let d = NaiveDate::from_ymd_opt(2014, 3, 7).unwrap();
        assert_eq!(Cell::Date(d).render(), "2014-03-07");
    }
}
