//! Declarative data validation over columnar CSV tables.
//!
//! The crate is organized around a small set of pieces:
//!
//! - [`table`]: loads CSV files into an immutable columnar [`Table`] with
//!   null-aware typed cells, applying declared coercions (currency, date)
//!   and collecting per-cell diagnostics instead of failing the load.
//! - [`condition`]: the row-condition predicate language used to scope an
//!   expectation to a subset of rows.
//! - [`model`]: expectation suites, schema windows, benchmark tables, and
//!   salary-bracket schemas, with load-time validation.
//! - [`engine`]: one check per expectation kind plus the suite driver that
//!   produces a [`engine::ValidationReport`].
//! - [`wrangle`]: pre-validation transforms and text-hygiene detectors
//!   (derived difference columns, inverted names, near-duplicate groups).

pub mod cell;
pub mod condition;
pub mod decimal;
pub mod engine;
pub mod model;
pub mod rng;
pub mod table;
pub mod wrangle;

pub use cell::Cell;
pub use decimal::Decimal;
pub use table::{ColumnMeta, DeclaredType, LoadOutcome, RowId, Table};
