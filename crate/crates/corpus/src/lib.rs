//! Deterministic synthetic corpora for the validation engine.
//!
//! Scenarios describe tables, per-column generators, and exact violation
//! counts to inject; generation is seeded and reproducible byte for byte.
//! Each scenario ships alongside its expectation suites and registry data,
//! and its manifest freezes the expected per-expectation counts computed by
//! a naive reference interpreter that shares no evaluation code with the
//! engine.

pub mod builtin;
pub mod manifest;
pub mod reference;
pub mod scenario;

pub use builtin::{builtin_scenarios, find_scenario, scenario_names};
pub use manifest::{ExpectedResult, Manifest};
pub use scenario::{build_tables, generate_scenario, GenerateError, ScenarioConfig};
