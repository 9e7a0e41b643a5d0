//! The manifest written next to generated corpora.
//!
//! It carries everything a later `validate` run needs (table schemas,
//! registry file names, suite file names) plus the expected per-expectation
//! counts computed by the reference interpreter at generation time.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use veritas_core::engine::serialize_rate6;
use veritas_core::table::ColumnMeta;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    pub engine_version: String,
    pub tables: Vec<ManifestTable>,
    pub registries: ManifestRegistries,
    pub suites: Vec<ManifestSuite>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestTable {
    pub name: String,
    pub file: String,
    pub rows: u64,
    pub columns: Vec<ColumnMeta>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<DerivedColumn>,
}

/// A column computed after load rather than stored in the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivedColumn {
    pub op: String,
    pub total: String,
    pub parts: Vec<String>,
    pub name: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ManifestRegistries {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmarks: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brackets: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestSuite {
    pub name: String,
    pub file: String,
    pub table: String,
    pub expected: Vec<ExpectedResult>,
}

/// What one expectation must report when the generated corpus is validated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectedResult {
    pub id: String,
    pub kind: String,
    pub status: String,
    pub evaluated: u64,
    pub passed: u64,
    pub failed: u64,
    #[serde(serialize_with = "serialize_rate6")]
    pub success_rate: f64,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

impl Manifest {
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }

    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: display.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ManifestError::Json {
            path: display,
            source,
        })
    }
}
