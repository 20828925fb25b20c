//! Verification report records.
//!
//! Every check the verification suites run — an oracle-versus-engine
//! comparison, a formula reproduction, a structural property — emits one
//! [`VerifyRecord`], serializable as a single JSON line. Checks where both
//! sides are zero still run but carry the `vacuous` flag, so a suite that
//! "passes" on an empty family is visibly hollow.

use serde::Serialize;

/// One verification outcome, JSON-serializable with stable field names.
#[derive(Debug, Clone, Serialize, Default)]
pub struct VerifyRecord {
    /// Name of the check this record belongs to.
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    /// Field size, for checks pinned to one field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine_value: Option<String>,
    /// Did the check pass?
    #[serde(rename = "match")]
    pub matched: bool,
    /// True when the comparison was trivially `0 = 0` (empty family or an
    /// identically vanishing moment), so agreement carries no information.
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves_enumerated: Option<u64>,
    pub elapsed_ms: u128,
    /// Free-form context, set on failures and structural checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerifyRecord {
    pub fn new(check: impl Into<String>) -> VerifyRecord {
        VerifyRecord {
            check: check.into(),
            ..VerifyRecord::default()
        }
    }

    /// Serializes as one JSON line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}

/// Counts of passed / failed / vacuous records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub vacuous: usize,
}

pub fn summarize(records: &[VerifyRecord]) -> ReportSummary {
    ReportSummary {
        total: records.len(),
        passed: records.iter().filter(|r| r.matched).count(),
        failed: records.iter().filter(|r| !r.matched).count(),
        vacuous: records.iter().filter(|r| r.vacuous).count(),
    }
}
