//! Versioned on-disk cache for engine results.
//!
//! Two kinds of artifacts persist across runs: the genus-one moment table
//! (the only expensive thing the engine ever computes) and the memo of tuple
//! sums. Both are stored as line-delimited JSON records
//!
//! ```text
//! {"engine_version":"…","key":{"expr"|"tuple":…,"g":…,"parity":…},"provenance":…,"value":"…"}
//! ```
//!
//! with keys serialized in sorted order and lines sorted lexicographically,
//! so cache files diff cleanly. Values are canonical `q`-expression strings
//! that re-parse exactly. A record whose `engine_version` differs from
//! [`ENGINE_VERSION`] invalidates its whole file: version bumps discard
//! caches wholesale rather than mixing generations.

use crate::engine::{GenusOneTable, TableProvenance};
use crate::symq::{parse_qpoly, parse_qrat, QRat};
use crate::tuples::{AExpr, UTuple};
use crate::{EnumBudget, Error, Parity, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Version string stamped into every cache record. Bump on any change to
/// the recursion, decomposition, or enumeration semantics.
pub const ENGINE_VERSION: &str = "1";

const TABLE_FILE: &str = "genus1_table.jsonl";

fn memo_file(parity: Parity) -> String {
    format!("memo_{}.jsonl", parity.as_str())
}

/// Field order is alphabetical so serialization emits sorted keys.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    engine_version: String,
    key: Key,
    provenance: serde_json::Value,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Key {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expr: Option<String>,
    g: i64,
    parity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tuple: Option<String>,
}

fn write_sorted_lines(path: &Path, mut lines: Vec<String>) -> Result<()> {
    lines.sort();
    let mut body = lines.join("\n");
    body.push('\n');
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, body)?;
    Ok(())
}

fn read_records(path: &Path) -> Result<Option<Vec<Record>>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| {
            Error::Cache(format!("{}:{}: malformed record: {}", path.display(), i + 1, e))
        })?;
        records.push(rec);
    }
    Ok(Some(records))
}

/// Writes the genus-one table to `dir`, one record per moment monomial.
pub fn save_genus1_table(dir: &Path, table: &GenusOneTable) -> Result<()> {
    let provenance = serde_json::to_value(table.provenance())
        .map_err(|e| Error::Cache(format!("provenance serialization: {}", e)))?;
    let mut lines = Vec::new();
    for (expr, poly) in table.entries() {
        let rec = Record {
            engine_version: ENGINE_VERSION.to_string(),
            key: Key {
                expr: Some(expr.to_string()),
                g: 1,
                parity: "both".to_string(),
                tuple: None,
            },
            provenance: provenance.clone(),
            value: poly.to_string(),
        };
        lines.push(
            serde_json::to_string(&rec)
                .map_err(|e| Error::Cache(format!("record serialization: {}", e)))?,
        );
    }
    write_sorted_lines(&dir.join(TABLE_FILE), lines)
}

/// Loads the genus-one table from `dir`.
///
/// Returns `Ok(None)` when there is nothing usable: no file, a stale
/// engine version, or a table missing required entries (callers rebuild).
/// Structurally corrupt files are an error so silent data loss is visible.
pub fn load_genus1_table(dir: &Path) -> Result<Option<GenusOneTable>> {
    let path = dir.join(TABLE_FILE);
    let records = match read_records(&path)? {
        None => return Ok(None),
        Some(r) => r,
    };
    if records.is_empty() || records.iter().any(|r| r.engine_version != ENGINE_VERSION) {
        return Ok(None);
    }
    let mut entries = BTreeMap::new();
    let mut provenance: Option<TableProvenance> = None;
    for rec in &records {
        let expr_text = rec.key.expr.as_deref().ok_or_else(|| {
            Error::Cache(format!("{}: table record without expr key", path.display()))
        })?;
        let expr = AExpr::parse(expr_text)?;
        let poly = parse_qpoly(&rec.value)?;
        entries.insert(expr, poly);
        if provenance.is_none() {
            provenance = serde_json::from_value(rec.provenance.clone()).ok();
        }
    }
    let required = GenusOneTable::required_exprs();
    if !required.iter().all(|e| entries.contains_key(e)) {
        return Ok(None);
    }
    Ok(Some(GenusOneTable::from_parts(
        entries,
        provenance.unwrap_or_else(TableProvenance::synthetic),
    )))
}

/// Loads the table from `dir` if present and current, otherwise builds it
/// (and saves back when a directory is given).
pub fn load_or_build_genus1_table(
    dir: Option<&Path>,
    budget: &EnumBudget,
) -> Result<GenusOneTable> {
    if let Some(dir) = dir {
        if let Some(table) = load_genus1_table(dir)? {
            return Ok(table);
        }
    }
    let table = GenusOneTable::build(budget)?;
    if let Some(dir) = dir {
        save_genus1_table(dir, &table)?;
    }
    Ok(table)
}

/// Writes a memo dump for one parity. The whole file is replaced: the memo
/// is a single-writer store and the dump is its canonical state.
pub fn save_memo(dir: &Path, parity: Parity, entries: &[(i64, UTuple, QRat)]) -> Result<()> {
    let mut lines = Vec::new();
    for (g, tuple, value) in entries {
        let rec = Record {
            engine_version: ENGINE_VERSION.to_string(),
            key: Key {
                expr: None,
                g: *g,
                parity: parity.as_str().to_string(),
                tuple: Some(tuple.to_string()),
            },
            provenance: serde_json::json!({"source": "engine recursion"}),
            value: value.to_string(),
        };
        lines.push(
            serde_json::to_string(&rec)
                .map_err(|e| Error::Cache(format!("record serialization: {}", e)))?,
        );
    }
    write_sorted_lines(&dir.join(memo_file(parity)), lines)
}

/// Loads the memo dump for one parity; empty when missing or stale.
pub fn load_memo(dir: &Path, parity: Parity) -> Result<Vec<(i64, UTuple, QRat)>> {
    let path = dir.join(memo_file(parity));
    let records = match read_records(&path)? {
        None => return Ok(Vec::new()),
        Some(r) => r,
    };
    if records.iter().any(|r| r.engine_version != ENGINE_VERSION) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for rec in &records {
        if rec.key.parity != parity.as_str() {
            return Err(Error::Cache(format!(
                "{}: record for parity {:?} in {} file",
                path.display(),
                rec.key.parity,
                parity
            )));
        }
        let tuple_text = rec.key.tuple.as_deref().ok_or_else(|| {
            Error::Cache(format!("{}: memo record without tuple key", path.display()))
        })?;
        let tuple = UTuple::parse(tuple_text)?;
        let value = parse_qrat(&rec.value)?;
        out.push((rec.key.g, tuple, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symq::QPoly;

    fn sample_table() -> GenusOneTable {
        let mut entries = BTreeMap::new();
        for expr in GenusOneTable::required_exprs() {
            // Any distinct polynomial per entry will do for round-trip tests.
            let w = expr.weight() as i64;
            entries.insert(expr, QPoly::from_int_coeffs(&[w, 1 - (w % 2) * 2]));
        }
        GenusOneTable::from_parts(
            entries,
            TableProvenance {
                fields: vec![3, 5, 7],
                degree_bound: 10,
                validation_points: 3,
            },
        )
    }

    #[test]
    fn table_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let table = sample_table();
        save_genus1_table(dir.path(), &table).unwrap();
        let loaded = load_genus1_table(dir.path()).unwrap().unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn table_file_is_sorted_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        save_genus1_table(dir.path(), &sample_table()).unwrap();
        let text = fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(lines, sorted);
        //

        // Writing again produces the identical file.
        let first = text.clone();
        save_genus1_table(dir.path(), &sample_table()).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap(), first);
    }

    #[test]
    fn missing_table_loads_as_none() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_genus1_table(dir.path()).unwrap().is_none());
    }

    #[test]
    fn version_bump_invalidates_wholesale() {
        let dir = tempfile::tempdir().unwrap();
        save_genus1_table(dir.path(), &sample_table()).unwrap();
        let path = dir.path().join(TABLE_FILE);
        let stale = fs::read_to_string(&path)
            .unwrap()
            .replace(
                &format!("\"engine_version\":\"{}\"", ENGINE_VERSION),
                "\"engine_version\":\"0-obsolete\"",
            );
        fs::write(&path, stale).unwrap();
        assert!(load_genus1_table(dir.path()).unwrap().is_none());
    }

    #[test]
    fn incomplete_table_loads_as_none() {
        let dir = tempfile::tempdir().unwrap();
        save_genus1_table(dir.path(), &sample_table()).unwrap();
        let path = dir.path().join(TABLE_FILE);
        let text = fs::read_to_string(&path).unwrap();
        let truncated: Vec<&str> = text.lines().take(5).collect();
        fs::write(&path, truncated.join("\n")).unwrap();
        assert!(load_genus1_table(dir.path()).unwrap().is_none());
    }

    #[test]
    fn corrupt_table_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(TABLE_FILE);
        fs::write(&path, "{\"this is\": \"not a record\"}\n").unwrap();
        assert!(matches!(load_genus1_table(dir.path()), Err(Error::Cache(_))));
    }

    #[test]
    fn memo_round_trips_including_rationals() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![
            (
                -1,
                UTuple::parse("(1^2)").unwrap(),
                QRat::new(QPoly::one(), QPoly::from_int_coeffs(&[0, -1, 1])),
            ),
            (3, UTuple::parse("(2^1,1^1,1^1)").unwrap(), QRat::from_int(7)),
            (
                0,
                UTuple::parse("(6^1)").unwrap(),
                QRat::from_poly(QPoly::from_int_coeffs(&[0, 0, -1])),
            ),
        ];
        save_memo(dir.path(), Parity::Odd, &entries).unwrap();
        let mut loaded = load_memo(dir.path(), Parity::Odd).unwrap();
        loaded.sort_by_key(|(g, t, _)| (*g, t.clone()));
        let mut expected = entries.clone();
        expected.sort_by_key(|(g, t, _)| (*g, t.clone()));
        assert_eq!(loaded, expected);
        // The other parity's file is untouched.
        assert!(load_memo(dir.path(), Parity::Even).unwrap().is_empty());
    }

    #[test]
    fn load_or_build_prefers_cache() {
        let dir = tempfile::tempdir().unwrap();
        let table = sample_table();
        save_genus1_table(dir.path(), &table).unwrap();
        // The fake cached entries load instantly; a real build would not
        // produce these synthetic polynomials.
        let got = load_or_build_genus1_table(Some(dir.path()), &EnumBudget::default()).unwrap();
        assert_eq!(got, table);
    }
}
