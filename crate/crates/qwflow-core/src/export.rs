//! Deterministic data export: CSV time series with an exact byte-level
//! contract (fixed header, 17-significant-digit floats, LF endings, no
//! timestamps) and JSON documents with a fixed top-level summary schema.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// CSV header for exported time series.
pub const CSV_HEADER: &str = "t,nu_marked,nu_unmarked,norm_kn";

/// Version string stamped into JSON summaries.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Top-level JSON summary document. `params` echoes the fully resolved
/// configuration so a summary is reproducible on its own.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub method: String,
    pub tool_version: String,
}

impl Summary {
    pub fn new(command: &str, params: Value, results: Value, method: &str) -> Self {
        Summary {
            command: command.to_string(),
            params,
            results,
            method: method.to_string(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

/// Renders a series as CSV. Floats are printed with 17 significant digits
/// so parsing them back yields bit-identical values.
pub fn series_to_csv(series: &TimeSeries) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = String::with_capacity(series.len() * 80 + 40);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for record in &series.records {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            record.t, record.nu_marked, record.nu_unmarked, record.norm_kn
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// Column-array JSON mirror of the CSV schema.
pub fn series_to_json(series: &TimeSeries) -> Result<Value> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let records = &series.records;
    Ok(json!({
        "n_vertices": series.n_vertices,
        "t": records.iter().map(|r| r.t).collect::<Vec<_>>(),
        "nu_marked": records.iter().map(|r| r.nu_marked).collect::<Vec<_>>(),
        "nu_unmarked": records.iter().map(|r| r.nu_unmarked).collect::<Vec<_>>(),
        "norm_kn": records.iter().map(|r| r.norm_kn).collect::<Vec<_>>(),
    }))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes a series to `path` as CSV. The empty-series check runs before
/// the file is created, so a failing call leaves nothing behind.
pub fn save_series_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let text = series_to_csv(series)?;
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Writes any serializable document to `path` as pretty JSON with a
/// trailing newline.
pub fn save_json<T: Serialize>(doc: &T, path: &Path) -> Result<()> {
    let text = to_json_string(doc)?;
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Numeric(format!("JSON serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Parses CSV produced by [`series_to_csv`] back into a series. Reduced
/// coordinates are not part of the CSV schema and come back as zero.
pub fn parse_series_csv(text: &str, n_vertices: usize) -> Result<TimeSeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "bad CSV header: expected {CSV_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut series = TimeSeries::new(n_vertices);
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Config(format!(
                "CSV line {}: expected 4 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Config(format!("CSV line {}: {e}", lineno + 2)))
        };
        series.records.push(crate::series::StepRecord {
            t: fields[0]
                .parse()
                .map_err(|e| Error::Config(format!("CSV line {}: {e}", lineno + 2)))?,
            nu_marked: parse_f(fields[1])?,
            nu_unmarked: parse_f(fields[2])?,
            norm_kn: parse_f(fields[3])?,
            a: 0.0,
            b: 0.0,
            c: 0.0,
        });
    }
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::{evolve_reduced, Epsilon};
    use crate::series::StepRecord;

    fn tiny_series() -> TimeSeries {
        let mut s = TimeSeries::new(5);
        s.records.push(StepRecord {
            t: 0,
            nu_marked: 0.0,
            nu_unmarked: 0.0,
            norm_kn: 0.0,
            a: 0.0,
            b: 0.0,
            c: 0.0,
        });
        s.records.push(StepRecord {
            t: 1,
            nu_marked: 0.25,
            nu_unmarked: 0.1875,
            norm_kn: 1.5,
            a: 0.5,
            b: -0.5,
            c: 1.0,
        });
        s
    }

    #[test]
    fn csv_bytes_are_pinned() {
        let text = series_to_csv(&tiny_series()).unwrap();
        let expected = "t,nu_marked,nu_unmarked,norm_kn\n\
                        0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0\n\
                        1,2.5000000000000000e-1,1.8750000000000000e-1,1.5000000000000000e0\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn csv_is_deterministic_across_runs() {
        let eps = Epsilon::from_n(10).unwrap();
        let a = series_to_csv(&evolve_reduced(&eps, 20)).unwrap();
        let b = series_to_csv(&evolve_reduced(&eps, 20)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let eps = Epsilon::from_n(10).unwrap();
        let series = evolve_reduced(&eps, 30);
        let text = series_to_csv(&series).unwrap();
        let parsed = parse_series_csv(&text, 10).unwrap();
        assert_eq!(series_to_csv(&parsed).unwrap(), text);
        for (orig, back) in series.records.iter().zip(&parsed.records) {
            assert_eq!(orig.t, back.t);
            assert_eq!(orig.nu_marked, back.nu_marked);
            assert_eq!(orig.nu_unmarked, back.nu_unmarked);
            assert_eq!(orig.norm_kn, back.norm_kn);
        }
    }

    #[test]
    fn empty_series_is_rejected_before_file_creation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let err = save_series_csv(&TimeSeries::new(5), &path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(!path.exists());
    }

    #[test]
    fn json_mirrors_columns() {
        let series = tiny_series();
        let doc = series_to_json(&series).unwrap();
        assert_eq!(doc["n_vertices"], 5);
        assert_eq!(doc["t"].as_array().unwrap().len(), 2);
        assert_eq!(doc["nu_marked"][1], 0.25);
        assert_eq!(doc["norm_kn"][1], 1.5);
    }

    #[test]
    fn summary_has_the_fixed_top_level_schema() {
        let summary = Summary::new("reduced", json!({"n": 10}), json!({"rows": 3}), "reduced");
        let value = serde_json::to_value(&summary).unwrap();
        let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            vec!["command", "method", "params", "results", "tool_version"]
        );
        assert_eq!(value["tool_version"], TOOL_VERSION);
        assert_eq!(value["command"], "reduced");
        assert_eq!(value["method"], "reduced");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_series_csv("wrong,header\n1,2,3,4\n", 5).is_err());
        assert!(parse_series_csv("t,nu_marked,nu_unmarked,norm_kn\n1,2,3\n", 5).is_err());
        assert!(parse_series_csv("t,nu_marked,nu_unmarked,norm_kn\nx,2,3,4\n", 5).is_err());
        assert!(parse_series_csv("t,nu_marked,nu_unmarked,norm_kn\n", 5).is_err());
    }
}
