//! Self-describing experiment reports with CSV and JSON round-trips.
//!
//! The CSV form leads with `# key=value` header lines carrying the full run
//! description, so a report doubles as a configuration file for reproducing
//! itself; the JSON form is a single object with the same content.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

/// One experiment's tabular output plus everything needed to re-run it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Ordered `key=value` run parameters (sample size, seeds, flags).
    pub parameters: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Confidence method tag, e.g. `wilson-95`.
    pub confidence: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
}

impl ExperimentReport {
    pub fn new(experiment: &str, confidence: &str) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            parameters: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            confidence: confidence.to_string(),
        }
    }

    pub fn set_param(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        debug_assert!(
            !key.contains('=') && !key.contains('\n') && !value.contains('\n'),
            "parameter keys and values must be single-line and '='-free keys"
        );
        if let Some(slot) = self.parameters.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.parameters.push((key.to_string(), value));
        }
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of a named column, top to bottom.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// CSV rendering: `# key=value` headers (experiment first, confidence
    /// last), a column-name row, then one line per record. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment={}", self.experiment);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# confidence={}", self.confidence);
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", rendered.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportError> {
        let mut experiment = None;
        let mut confidence = None;
        let mut parameters = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| ReportError::Malformed(format!("header without '=': {line}")))?;
                match key {
                    "experiment" => experiment = Some(value.to_string()),
                    "confidence" => confidence = Some(value.to_string()),
                    _ => parameters.push((key.to_string(), value.to_string())),
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row: Result<Vec<f64>, _> =
                        line.split(',').map(|f| f.parse::<f64>()).collect();
                    let row = row.map_err(|e| {
                        ReportError::Malformed(format!("bad numeric field in {line:?}: {e}"))
                    })?;
                    if row.len() != cols.len() {
                        return Err(ReportError::RaggedRow {
                            row: rows.len(),
                            got: row.len(),
                            expected: cols.len(),
                        });
                    }
                    rows.push(row);
                }
            }
        }
        Ok(ExperimentReport {
            experiment: experiment
                .ok_or_else(|| ReportError::Malformed("missing experiment header".into()))?,
            parameters,
            columns: columns
                .ok_or_else(|| ReportError::Malformed("missing column row".into()))?,
            rows,
            confidence: confidence
                .ok_or_else(|| ReportError::Malformed("missing confidence header".into()))?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        let mut r = ExperimentReport::new("tail_exit", "wilson-95");
        r.set_param("p", 0.6);
        r.set_param("m", 20);
        r.set_param("base_seed", 7u64);
        r.columns = vec!["k".into(), "tail".into(), "bound".into()];
        r.push_row(vec![0.0, 1.0, 1.0]);
        r.push_row(vec![1.0, 0.512340000125, 0.475]);
        r.push_row(vec![2.0, 0.25, 0.225625]);
        r
    }

    #[test]
    fn csv_round_trips_byte_identically() {
        let report = sample_report();
        let csv = report.to_csv();
        let back = ExperimentReport::from_csv(&csv).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn json_round_trips() {
        let report = sample_report();
        let back = ExperimentReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn csv_headers_carry_the_run_description() {
        let csv = sample_report().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# experiment=tail_exit"));
        assert_eq!(lines.next(), Some("# p=0.6"));
        assert_eq!(lines.next(), Some("# m=20"));
        assert_eq!(lines.next(), Some("# base_seed=7"));
        assert_eq!(lines.next(), Some("# confidence=wilson-95"));
        assert_eq!(lines.next(), Some("k,tail,bound"));
    }

    #[test]
    fn floats_survive_shortest_rendering() {
        let mut r = ExperimentReport::new("x", "none");
        r.columns = vec!["v".into()];
        for v in [0.1, 2.0_f64.powi(-40), 1.0 / 3.0, 123456789.123456789, f64::MAX] {
            r.rows.push(vec![v]);
        }
        let back = ExperimentReport::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back.rows, r.rows);
    }

    #[test]
    fn set_param_overwrites_in_place() {
        let mut r = ExperimentReport::new("x", "none");
        r.set_param("a", 1);
        r.set_param("b", 2);
        r.set_param("a", 3);
        assert_eq!(r.parameters, vec![("a".into(), "3".into()), ("b".into(), "2".into())]);
        assert_eq!(r.param("a"), Some("3"));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(
            ExperimentReport::from_csv("k,v\n1,2"),
            Err(ReportError::Malformed(_))
        ));
        let bad = "# experiment=e\n# confidence=c\nk,v\n1\n";
        assert_eq!(
            ExperimentReport::from_csv(bad),
            Err(ReportError::RaggedRow { row: 0, got: 1, expected: 2 })
        );
        assert!(ExperimentReport::from_json("{}").is_err());
    }
}
