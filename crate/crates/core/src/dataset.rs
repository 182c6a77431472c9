//! Measurement records keyed by (project, method, rater).
//!
//! The ingestion format is a four-column CSV with the exact header
//! `project,method,rater,value`. Projects, methods and raters are ordered by
//! first appearance; the rater order within a method defines which
//! measurement is "first" and which is "second".

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: &str = "project,method,rater,value";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub project_id: String,
    pub method_id: String,
    pub rater_id: String,
    pub value: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("line 1: expected header `{CSV_HEADER}`")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: value must be strictly positive")]
    NonPositiveValue { line: usize },
    #[error("line {line}: duplicate measurement for project `{project}`, method `{method}`, rater `{rater}`")]
    DuplicateCell {
        line: usize,
        project: String,
        method: String,
        rater: String,
    },
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("incomplete design, projects missing a rater: {0:?}")]
    IncompleteDesign(Vec<String>),
    #[error("pair-based analysis needs exactly 2 raters, method has {0}")]
    TooManyRaters(usize),
    #[error("pair-based analysis needs exactly 2 raters, method has {0}")]
    TooFewRaters(usize),
    #[error("methods `{a}` and `{b}` were not measured on the same projects")]
    ProjectSetMismatch { a: String, b: String },
}

/// Immutable collection of measurements with first-appearance orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDataset {
    records: Vec<MeasurementRecord>,
    projects: Vec<String>,
    methods: Vec<String>,
    raters_per_method: Vec<(String, Vec<String>)>,
    index: HashMap<(String, String, String), usize>,
}

/// Two project-aligned measurement series for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    pub method_id: String,
    pub raters: [String; 2],
    pub projects: Vec<String>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl PairedSeries {
    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    /// Per-project `first - second`.
    pub fn differences(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| a - b)
            .collect()
    }
}

impl MeasurementDataset {
    /// Build a dataset, enforcing positivity and cell uniqueness.
    ///
    /// Errors report the 1-based position of the offending record plus one,
    /// i.e. the line it would occupy in a CSV file with a header.
    pub fn from_records(records: Vec<MeasurementRecord>) -> Result<Self, DatasetError> {
        let mut ds = MeasurementDataset {
            records: Vec::with_capacity(records.len()),
            projects: Vec::new(),
            methods: Vec::new(),
            raters_per_method: Vec::new(),
            index: HashMap::new(),
        };
        for (i, rec) in records.into_iter().enumerate() {
            ds.push(rec, i + 2)?;
        }
        Ok(ds)
    }

    fn push(&mut self, rec: MeasurementRecord, line: usize) -> Result<(), DatasetError> {
        if !(rec.value > 0.0) || !rec.value.is_finite() {
            return Err(DatasetError::NonPositiveValue { line });
        }
        let key = (
            rec.project_id.clone(),
            rec.method_id.clone(),
            rec.rater_id.clone(),
        );
        if self.index.contains_key(&key) {
            return Err(DatasetError::DuplicateCell {
                line,
                project: key.0,
                method: key.1,
                rater: key.2,
            });
        }
        if !self.projects.contains(&rec.project_id) {
            self.projects.push(rec.project_id.clone());
        }
        if !self.methods.contains(&rec.method_id) {
            self.methods.push(rec.method_id.clone());
            self.raters_per_method
                .push((rec.method_id.clone(), Vec::new()));
        }
        let raters = &mut self
            .raters_per_method
            .iter_mut()
            .find(|(m, _)| *m == rec.method_id)
            .expect("method registered above")
            .1;
        if !raters.contains(&rec.rater_id) {
            raters.push(rec.rater_id.clone());
        }
        self.index.insert(key, self.records.len());
        self.records.push(rec);
        Ok(())
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn projects(&self) -> &[String] {
        &self.projects
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn raters(&self, method: &str) -> Option<&[String]> {
        self.raters_per_method
            .iter()
            .find(|(m, _)| m == method)
            .map(|(_, r)| r.as_slice())
    }

    pub fn value(&self, project: &str, method: &str, rater: &str) -> Option<f64> {
        self.index
            .get(&(project.to_owned(), method.to_owned(), rater.to_owned()))
            .map(|&i| self.records[i].value)
    }

    /// Projects (in dataset order) with at least one measurement by `method`.
    pub fn projects_for(&self, method: &str) -> Vec<String> {
        let raters = match self.raters(method) {
            Some(r) => r,
            None => return Vec::new(),
        };
        self.projects
            .iter()
            .filter(|p| raters.iter().any(|r| self.value(p, method, r).is_some()))
            .cloned()
            .collect()
    }

    /// First and second rater's measurements of `method`, aligned by project.
    pub fn extract_pair(&self, method: &str) -> Result<PairedSeries, DatasetError> {
        let raters = self
            .raters(method)
            .ok_or_else(|| DatasetError::UnknownMethod(method.to_owned()))?;
        match raters.len() {
            2 => {}
            n if n > 2 => return Err(DatasetError::TooManyRaters(n)),
            n => return Err(DatasetError::TooFewRaters(n)),
        }
        let projects = self.projects_for(method);
        let mut first = Vec::with_capacity(projects.len());
        let mut second = Vec::with_capacity(projects.len());
        let mut missing = Vec::new();
        for p in &projects {
            match (
                self.value(p, method, &raters[0]),
                self.value(p, method, &raters[1]),
            ) {
                (Some(a), Some(b)) => {
                    first.push(a);
                    second.push(b);
                }
                _ => missing.push(p.clone()),
            }
        }
        if !missing.is_empty() {
            return Err(DatasetError::IncompleteDesign(missing));
        }
        Ok(PairedSeries {
            method_id: method.to_owned(),
            raters: [raters[0].clone(), raters[1].clone()],
            projects,
            first,
            second,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.project_id, r.method_id, r.rater_id, r.value
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize")
    }
}

/// Parse the four-column measurement CSV.
pub fn parse_csv(source: &[u8]) -> Result<MeasurementDataset, DatasetError> {
    let text = std::str::from_utf8(source).map_err(|_| DatasetError::NotUtf8)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.split('\n').enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
        _ => return Err(DatasetError::MissingHeader),
    }
    let mut ds = MeasurementDataset::from_records(Vec::new())?;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(DatasetError::MalformedLine {
                line: line_no,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let ids: Vec<&str> = fields[..3].iter().map(|f| f.trim()).collect();
        if let Some(col) = ids.iter().position(|f| f.is_empty()) {
            return Err(DatasetError::MalformedLine {
                line: line_no,
                reason: format!("column {} is empty", col + 1),
            });
        }
        let value: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| DatasetError::MalformedLine {
                line: line_no,
                reason: format!("column 4: `{}` is not a number", fields[3].trim()),
            })?;
        if value.is_nan() || value.is_infinite() {
            return Err(DatasetError::MalformedLine {
                line: line_no,
                reason: "column 4: value must be finite".into(),
            });
        }
        ds.push(
            MeasurementRecord {
                project_id: ids[0].to_owned(),
                method_id: ids[1].to_owned(),
                rater_id: ids[2].to_owned(),
                value,
            },
            line_no,
        )?;
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(body: &str) -> Vec<u8> {
        format!("{CSV_HEADER}\n{body}").into_bytes()
    }

    #[test]
    fn parses_two_records() {
        let ds = parse_csv(&csv("p1,A,r1,100\np1,A,r2,120")).unwrap();
        assert_eq!(ds.records().len(), 2);
        assert_eq!(ds.raters("A").unwrap(), ["r1", "r2"]);
        assert_eq!(ds.value("p1", "A", "r2"), Some(120.0));
    }

    #[test]
    fn rejects_non_positive() {
        assert_eq!(
            parse_csv(&csv("p1,A,r1,0")),
            Err(DatasetError::NonPositiveValue { line: 2 })
        );
        assert!(matches!(
            parse_csv(&csv("p1,A,r1,1\np2,A,r1,-3")),
            Err(DatasetError::NonPositiveValue { line: 3 })
        ));
    }

    #[test]
    fn rejects_duplicates() {
        let err = parse_csv(&csv("p1,A,r1,100\np1,A,r1,110")).unwrap_err();
        assert_eq!(
            err,
            DatasetError::DuplicateCell {
                line: 3,
                project: "p1".into(),
                method: "A".into(),
                rater: "r1".into()
            }
        );
    }

    #[test]
    fn malformed_lines_and_header() {
        assert_eq!(parse_csv(b"p,m,r,v\n"), Err(DatasetError::MissingHeader));
        assert_eq!(parse_csv(b""), Err(DatasetError::MissingHeader));
        assert!(matches!(
            parse_csv(&csv("p1,A,r1")),
            Err(DatasetError::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv(&csv("p1,A,r1,abc")),
            Err(DatasetError::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv(&csv("p1,,r1,5")),
            Err(DatasetError::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv(&csv("p1,A,r1,inf")),
            Err(DatasetError::MalformedLine { line: 2, .. })
        ));
        assert_eq!(parse_csv(&[0xff, 0xfe]), Err(DatasetError::NotUtf8));
    }

    #[test]
    fn tolerates_crlf_and_trailing_blank() {
        let ds = parse_csv(b"project,method,rater,value\r\np1,A,r1,1.5\r\n\r\n").unwrap();
        assert_eq!(ds.records()[0].value, 1.5);
    }

    #[test]
    fn extract_pair_complete() {
        let ds = parse_csv(&csv(
            "p1,A,r1,10\np1,A,r2,11\np2,A,r1,20\np2,A,r2,22\np3,A,r2,33\np3,A,r1,30",
        ))
        .unwrap();
        let pair = ds.extract_pair("A").unwrap();
        assert_eq!(pair.len(), 3);
        assert_eq!(pair.first, vec![10.0, 20.0, 30.0]);
        assert_eq!(pair.second, vec![11.0, 22.0, 33.0]);
        assert_eq!(pair.differences(), vec![-1.0, -2.0, -3.0]);
    }

    #[test]
    fn extract_pair_errors() {
        let ds = parse_csv(&csv("p1,A,r1,10\np1,A,r2,11\np2,A,r1,20")).unwrap();
        assert_eq!(
            ds.extract_pair("A"),
            Err(DatasetError::IncompleteDesign(vec!["p2".into()]))
        );
        let ds = parse_csv(&csv("p1,A,r1,10\np1,A,r2,11\np1,A,r3,12")).unwrap();
        assert_eq!(ds.extract_pair("A"), Err(DatasetError::TooManyRaters(3)));
        let ds = parse_csv(&csv("p1,A,r1,10")).unwrap();
        assert_eq!(ds.extract_pair("A"), Err(DatasetError::TooFewRaters(1)));
        assert_eq!(
            ds.extract_pair("Z"),
            Err(DatasetError::UnknownMethod("Z".into()))
        );
    }

    #[test]
    fn json_export_field_names() {
        let ds = parse_csv(&csv("p1,A,r1,100")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&ds.to_json()).unwrap();
        let obj = v[0].as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["method_id", "project_id", "rater_id", "value"]);
    }
}
