//! Experiment reports and their CSV / JSON forms.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64`; non-finite values become `nan` / `inf` in CSV and `null` in
//! JSON.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

/// Column header of every CSV report.
pub const CSV_HEADER: &str = "x,computed,stderr,reference,ratio";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (json, csv)")),
        }
    }
}

/// One measured point.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// Series name when a report holds several (e.g. `m=2`); JSON only.
    pub series: Option<String>,
    pub x: f64,
    pub computed: f64,
    pub stderr: f64,
    pub reference: f64,
    pub ratio: f64,
}

impl Row {
    pub fn new(x: f64, computed: f64, stderr: f64, reference: f64) -> Self {
        Row { series: None, x, computed, stderr, reference, ratio: computed / reference }
    }

    pub fn in_series(mut self, series: impl Into<String>) -> Self {
        self.series = Some(series.into());
        self
    }
}

/// A named check over the rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub description: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    /// Every parameter needed to reproduce the rows, including the seed.
    pub config: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("report `{0}` has no rows")]
    Empty(String),
    #[error("negative standard error in report `{0}`")]
    NegativeStderr(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        ExperimentReport { name: name.into(), config: BTreeMap::new(), rows: Vec::new(), assertions: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn check(&mut self, description: impl Into<String>, passed: bool) {
        self.assertions.push(Assertion { description: description.into(), passed });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    fn validate(&self) -> Result<(), EmitError> {
        if self.rows.is_empty() {
            return Err(EmitError::Empty(self.name.clone()));
        }
        if self.rows.iter().any(|r| !(r.stderr >= 0.0)) {
            return Err(EmitError::NegativeStderr(self.name.clone()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, EmitError> {
        self.validate()?;
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                csv_float(r.x),
                csv_float(r.computed),
                csv_float(r.stderr),
                csv_float(r.reference),
                csv_float(r.ratio)
            );
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String, EmitError> {
        self.validate()?;
        let mut s = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, EmitError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the report to `path`, or to `out` when no path is given.
    pub fn emit(&self, format: Format, path: Option<&Path>, out: &mut dyn Write) -> Result<(), EmitError> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// `{:.16e}`, or the CSV spelling of a non-finite value.
pub fn csv_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// A JSON number with 17 significant digits, or `null`.
pub struct JsonFloat(pub f64);

impl Serialize for JsonFloat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        if let Some(series) = &self.series {
            m.serialize_entry("series", series)?;
        }
        m.serialize_entry("x", &JsonFloat(self.x))?;
        m.serialize_entry("computed", &JsonFloat(self.computed))?;
        m.serialize_entry("stderr", &JsonFloat(self.stderr))?;
        m.serialize_entry("reference", &JsonFloat(self.reference))?;
        m.serialize_entry("ratio", &JsonFloat(self.ratio))?;
        m.end()
    }
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExperimentReport", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("config", &self.config)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("assertions", &self.assertions)?;
        st.serialize_field("passed", &self.passed())?;
        st.end()
    }
}

/// A value in a [`Record`].
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Float(f64),
    Int(i128),
    Text(String),
    Bool(bool),
    /// Nested JSON, kept on one line in both formats.
    Json(serde_json::Value),
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v as i128)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i128)
    }
}

impl From<u128> for Field {
    fn from(v: u128) -> Self {
        Field::Int(v as i128)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Float(v) => JsonFloat(*v).serialize(s),
            Field::Int(v) => v.serialize(s),
            Field::Text(v) => v.serialize(s),
            Field::Bool(v) => v.serialize(s),
            Field::Json(v) => {
                let raw = RawValue::from_string(v.to_string()).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
        }
    }
}

/// An ordered set of named values: one JSON object, or a one-row CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record(pub Vec<(String, Field)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: impl Into<Field>) -> &mut Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let header: Vec<&str> = self.0.iter().map(|(k, _)| k.as_str()).collect();
                let row: Vec<String> = self
                    .0
                    .iter()
                    .map(|(_, v)| match v {
                        Field::Float(x) => csv_float(*x),
                        Field::Int(x) => x.to_string(),
                        Field::Bool(x) => x.to_string(),
                        Field::Text(x) => csv_text(x),
                        Field::Json(x) => csv_text(&x.to_string()),
                    })
                    .collect();
                format!("{}\n{}\n", header.join(","), row.join(","))
            }
        }
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo");
        r.set("seed", 7);
        r.rows.push(Row::new(3.0, 1.5, 0.01, 1.25));
        r.rows.push(Row::new(7.0, 1.0 / 3.0, 0.0, 2.0).in_series("b"));
        r.check("always", true);
        r
    }

    #[test]
    fn empty_is_refused() {
        let r = ExperimentReport::new("empty");
        assert!(matches!(r.to_csv(), Err(EmitError::Empty(_))));
        assert!(matches!(r.to_json(), Err(EmitError::Empty(_))));
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("3.0000000000000000e0,1.5000000000000000e0,1.0000000000000000e-2,1.2500000000000000e0,1.2000000000000000e0"));
    }

    #[test]
    fn json_and_csv_agree() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        let rows = v["rows"].as_array().unwrap();
        let csv = r.to_csv().unwrap();
        for (line, row) in csv.lines().skip(1).zip(rows) {
            let from_csv: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            let from_json: Vec<f64> =
                ["x", "computed", "stderr", "reference", "ratio"].iter().map(|k| row[k].as_f64().unwrap()).collect();
            assert_eq!(from_csv.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), from_json.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
        assert_eq!(v["config"]["seed"], "7");
        assert_eq!(v["passed"], true);
    }

    #[test]
    fn floats_round_trip() {
        for v in [1.0 / 3.0, 1e-300, 123456789.123456789, f64::MIN_POSITIVE, -2.5] {
            assert_eq!(csv_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(serde_json::to_string(&JsonFloat(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn records() {
        let mut r = Record::new();
        r.push("value", 0.5).push("method", "qmc").push("samples", 10u64).push("note", "a,b");
        assert_eq!(r.render(Format::Csv), "value,method,samples,note\n5.0000000000000000e-1,qmc,10,\"a,b\"\n");
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["value"], 0.5);
        assert_eq!(v["samples"], 10);
    }
}
