//! Errors, JSON reports and CSV tables.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use critnet::{Error, ErrorClass};
use serde_json::{json, Map, Value};

#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(code: &'static str, message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Validation, code, message: message.into() }
    }

    pub fn internal(e: impl Display) -> Self {
        CliError { class: ErrorClass::Validation, code: "internal", message: e.to_string() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { class: ErrorClass::Validation, code: "io", message: format!("{}: {e}", path.display()) }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Validation => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Capacity => 4,
        }
    }

    /// Single-line JSON for standard error.
    pub fn to_line(&self) -> String {
        let class = match self.class {
            ErrorClass::Validation => "validation",
            ErrorClass::Numerical => "numerical",
            ErrorClass::Capacity => "capacity",
        };
        json!({"error": {"class": class, "code": self.code, "message": self.message}}).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Invalid(_) => "invalid",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Format(_) => "format",
            Error::Infeasible { .. } => "infeasible",
            Error::NormDrift { .. } => "norm_drift",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::Capacity { .. } => "dimension_limit",
            Error::Truncation { .. } => "truncation",
            Error::SearchSpace { .. } => "search_space",
            Error::EnumerationLimit { .. } => "enumeration_limit",
        };
        CliError { class: e.class(), code, message: e.to_string() }
    }
}

/// Floats keep 12 significant digits so reports do not depend on the last
/// bits of a platform's libm.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    json!(rounded)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn labels(indices: &[usize]) -> Value {
    json!(indices.iter().map(|i| i + 1).collect::<Vec<_>>())
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(&sorted(report)).unwrap_or_default();
    text.push('\n');
    text
}

fn sorted(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), sorted(&map[k]));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(sorted).collect()),
        other => other.clone(),
    }
}

pub fn emit_json(report: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(report);
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// A table whose first line names the producing task and the column layout
/// version.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub task: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub const CSV_VERSION: u32 = 1;

impl Table {
    pub fn new(task: &'static str, header: Vec<String>) -> Self {
        Table { task, header, rows: Vec::new() }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| cell(x)).collect());
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).map_err(CliError::internal)?;
        for row in &self.rows {
            writer.write_record(row).map_err(CliError::internal)?;
        }
        let body = writer.into_inner().map_err(CliError::internal)?;
        let body = String::from_utf8(body).map_err(CliError::internal)?;
        Ok(format!("# critnet {} v{CSV_VERSION}\n{body}", self.task))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_csv()?).map_err(|e| CliError::io(path, e))
    }
}

pub fn cell(x: f64) -> String {
    match num(x) {
        Value::Number(n) => n.to_string(),
        _ => "NaN".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_rounded_and_signed_zero_dropped() {
        assert_eq!(num(-0.0), json!(0.0));
        assert_eq!(num(0.1 + 0.2), json!(0.3));
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn keys_are_sorted() {
        let text = render(&json!({"b": 1, "a": {"d": 2, "c": 3}}));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"d\"").unwrap());
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn csv_has_versioned_header() {
        let mut t = Table::new("evolve", vec!["t".into(), "Y_1".into()]);
        t.push_floats(&[0.0, 0.25]);
        assert_eq!(t.to_csv().unwrap(), "# critnet evolve v1\nt,Y_1\n0.0,0.25\n");
    }

    #[test]
    fn core_errors_keep_their_class() {
        let e: CliError = Error::EnumerationLimit { requested: 10, limit: 5 }.into();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_line().starts_with("{\"error\":"));
    }
}
