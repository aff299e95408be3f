use std::io::Write;

use serde_json::{json, Map, Value};

use crate::{Format, Global};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    /// Partial report printed before exiting, when one is defined.
    pub partial: Option<Value>,
}

impl CliError {
    pub fn invalid(message: impl ToString) -> Self {
        Self { code: EXIT_INVALID, message: message.to_string(), partial: None }
    }

    pub fn budget(message: impl ToString, partial: Option<Value>) -> Self {
        Self { code: EXIT_BUDGET, message: message.to_string(), partial }
    }
}

pub struct Output {
    pub report: Value,
    pub code: u8,
}

impl Output {
    pub fn ok(report: Value) -> Self {
        Self { report, code: 0 }
    }
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::invalid(format!("cannot serialize report: {e}")))
}

/// The report wrapped with the schema version, command name and the
/// budgets in force.
pub fn envelope(command: &str, global: &Global, report: &Value, code: u8) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "exit_code": code,
        "budgets": {"cap": global.cap, "max_order": global.max_order, "seed": global.seed},
        "report": report,
    })
}

pub fn emit(command: &str, global: &Global, report: &Value, code: u8) {
    let v = envelope(command, global, report, code);
    let text = match global.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize")),
        Format::Table => table(&v),
    };
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn rows(items: &[Value]) -> Option<String> {
    let objects: Vec<&Map<String, Value>> = items.iter().map(Value::as_object).collect::<Option<_>>()?;
    let mut keys: Vec<&String> = Vec::new();
    for k in objects.first()?.keys().chain(objects.iter().flat_map(|o| o.keys())) {
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    if objects.iter().flat_map(|o| o.values()).any(|v| v.is_object()) {
        return None;
    }
    let cells: Vec<Vec<String>> = items.iter().map(|x| keys.iter().map(|k| scalar(&x[k.as_str()])).collect()).collect();
    let widths: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| cells.iter().map(|r| r[i].len()).chain([k.len()]).max().unwrap_or(0))
        .collect();
    let line = |xs: Vec<&str>| -> String {
        xs.iter().zip(&widths).map(|(x, w)| format!("{x:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = vec![line(keys.iter().map(|k| k.as_str()).collect())];
    out.extend(cells.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    Some(out.join("\n"))
}

fn flat(o: &Map<String, Value>, out: &mut String, sections: &mut Vec<(String, String)>) {
    for (key, x) in o {
        match x {
            Value::Array(items) => match rows(items) {
                Some(t) => sections.push((key.clone(), t)),
                None => out.push_str(&format!("{key}: {x}\n")),
            },
            Value::Object(_) => out.push_str(&format!("{key}: {x}\n")),
            _ => out.push_str(&format!("{key}: {}\n", scalar(x))),
        }
    }
}

/// Plain-text rendering: scalars as `key: value`, arrays of uniform
/// objects as aligned tables, anything else as compact JSON.
pub fn table(v: &Value) -> String {
    let mut out = String::new();
    let Some(obj) = v.as_object() else { return format!("{}\n", scalar(v)) };
    let mut sections = Vec::new();
    let top: Map<String, Value> = obj.iter().filter(|(k, _)| *k != "report").map(|(k, v)| (k.clone(), v.clone())).collect();
    flat(&top, &mut out, &mut sections);
    match obj.get("report") {
        Some(Value::Object(r)) => flat(r, &mut out, &mut sections),
        Some(Value::Array(items)) => match rows(items) {
            Some(t) => sections.push(("report".into(), t)),
            None => out.push_str(&format!("report: {}\n", Value::Array(items.clone()))),
        },
        Some(x) => out.push_str(&format!("report: {}\n", scalar(x))),
        None => {}
    }
    for (k, t) in sections {
        out.push_str(&format!("\n[{k}]\n{t}\n"));
    }
    out
}
