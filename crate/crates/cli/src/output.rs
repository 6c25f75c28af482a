//! Report emission: a JSON array of records or a flattened CSV table.
//!
//! Both formats carry the same numbers. JSON uses the shortest round-trip
//! representation, CSV prints every float with 17 significant digits, so
//! parsing either gives back the identical `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::Format;

/// Keys left out of CSV rows because they differ between otherwise
/// identical runs.
const CSV_SKIP: &[&str] = &["timings_ms"];

pub fn render(records: &[Value], format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(records)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| e.to_string()),
        Format::Csv => render_csv(records),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())
        }
    }
}

/// `{"a": {"b": [1, 2]}}` becomes columns `a.b.0`, `a.b.1`.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into(String::new(), value, &mut out);
    out
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten_into(prefix: String, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if prefix.is_empty() && CSV_SKIP.contains(&k.as_str()) {
                    continue;
                }
                flatten_into(join(&prefix, k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(join(&prefix, &i.to_string()), v, out);
            }
        }
        Value::Number(n) => out.push((prefix, format_number(n))),
        Value::String(s) => out.push((prefix, s.clone())),
        Value::Bool(b) => out.push((prefix, b.to_string())),
        Value::Null => out.push((prefix, String::new())),
    }
}

fn format_number(n: &serde_json::Number) -> String {
    if n.is_f64() {
        format!("{:.16e}", n.as_f64().expect("checked"))
    } else {
        n.to_string()
    }
}

fn render_csv(records: &[Value]) -> Result<String, String> {
    let rows: Vec<Vec<(String, String)>> = records.iter().map(flatten).collect();
    // union of columns in order of first appearance
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| e.to_string())?;
    for row in &rows {
        let lookup: Map<String, Value> = row.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let line: Vec<&str> = header
            .iter()
            .map(|h| lookup.get(h).and_then(Value::as_str).unwrap_or(""))
            .collect();
        w.write_record(&line).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}
