//! Report envelopes and their text and JSON renderings.

use serde_json::{json, Value};

use crate::failure::Invalid;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// One computed result with the module and quantity that produced it.
pub struct Report {
    pub command: &'static str,
    pub module: &'static str,
    pub quantity: &'static str,
    pub result: Value,
}

impl Report {
    pub fn envelope(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "provenance": { "module": self.module, "quantity": self.quantity },
            "result": self.result,
        })
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => pretty(&report.envelope()),
        Format::Text => {
            let mut out = format!("{} ({}: {})\n", report.command, report.module, report.quantity);
            text_fields(&report.result, "", &mut out);
            out
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn text_fields(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                text_fields(item, &key, out);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, item) in items.iter().enumerate() {
                text_fields(item, &format!("{prefix}[{i}]"), out);
            }
        }
        other if prefix.is_empty() => out.push_str(&format!("{}\n", scalar(other))),
        other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn error_envelope(command: &str, err: &anyhow::Error) -> Value {
    let error = match err.downcast_ref::<Invalid>() {
        Some(inv) => {
            let mut e = json!({ "kind": "validation", "invariant": inv.invariant, "message": inv.message });
            if let Some((line, column)) = inv.position {
                e["line"] = json!(line);
                e["column"] = json!(column);
            }
            e
        }
        None => json!({ "kind": "internal", "message": format!("{err:#}") }),
    };
    json!({ "schema_version": SCHEMA_VERSION, "command": command, "error": error })
}
