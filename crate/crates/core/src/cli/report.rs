use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Ordered key/value report. JSON output sorts keys; CSV and text keep
/// insertion order and list scalars only.
#[derive(Debug, Default, Clone)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from("key,value\n");
                for (k, v) in self.scalars() {
                    let _ = writeln!(s, "{},{}", csv_field(&k), csv_field(&scalar_text(&v)));
                }
                s
            }
            Format::Text => {
                let mut s = String::new();
                for (k, v) in self.scalars() {
                    let _ = writeln!(s, "{k}: {}", scalar_text(&v));
                }
                s
            }
        }
    }

    /// Scalar leaves, with nested objects flattened to dotted keys.
    fn scalars(&self) -> Vec<(String, Value)> {
        let mut out = Vec::new();
        for (k, v) in &self.fields {
            flatten(k, v, &mut out);
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, inner) in m {
                flatten(&format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(_) => {}
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn formats() {
        let mut r = Report::new();
        r.put("value", 1.5)
            .put("kind", "lower_bound")
            .put("m", json!([[1, 2]]));
        r.put("check", json!({"pass": true, "max": 0.0}));
        assert!(r.render(Format::Json).contains("\"kind\": \"lower_bound\""));
        let csv = r.render(Format::Csv);
        assert_eq!(
            csv,
            "key,value\nvalue,1.5\nkind,lower_bound\ncheck.max,0.0\ncheck.pass,true\n"
        );
        assert!(r.render(Format::Text).starts_with("value: 1.5\n"));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("x"), "x");
    }
}
