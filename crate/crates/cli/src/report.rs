// SPDX-License-Identifier: Apache-2.0
//! Reports rendered either as `key: value` text or as one JSON object.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
}

/// Ordered summary fields plus optional per-instance rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Map<String, Value>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), v.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.summary.get(key)
    }

    pub fn push_row(&mut self, row: Map<String, Value>) {
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut m = self.summary.clone();
                if !self.rows.is_empty() {
                    m.insert("instances".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
                }
                let mut s = Value::Object(m).to_string();
                s.push('\n');
                s
            }
            Format::Human => {
                let mut s = String::new();
                for row in &self.rows {
                    let parts: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
                    s.push_str(&parts.join(" "));
                    s.push('\n');
                }
                for (k, v) in &self.summary {
                    s.push_str(&format!("{k}: {}\n", scalar(v)));
                }
                s
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Builds a row from `(key, value)` pairs in order.
pub fn row<const N: usize>(fields: [(&str, Value); N]) -> Map<String, Value> {
    fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// JSON number when the value fits in `u64`, decimal string otherwise.
pub fn big(v: u128) -> Value {
    u64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}

pub fn big_signed(v: i128) -> Value {
    i64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_and_json() {
        let mut r = Report::new();
        r.push_row(row([("i", 0.into()), ("pass", true.into())]));
        r.set("passed", 1).set("values", vec![1.5, 2.0]);
        assert_eq!(r.render(Format::Human), "i=0 pass=true\npassed: 1\nvalues: 1.5,2.0\n");
        assert_eq!(r.render(Format::Json), "{\"passed\":1,\"values\":[1.5,2.0],\"instances\":[{\"i\":0,\"pass\":true}]}\n");
    }

    #[test]
    fn wide_integers() {
        assert_eq!(big(5), Value::from(5u64));
        assert_eq!(big(1 << 70), Value::String((1u128 << 70).to_string()));
        assert_eq!(big_signed(-3), Value::from(-3i64));
    }
}
