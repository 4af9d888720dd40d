//! Structured output records and their renderings.

use clap::ValueEnum;
use oblivio_core::{Rational, ScaledRate};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// `kind key=value ...` per line.
    #[default]
    Text,
    /// A header row per run of records with the same kind and keys.
    Csv,
    /// One JSON object per line.
    JsonLines,
}

/// A named, ordered set of fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(kind: impl Into<String>) -> Self {
        Record {
            kind: kind.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.fields.push((key.into(), value.into()));
        self
    }

    /// Exact rationals are kept as `p/q` strings.
    pub fn rational(self, key: impl Into<String>, value: Rational) -> Self {
        self.field(key, value.to_string())
    }

    /// A rate that may carry a factor of `e`: the symbolic form plus its
    /// floating-point value under `<key>_approx`.
    pub fn rate(self, key: &str, value: ScaledRate) -> Self {
        self.field(key, value.to_string())
            .field(format!("{key}_approx"), value.to_f64())
    }

    pub fn list(self, key: impl Into<String>, values: &[usize]) -> Self {
        self.field(key, values.iter().map(|&v| Value::from(v)).collect::<Vec<_>>())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("kind".into(), Value::from(self.kind.as_str()));
        for (k, v) in &self.fields {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }
}

fn scalar_text(v: &Value, list_sep: &str) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|i| scalar_text(i, list_sep))
            .collect::<Vec<_>>()
            .join(list_sep),
        other => other.to_string(),
    }
}

pub fn render(records: &[Record], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Text => Ok(records
            .iter()
            .map(|r| {
                let mut line = r.kind.clone();
                for (k, v) in &r.fields {
                    line.push_str(&format!(" {k}={}", scalar_text(v, ",")));
                }
                line + "\n"
            })
            .collect()),
        OutputFormat::JsonLines => Ok(records.iter().map(|r| format!("{}\n", r.to_json())).collect()),
        OutputFormat::Csv => {
            let to_err = |e: csv::Error| CliError::param(format!("cannot encode CSV: {e}"));
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            let mut last_header: Option<Vec<&str>> = None;
            for r in records {
                let header: Vec<&str> = std::iter::once("kind")
                    .chain(r.fields.iter().map(|(k, _)| k.as_str()))
                    .collect();
                if last_header.as_ref() != Some(&header) {
                    w.write_record(&header).map_err(to_err)?;
                    last_header = Some(header);
                }
                let row = std::iter::once(r.kind.clone()).chain(r.fields.iter().map(|(_, v)| scalar_text(v, " ")));
                w.write_record(row).map_err(to_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::param(format!("cannot encode CSV: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        vec![
            Record::new("link").field("link", 0).list("blocked_by", &[1, 2]),
            Record::new("link").field("link", 1).list("blocked_by", &[]),
            Record::new("summary")
                .rational("rho", Rational::new(3, 16))
                .field("stable", true),
        ]
    }

    #[test]
    fn text_output() {
        let text = render(&sample(), OutputFormat::Text).unwrap();
        assert_eq!(
            text,
            "link link=0 blocked_by=1,2\nlink link=1 blocked_by=\nsummary rho=3/16 stable=true\n"
        );
    }

    #[test]
    fn csv_repeats_header_on_shape_change() {
        let csv = render(&sample(), OutputFormat::Csv).unwrap();
        assert_eq!(
            csv,
            "kind,link,blocked_by\nlink,0,1 2\nlink,1,\nkind,rho,stable\nsummary,3/16,true\n"
        );
    }

    #[test]
    fn json_lines_keep_field_order() {
        let json = render(&sample(), OutputFormat::JsonLines).unwrap();
        let first = json.lines().next().unwrap();
        assert_eq!(first, r#"{"kind":"link","link":0,"blocked_by":[1,2]}"#);
    }
}
