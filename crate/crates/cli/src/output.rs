//! JSONL emission. The text format renders the same records.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

pub const DETERMINISM: &str = "deterministic: output depends only on the command and its flags; no random seeds";

pub struct Emitter<W: Write> {
    out: W,
    format: Format,
}

fn record(kind: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("record".into(), Value::String(kind.into()));
    match body {
        Value::Object(o) => m.extend(o),
        other => {
            m.insert("value".into(), other);
        }
    }
    Value::Object(m)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_text(v: &Value) -> String {
    let Value::Object(m) = v else {
        return scalar(v);
    };
    let kind = m.get("record").map(scalar).unwrap_or_default();
    if let Some(s) = m.get("summary") {
        return format!("{kind}: {}", scalar(s));
    }
    let fields: Vec<String> = m
        .iter()
        .filter(|(k, _)| k.as_str() != "record")
        .map(|(k, v)| format!("{k}={}", scalar(v)))
        .collect();
    format!("{kind}: {}", fields.join(" "))
}

impl<W: Write> Emitter<W> {
    pub fn new(out: W, format: Format) -> Self {
        Emitter { out, format }
    }

    pub fn emit<T: Serialize + ?Sized>(&mut self, kind: &str, body: &T) -> Result<()> {
        let v = record(kind, serde_json::to_value(body)?);
        let line = match self.format {
            Format::Jsonl => serde_json::to_string(&v)?,
            Format::Text => render_text(&v),
        };
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    pub fn header(&mut self, command: &str, digits: u32, workers: usize) -> Result<()> {
        let h = serde_json::json!({
            "artifact": "expdio",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "digits": digits,
            "workers": workers,
            "determinism": DETERMINISM,
        });
        self.emit("header", &h)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
