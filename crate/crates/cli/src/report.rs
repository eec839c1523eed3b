//! Report assembly and rendering.
//!
//! Reports are `serde_json::Value` trees. Maps are key-sorted and floats use the shortest
//! round-trip form, so identical inputs give byte-identical files.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Tsv,
}

/// Verdict in frame language and in systems language.
pub struct Entry {
    pub verdict: &'static str,
    pub value: bool,
    pub frame: &'static str,
    pub systems: &'static str,
}

impl Entry {
    pub fn new(verdict: &'static str, value: bool, frame: &'static str, systems: &'static str) -> Self {
        Entry { verdict, value, frame, systems }
    }

    fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict,
            "value": self.value,
            "frame_language": self.frame,
            "systems_language": self.systems,
        })
    }
}

pub struct Report {
    pub command: &'static str,
    pub verdict: bool,
    pub body: Map<String, Value>,
    pub dictionary: Vec<Entry>,
    pub notes: Vec<String>,
    /// Replaces the flattened rendering for `--format tsv`.
    pub table: Option<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, verdict: false, body: Map::new(), dictionary: vec![], notes: vec![], table: None }
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.body.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut root = self.body.clone();
        root.insert("command".into(), json!(self.command));
        root.insert("verdict".into(), json!(self.verdict));
        root.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        if !self.dictionary.is_empty() {
            root.insert("dictionary".into(), Value::Array(self.dictionary.iter().map(Entry::to_json).collect()));
        }
        root.insert("notes".into(), json!(self.notes));
        Value::Object(root)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json renders");
                s.push('\n');
                s
            }
            Format::Text => flatten(&self.to_json()).into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
            Format::Tsv => match &self.table {
                Some(t) => t.clone(),
                None => flatten(&self.to_json()).into_iter().map(|(k, v)| format!("{k}\t{v}\n")).collect(),
            },
        }
    }
}

fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(&key(k), v, out)),
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                a.iter().enumerate().for_each(|(i, v)| walk(&key(&i.to_string()), v, out))
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

/// Writes `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
