//! Serialisation of result documents.
//!
//! JSON is the full document. CSV is a sequence of blocks separated by blank
//! lines, each with its own header: one block per table (one row per
//! checkpoint or grid point), then `estimates`, then `verdicts`. The first
//! column of every row names its block.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ResultDocument;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected csv or json)"))),
        }
    }
}

pub fn to_json(doc: &ResultDocument) -> Result<String> {
    serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn to_csv(doc: &ResultDocument) -> String {
    let mut out = String::new();
    for (name, t) in &doc.tables {
        let _ = writeln!(out, "table,{}", t.columns.iter().map(|c| field(c)).collect::<Vec<_>>().join(","));
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{},{}", field(name), cells.join(","));
        }
        out.push('\n');
    }
    out.push_str("estimates,name,estimate,se,replicas,successes\n");
    for (name, e) in &doc.estimates {
        let _ = writeln!(
            out,
            "estimates,{},{},{},{},{}",
            field(name),
            e.estimate,
            opt(e.se),
            e.replicas,
            opt(e.successes)
        );
    }
    out.push('\n');
    out.push_str("verdicts,name,pass,estimate,se,theory,slack,z,detail\n");
    for v in &doc.verdicts {
        let _ = writeln!(
            out,
            "verdicts,{},{},{},{},{},{},{},{}",
            field(&v.name),
            v.pass,
            opt(v.estimate),
            opt(v.se),
            opt(v.theory),
            opt(v.slack),
            opt(v.z),
            field(v.detail.as_deref().unwrap_or(""))
        );
    }
    out
}

pub fn render(doc: &ResultDocument, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(doc),
        Format::Csv => Ok(to_csv(doc)),
    }
}

/// Write to `path`, or to stdout when `path` is `None` or `-`.
pub fn write_document(doc: &ResultDocument, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(doc, format)?;
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text + "\n").map_err(io),
        _ => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}").map_err(io)
        }
    }
}
