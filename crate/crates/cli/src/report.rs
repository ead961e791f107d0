use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use eigenpath::io::format_real;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Key into `config.tolerances`, when the verdict depends on one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            tolerance: None,
        }
    }

    pub fn with_tolerance(name: impl Into<String>, passed: bool, key: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            tolerance: Some(key.into()),
        }
    }
}

/// Everything needed to reproduce and judge one invocation.
#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: Vec<String>,
    pub config: Map<String, Value>,
    pub results: T,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
}

/// Base configuration echoed by every command.
pub fn base_config(seed: u64, tol: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("seed".into(), seed.into());
    m.insert("tol".into(), tol.into());
    m.insert("tolerances".into(), Value::Object(Map::new()));
    m
}

pub fn declare_tolerance(config: &mut Map<String, Value>, key: &str, value: f64) {
    if let Some(Value::Object(t)) = config.get_mut("tolerances") {
        t.insert(key.into(), value.into());
    }
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let out = std::io::stdout();
    let mut lock = out.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)?;
    Ok(())
}

/// Writes a header and rows of already formatted cells.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn real_cell(x: f64) -> String {
    format_real(x)
}
