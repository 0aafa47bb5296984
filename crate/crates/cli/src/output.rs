use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Schema version of every JSON document the CLI writes.
pub const REPORT_VERSION: u32 = 1;

/// Wraps a command result with the version tag and the echoed configuration.
pub fn envelope<C: Serialize>(command: &str, config: &C, body: Value) -> CliResult<Value> {
    let config = serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut doc = Map::new();
    doc.insert("version".into(), json!(REPORT_VERSION));
    doc.insert("command".into(), json!(command));
    doc.insert("config".into(), config);
    match body {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    Ok(Value::Object(doc))
}

pub fn emit(doc: &Value, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => Ok(polarforge::dataset::write_json(p, doc)?),
        None => {
            let text = serde_json::to_string_pretty(doc).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    }
}
