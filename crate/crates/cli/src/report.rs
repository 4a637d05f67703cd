//! The JSON envelope shared by all commands.

use std::fs;
use std::io::Write;
use std::path::Path;

use grassdyn::recipes::Verdict;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, SCHEMA_VERSION};

pub struct Report {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub verdicts: Vec<Verdict>,
    pub payload: Value,
    pub elapsed: f64,
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Internal(format!("serializing report: {e}")))
}

/// Removes every `elapsed` key, at any depth.
fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// Hex SHA-256 of the compact serialization with all timings removed.
pub fn content_hash(body: &Value) -> String {
    let mut v = body.clone();
    strip_timings(&mut v);
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Value {
        let mut body = Map::new();
        body.insert("tool".into(), json!("grassdyn"));
        body.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        body.insert("schema".into(), json!(SCHEMA_VERSION));
        body.insert("command".into(), json!(self.command));
        body.insert("config".into(), self.config.clone());
        body.insert("seed".into(), json!(self.seed));
        body.insert(
            "verdicts".into(),
            serde_json::to_value(&self.verdicts).unwrap_or(Value::Null),
        );
        body.insert("passed".into(), json!(self.passed()));
        body.insert("payload".into(), self.payload.clone());
        let mut body = Value::Object(body);
        let hash = content_hash(&body);
        let map = body.as_object_mut().expect("object");
        map.insert("timings".into(), json!({ "elapsed": self.elapsed }));
        map.insert("content_hash".into(), json!(hash));
        body
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&self.to_json())
            .map_err(|e| CliError::Internal(format!("serializing report: {e}")))?;
        match out {
            Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                writeln!(stdout, "{text}").map_err(|e| CliError::Internal(format!("writing stdout: {e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_nested_timings() {
        let a = json!({"x": 1, "payload": {"elapsed": 0.5, "rows": [{"elapsed": 1.0, "k": 2}]}});
        let b = json!({"x": 1, "payload": {"elapsed": 9.0, "rows": [{"elapsed": 3.0, "k": 2}]}});
        let c = json!({"x": 1, "payload": {"elapsed": 9.0, "rows": [{"elapsed": 3.0, "k": 3}]}});
        assert_eq!(content_hash(&a), content_hash(&b));
        assert_ne!(content_hash(&a), content_hash(&c));
        assert_eq!(content_hash(&a).len(), 64);
    }
}
