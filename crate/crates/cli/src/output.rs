//! JSON and CSV emission. JSON objects keep sorted keys, so equal inputs give equal bytes.

use std::io::Write;

use hdcoding::coding::{CoordinateWord, SymbolSequence, WordStatus};
use hdcoding::suite::SCHEMA_VERSION;
use serde_json::{json, Value};

use crate::exit::Failure;

pub fn print_json(v: &Value) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

/// Adds the schema version and command name to a JSON object.
pub fn envelope(command: &str, mut body: Value) -> Value {
    if let Value::Object(m) = &mut body {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(command));
    }
    body
}

pub fn csv_out(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| Failure::new(1, e))?;
    Ok(())
}

pub fn word_json(w: &CoordinateWord) -> Value {
    let status = match w.status() {
        WordStatus::Finite => json!("finite"),
        WordStatus::Truncated(d) => json!({ "truncated": d }),
    };
    json!({ "entries": w.entries(), "status": status, "text": w.to_string() })
}

/// Symbols in time order with the index of time 0.
pub fn sequence_json(s: &SymbolSequence) -> Value {
    let (all, origin) = s.time_ordered();
    json!({
        "text": s.to_string(),
        "symbols": all.iter().map(|x| x.value()).collect::<Vec<_>>(),
        "origin": origin,
        "first_time": -(origin as i64),
        "past_end": s.past_end,
        "future_end": s.future_end,
    })
}
