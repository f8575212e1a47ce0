//! Pair documents: `input_alphabet`, `output_alphabet`, `W`, `q`, optional `name`.

use serde_json::{Map, Value};
use zerorate_core::rational::{format_rational, parse_rational, Rational};
use zerorate_core::ChannelMetricPair;

use crate::error::{CliError, Result};

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| CliError::Document(format!("missing field `{key}`")))
}

fn labels(obj: &Map<String, Value>, key: &str) -> Result<Vec<String>> {
    let Value::Array(items) = field(obj, key)? else {
        return Err(CliError::Document(format!("`{key}` must be a list of strings")));
    };
    items
        .iter()
        .map(|v| match v {
            Value::String(s) => Ok(s.clone()),
            _ => Err(CliError::Document(format!("`{key}` must be a list of strings"))),
        })
        .collect()
}

/// Numbers keep their literal text, so `0.1` is read as exactly `1/10`.
fn entry(v: &Value, key: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(CliError::Document(format!("`{key}` entries must be numbers or \"a/b\" strings"))),
    };
    Ok(parse_rational(&text)?)
}

fn matrix(obj: &Map<String, Value>, key: &str) -> Result<Vec<Vec<Rational>>> {
    let Value::Array(rows) = field(obj, key)? else {
        return Err(CliError::Document(format!("`{key}` must be a list of rows")));
    };
    rows.iter()
        .map(|row| match row {
            Value::Array(cells) => cells.iter().map(|c| entry(c, key)).collect(),
            _ => Err(CliError::Document(format!("`{key}` must be a list of rows"))),
        })
        .collect()
}

pub fn parse_pair(text: &str) -> Result<ChannelMetricPair> {
    let doc: Value = serde_json::from_str(text)?;
    let Value::Object(obj) = &doc else {
        return Err(CliError::Document("a pair document is an object".into()));
    };
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(CliError::Document("`name` must be a string".into())),
    };
    Ok(ChannelMetricPair::new(
        name,
        labels(obj, "input_alphabet")?,
        labels(obj, "output_alphabet")?,
        matrix(obj, "W")?,
        matrix(obj, "q")?,
    )?)
}

/// The document for `pair`, with every entry written as an exact `"a/b"` string.
pub fn pair_to_value(pair: &ChannelMetricPair) -> Value {
    let rows = |m: &[Vec<Rational>]| {
        Value::Array(
            m.iter()
                .map(|r| Value::Array(r.iter().map(|v| Value::String(format_rational(v))).collect()))
                .collect(),
        )
    };
    let mut obj = Map::new();
    if let Some(name) = pair.name() {
        obj.insert("name".into(), Value::String(name.into()));
    }
    obj.insert("input_alphabet".into(), pair.input_alphabet().into());
    obj.insert("output_alphabet".into(), pair.output_alphabet().into());
    obj.insert("W".into(), rows(pair.w_matrix()));
    obj.insert("q".into(), rows(pair.q_matrix()));
    Value::Object(obj)
}

pub fn serialize_pair(pair: &ChannelMetricPair) -> String {
    serde_json::to_string_pretty(&pair_to_value(pair)).expect("plain JSON values serialize")
}
