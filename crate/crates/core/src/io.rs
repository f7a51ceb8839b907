//! JSON helpers shared by the file formats.

use serde_json::Value;

use crate::error::{GstError, Result};
use crate::scalar::{Mode, Scalar};

/// Exact values serialize as `"num/den"` strings, floats as JSON numbers.
pub fn scalar_to_json<T: Scalar>(v: &T) -> Value {
    match T::MODE {
        Mode::Exact => Value::String(v.to_repr()),
        Mode::Float => serde_json::Number::from_f64(v.to_f64())
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(v.to_repr())),
    }
}

/// Accepts `"num/den"`, decimal strings, and JSON numbers. In exact mode a
/// JSON number is read through its decimal text, so `0.3` means `3/10`.
pub fn scalar_from_json<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::String(s) => T::parse_repr(s),
        Value::Number(num) => T::parse_repr(&num.to_string()),
        other => Err(GstError::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn vector_to_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

pub fn vector_from_json<T: Scalar>(v: &Value) -> Result<Vec<T>> {
    match v {
        Value::Array(items) => items.iter().map(scalar_from_json).collect(),
        other => Err(GstError::Parse(format!("expected an array, got {other}"))),
    }
}

/// Parses a comma separated list such as `1,1/2,1/3`.
pub fn parse_list<T: Scalar>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|item| T::parse_repr(item.trim())).collect()
}
