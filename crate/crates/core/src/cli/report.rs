//! Report assembly: status codes and 12-digit numeric rendering.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_COMPUTATIONAL: i32 = 4;

pub fn status_of(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Parse(_) => ("parse_error", EXIT_PARSE),
        Error::Dimension { .. }
        | Error::InvalidInput(_)
        | Error::Precondition(_)
        | Error::Domain(_) => ("domain_error", EXIT_DOMAIN),
        Error::Unsupported(_) => ("unsupported", EXIT_COMPUTATIONAL),
        Error::Computational { .. } => ("computational_error", EXIT_COMPUTATIONAL),
    }
}

/// A float as a report value: 12 significant digits, `"inf"` / `"-inf"` for infinities.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v.is_infinite() {
        Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        let r: f64 = format!("{v:.11e}").parse().expect("formatted float");
        json!(r)
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// Serializes and rounds every number in the tree.
pub fn rounded<T: Serialize>(t: &T) -> Value {
    let mut v = serde_json::to_value(t).expect("report types serialize");
    round_in_place(&mut v);
    v
}

pub fn round_in_place(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() {
                    *v = num(x);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_in_place),
        Value::Object(map) => map.values_mut().for_each(round_in_place),
        _ => {}
    }
}

/// Report skeleton shared by every command.
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        Report { fields }
    }

    pub fn set(&mut self, key: &str, v: Value) -> &mut Self {
        self.fields.insert(key.into(), v);
        self
    }

    pub fn finish(mut self, status: &str) -> Value {
        self.fields.insert("status".into(), json!(status));
        Value::Object(self.fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits_and_inf() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.0 / 3.0), json!(0.333333333333));
        assert_eq!(num(2.0), json!(2.0));
        let mut v = json!({"a": [0.1 + 0.2, 3], "b": {"c": 1e-20 / 3.0}});
        round_in_place(&mut v);
        assert_eq!(v, json!({"a": [0.3, 3], "b": {"c": 3.33333333333e-21}}));
    }
}
