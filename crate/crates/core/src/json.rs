//! Deterministic JSON output: compact, insertion-ordered keys, and every
//! non-integer number written with 17 significant digits so that output is
//! bit-exact and re-parses to the same `f64`.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v);
    Ok(out)
}

/// `d.ddddddddddddddddeN`, or plain digits for values stored as integers.
pub fn format_number(n: &serde_json::Number) -> String {
    if n.is_i64() || n.is_u64() {
        return n.to_string();
    }
    let x = n.as_f64().expect("serde_json numbers are finite");
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => {
            out.push_str(&v.to_string());
        }
        Value::Number(n) => out.push_str(&format_number(n)),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:", Value::String(k.clone()));
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits() {
        let s = to_string(&json!({"x": 3f64.sqrt(), "n": 3, "s": "inf"})).unwrap();
        assert_eq!(s, r#"{"x":1.7320508075688772e0,"n":3,"s":"inf"}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 3f64.sqrt());
    }

    #[test]
    fn floats_that_look_integral_keep_their_digits() {
        assert_eq!(to_string(&json!([1.0, -0.5])).unwrap(), "[1.0000000000000000e0,-5.0000000000000000e-1]");
    }
}
