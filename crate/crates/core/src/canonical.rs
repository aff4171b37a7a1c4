//! Canonical JSON: UTF-8, object keys sorted by byte order, no insignificant
//! whitespace. Key ordering does not depend on serde_json's map
//! representation, so enabling `preserve_order` elsewhere cannot change
//! the output.

use serde::Serialize;
use serde_json::Value;

/// Serializes `value` as canonical JSON bytes.
pub fn to_vec<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let v = serde_json::to_value(value)?;
    Ok(value_to_vec(&v))
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    // canonical output is always valid UTF-8
    to_vec(value).map(|b| String::from_utf8(b).expect("serde_json emits UTF-8"))
}

pub fn value_to_vec(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    write_value(&mut out, value);
    out
}

fn write_value(out: &mut Vec<u8>, value: &Value) {
    match value {
        Value::Null | Value::Bool(_) | Value::Number(_) | Value::String(_) => {
            serde_json::to_writer(&mut *out, value).expect("writing to Vec cannot fail");
        }
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(out, item);
            }
            out.push(b']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push(b'{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                serde_json::to_writer(&mut *out, k).expect("writing to Vec cannot fail");
                out.push(b':');
                write_value(out, v);
            }
            out.push(b'}');
        }
    }
}

/// True when `bytes` are exactly the canonical rendering of the JSON they hold.
pub fn is_canonical(bytes: &[u8]) -> bool {
    match serde_json::from_slice::<Value>(bytes) {
        Ok(v) => value_to_vec(&v) == bytes,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorts_keys_and_strips_whitespace() {
        let v = json!({"b": 1, "a": {"z": [1, 2, {"y": null, "x": true}], "c": "s"}});
        assert_eq!(
            String::from_utf8(value_to_vec(&v)).unwrap(),
            r#"{"a":{"c":"s","z":[1,2,{"x":true,"y":null}]},"b":1}"#
        );
    }

    #[test]
    fn keys_sort_by_bytes() {
        let v = json!({"é": 1, "z": 2, "Z": 3, "a_b": 4, "ab": 5});
        assert_eq!(
            String::from_utf8(value_to_vec(&v)).unwrap(),
            r#"{"Z":3,"a_b":4,"ab":5,"z":2,"é":1}"#
        );
    }

    #[test]
    fn escapes_strings() {
        let v = json!({"t": "line\n\"quoted\"\u{1}"});
        assert_eq!(
            String::from_utf8(value_to_vec(&v)).unwrap(),
            r#"{"t":"line\n\"quoted\"\u0001"}"#
        );
    }

    #[test]
    fn detects_non_canonical_input() {
        assert!(is_canonical(br#"{"a":1,"b":2}"#));
        assert!(!is_canonical(br#"{"b":2,"a":1}"#));
        assert!(!is_canonical(br#"{"a": 1}"#));
        assert!(!is_canonical(b"not json"));
    }
}
