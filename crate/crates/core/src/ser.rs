//! Deterministic JSON and CSV emission.
//!
//! Floats are written with 17 significant digits; non-finite values become
//! the strings `"inf"`, `"-inf"` and `"nan"`.

use serde::Serializer;
use serde_json::Value;

/// `serialize_with` helper for fields that may be infinite.
pub fn ext_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&nonfinite(*x))
    }
}

pub fn ext_f64_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => ext_f64(v, s),
        None => s.serialize_none(),
    }
}

fn nonfinite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        nonfinite(x)
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => match (num.as_u64(), num.as_i64()) {
            _ if num.is_f64() => out.push_str(&format_f64(num.as_f64().unwrap_or(f64::NAN))),
            (Some(u), _) => out.push_str(&u.to_string()),
            (None, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&num.to_string()),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serialization")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serialization"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

/// Compact JSON text with fixed float formatting.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

/// Serializes any report with the fixed float formatting.
pub fn report_json<T: serde::Serialize>(x: &T) -> String {
    to_json(&serde_json::to_value(x).expect("report serialization"))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => to_json(other),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), item, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

/// CSV text: an array of objects becomes one row per element, anything else one row.
pub fn to_csv(v: &Value) -> std::result::Result<String, csv::Error> {
    let rows: Vec<Vec<(String, String)>> = match v {
        Value::Array(items) => items
            .iter()
            .map(|item| {
                let mut cells = Vec::new();
                flatten("", item, &mut cells);
                cells
            })
            .collect(),
        other => {
            let mut cells = Vec::new();
            flatten("", other, &mut cells);
            vec![cells]
        }
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|c| c.0.as_str()))?;
    }
    for row in &rows {
        w.write_record(row.iter().map(|c| c.1.as_str()))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_f64(1.5f64.sqrt()), "1.2247448713915889e0");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!(to_json(&json!({"schema": 1, "x": 0.1})), "{\"schema\":1,\"x\":1.0000000000000001e-1}");
    }

    #[test]
    fn parsed_back_exactly() {
        for &x in &[0.1, 1.0 / 3.0, 2.5e-300, 6.02e23, -7.25] {
            let text = format_f64(x);
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_rows_from_array() {
        let v = json!([{"t": 1.0, "k": {"a": "inf"}}, {"t": 2.0, "k": {"a": "x"}}]);
        let text = to_csv(&v).unwrap();
        assert_eq!(text, "t,k.a\n1.0000000000000000e0,inf\n2.0000000000000000e0,x\n");
    }
}
