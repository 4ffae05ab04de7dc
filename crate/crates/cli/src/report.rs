//! Report values: tagged numbers and the two renderings.

use std::str::FromStr;

use ratekit::exact::Rational;
use ratekit::interval::short;
use ratekit::ExtendedReal;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA: &str = "ratekit-report/1";

/// Exact rational, e.g. `{"exact": "1/2"}`.
pub fn exact(r: &Rational) -> Value {
    json!({ "exact": short(r) })
}

pub fn exact_vec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(exact).collect())
}

/// Floating value with 17 significant digits and the tolerance it was
/// computed to; infinities become strings.
pub fn float(x: f64, tol: f64) -> Value {
    let v = if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("valid JSON number"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("+inf".into())
    } else {
        Value::String("-inf".into())
    };
    json!({ "float": v, "tol": tol })
}

pub fn float_vec(v: &[f64], tol: f64) -> Value {
    Value::Array(v.iter().map(|&x| float(x, tol)).collect())
}

pub fn extended(x: &ExtendedReal, tol: f64) -> Value {
    float(x.to_f64(), tol)
}

pub fn document(command: &[String], path: &str, sha256: &str, status: &str, body: (&str, Value)) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), json!(command));
    m.insert("spec".into(), json!({ "path": path, "sha256": sha256 }));
    m.insert("status".into(), status.into());
    m.insert(body.0.into(), body.1);
    Value::Object(m)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("—".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) => {
            if let (Some(e), 1) = (m.get("exact"), m.len()) {
                return scalar(e);
            }
            if let (Some(f), Some(t)) = (m.get("float"), m.get("tol")) {
                return Some(format!("{} (±{})", scalar(f)?, scalar(t)?));
            }
            None
        }
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) if a.iter().all(|x| scalar(x).is_some() && !x.is_array()) && a.len() <= 4 => {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("({})", parts.join(", ")))
        }
        Value::Array(_) => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        rows.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, rows);
            }
        }
        Value::Array(a) => {
            if a.is_empty() {
                rows.push((prefix.to_string(), "[]".into()));
            }
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// Two-column table of dotted paths and values.
pub fn render_text(doc: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", doc, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        out.push_str(&k);
        out.push_str(&" ".repeat(pad + 2));
        out.push_str(&v);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = float(0.1, 1e-8);
        assert_eq!(v["float"].to_string(), "1.0000000000000001e-1");
        let back: f64 = v["float"].to_string().parse().unwrap();
        assert_eq!(back, 0.1);
        assert_eq!(float(f64::INFINITY, 0.0)["float"], "+inf");
    }

    #[test]
    fn text_table() {
        let doc = json!({"a": {"exact": "1/2"}, "b": [{"x": true}]});
        assert_eq!(render_text(&doc), "a       1/2\nb[0].x  true\n");
    }
}
