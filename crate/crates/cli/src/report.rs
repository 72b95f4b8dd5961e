//! Deterministic JSON reports.
//!
//! Object keys come out sorted (serde_json's default map is ordered), floats
//! are rounded to 12 significant digits with `-0` folded into `0`, and exact
//! values are printed as canonical decimal or `p/q` strings.

use forestmat::digraph::format_exact;
use forestmat::{Matrix, Scalar};
use num_rational::BigRational;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// A scalar that knows how to appear in a report.
pub trait Emit: Scalar {
    fn emit(&self) -> Value;
}

impl Emit for f64 {
    fn emit(&self) -> Value {
        float(*self)
    }
}

impl Emit for BigRational {
    fn emit(&self) -> Value {
        Value::String(format_exact(self))
    }
}

pub fn round(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(round(x)).map_or(Value::Null, Value::Number)
}

pub fn matrix<T: Emit>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| vector(m.row(r))).collect())
}

pub fn float_matrix(m: &Matrix<f64>) -> Value {
    matrix(m)
}

pub fn vector<T: Emit>(x: &[T]) -> Value {
    Value::Array(x.iter().map(Emit::emit).collect())
}

pub fn bool_matrix(m: &Matrix<bool>) -> Value {
    Value::Array((0..m.rows()).map(|r| json!(m.row(r))).collect())
}

/// 0-based vertex lists to 1-based ids.
pub fn ids(vs: &[usize]) -> Value {
    json!(vs.iter().map(|v| v + 1).collect::<Vec<_>>())
}

pub fn id_groups(groups: &[Vec<usize>]) -> Value {
    Value::Array(groups.iter().map(|g| ids(g)).collect())
}

pub fn digest(canonical: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(canonical.as_bytes())))
}

/// Wraps a command result with the input fingerprint.
pub fn envelope(command: &str, mode: &str, input_kind: &str, canonical: &str, result: Value) -> Value {
    json!({
        "command": command,
        "mode": mode,
        "input": {
            "kind": input_kind,
            "digest": digest(canonical),
            "text": canonical,
        },
        "result": result,
    })
}

pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
