use serde_json::{json, Value};

use super::matrix::Matrix;
use super::scalar::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Reads a rational from a JSON string ("p/q", integer, decimal) or number.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected a rational, found {other}"))),
    }
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(rational_from_json)
        .collect()
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

/// `{"dim": d, "entries": [["p/q", ...], ...]}`
pub fn matrix_to_json(m: &Matrix<Rational>) -> Value {
    json!({
        "dim": m.dim(),
        "entries": m.rows().iter().map(|r| vector_to_json(r)).collect::<Vec<_>>(),
    })
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix<Rational>> {
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix JSON needs an \"entries\" array".into()))?;
    let rows: Vec<Vec<Rational>> = entries.iter().map(vector_from_json).collect::<Result<_>>()?;
    if let Some(d) = v.get("dim") {
        let d = d.as_u64().ok_or_else(|| Error::Parse("\"dim\" must be an integer".into()))?;
        if d as usize != rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "dim {d} but {} rows",
                rows.len()
            )));
        }
    }
    Matrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::scalar::rat;

    #[test]
    fn round_trip() {
        let m = Matrix::from_rows(vec![vec![rat(1, 2), rat(-3, 1)], vec![rat(0, 1), rat(7, 9)]])
            .unwrap();
        let v = matrix_to_json(&m);
        assert_eq!(v["entries"][0][0], "1/2");
        assert_eq!(matrix_from_json(&v).unwrap(), m);
    }

    #[test]
    fn accepts_numbers_and_rejects_bad_dim() {
        let v: Value = serde_json::from_str(r#"{"dim":2,"entries":[[1,"1/2"],[0.25,0]]}"#).unwrap();
        let m = matrix_from_json(&v).unwrap();
        assert_eq!(m.get(1, 0), &rat(1, 4));
        let bad: Value = serde_json::from_str(r#"{"dim":3,"entries":[[1,0],[0,1]]}"#).unwrap();
        assert!(matrix_from_json(&bad).is_err());
    }
}
