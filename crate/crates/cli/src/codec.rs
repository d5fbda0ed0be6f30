//! JSON encoding of scalars, vectors and matrices.

use mvlab_core::scalar::{format_rational, parse_rational, rational};
use mvlab_core::{Field, Gaussian, Mat};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::CliError;

/// A scalar type with a JSON representation.
pub trait Codec: Field {
    fn decode(v: &Value) -> Result<Self, CliError>;
    fn encode(&self) -> Value;
}

fn parse_err(what: &str, v: &Value) -> CliError {
    CliError::Parse(format!("expected {what}, found {v}"))
}

fn decode_rational(v: &Value) -> Result<mvlab_core::Rational, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(parse_err("a rational number", v)),
    };
    parse_rational(&text).map_err(|e| CliError::Parse(e.to_string()))
}

impl Codec for Gaussian {
    fn decode(v: &Value) -> Result<Self, CliError> {
        match v {
            Value::Object(m) => {
                if m.keys().any(|k| k != "re" && k != "im") {
                    return Err(parse_err("an object with keys re, im", v));
                }
                let part = |k: &str| m.get(k).map(decode_rational).unwrap_or(Ok(rational(0, 1)));
                Ok(Gaussian::new(part("re")?, part("im")?))
            }
            _ => decode_rational(v).map(Gaussian::real),
        }
    }

    fn encode(&self) -> Value {
        if self.is_real() {
            Value::String(format_rational(&self.re))
        } else {
            json!({ "re": format_rational(&self.re), "im": format_rational(&self.im) })
        }
    }
}

impl Codec for f64 {
    fn decode(v: &Value) -> Result<Self, CliError> {
        let x = match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| parse_err("a finite number", v))?,
            Value::String(s) => match s.parse::<f64>() {
                Ok(x) => x,
                Err(_) => decode_rational(v)?.to_c64().re,
            },
            _ => return Err(parse_err("a number", v)),
        };
        if !x.is_finite() {
            return Err(parse_err("a finite number", v));
        }
        Ok(x)
    }

    fn encode(&self) -> Value {
        json!(self)
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn vector<F: Codec>(v: &Value, len: usize) -> Result<Vec<F>, CliError> {
    let items = v.as_array().ok_or_else(|| parse_err("an array", v))?;
    if items.len() != len {
        return Err(CliError::Parse(format!("expected {len} entries, found {}", items.len())));
    }
    items.iter().map(F::decode).collect()
}

pub fn matrix<F: Codec>(v: &Value, rows: usize, cols: usize) -> Result<Mat<F>, CliError> {
    let items = v.as_array().ok_or_else(|| parse_err("an array of rows", v))?;
    if items.len() != rows {
        return Err(CliError::Parse(format!("expected {rows} rows, found {}", items.len())));
    }
    let data = items.iter().map(|r| vector::<F>(r, cols)).collect::<Result<Vec<_>, _>>()?;
    Ok(Mat::from_fn(rows, cols, |r, c| data[r][c].clone()))
}

pub fn list<T>(v: &Value, item: impl Fn(&Value) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    v.as_array().ok_or_else(|| parse_err("an array", v))?.iter().map(item).collect()
}

pub fn encode_vec<F: Codec>(v: &[F]) -> Value {
    Value::Array(v.iter().map(Codec::encode).collect())
}

pub fn encode_mat<F: Codec>(m: &Mat<F>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| encode_vec(r)).collect())
}
