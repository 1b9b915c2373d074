//! The `.cmat.json` interchange format.
//!
//! A complex scalar travels as a two-element array `[re, im]`, a vector as
//! an array of scalars, and a matrix (or a list of row vectors) as an array
//! of vectors in row-major order.

use serde_json::{json, Value};

use crate::complex::{ComplexMatrix, ComplexVector, C64};
use crate::error::{Error, Result};

fn syntax_error(e: &serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn structural_error(path: &str, message: &str) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: format!("{path}: {message}"),
    }
}

pub fn scalar_from_value(v: &Value, path: &str) -> Result<C64> {
    let pair = v
        .as_array()
        .ok_or_else(|| structural_error(path, "expected a [re, im] pair"))?;
    if pair.len() != 2 {
        return Err(structural_error(path, "expected exactly two components"));
    }
    let mut parts = [0.0; 2];
    for (i, p) in pair.iter().enumerate() {
        parts[i] = p
            .as_f64()
            .ok_or_else(|| structural_error(path, "components must be numbers"))?;
    }
    Ok(C64::new(parts[0], parts[1]))
}

pub fn vector_from_value(v: &Value, path: &str) -> Result<ComplexVector> {
    let entries = v
        .as_array()
        .ok_or_else(|| structural_error(path, "expected an array of scalars"))?;
    if entries.is_empty() {
        return Err(structural_error(path, "vector must be nonempty"));
    }
    let mut data = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        data.push(scalar_from_value(e, &format!("{path}[{i}]"))?);
    }
    ComplexVector::new(data)
}

/// Parses a list of row vectors of equal length; not necessarily square.
pub fn parse_rows(text: &str) -> Result<Vec<ComplexVector>> {
    let v: Value = serde_json::from_str(text).map_err(|e| syntax_error(&e))?;
    let rows_value = v
        .as_array()
        .ok_or_else(|| structural_error("$", "expected an array of rows"))?;
    if rows_value.is_empty() {
        return Err(structural_error("$", "need at least one row"));
    }
    let mut rows = Vec::with_capacity(rows_value.len());
    for (i, r) in rows_value.iter().enumerate() {
        rows.push(vector_from_value(r, &format!("$[{i}]"))?);
    }
    let dim = rows[0].dim();
    if rows.iter().any(|r| r.dim() != dim) {
        return Err(structural_error("$", "rows must all have the same length"));
    }
    Ok(rows)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let rows = parse_rows(text)?;
    if rows.len() != rows[0].dim() {
        return Err(structural_error("$", "matrix must be square"));
    }
    ComplexMatrix::new(rows.into_iter().map(|r| r.as_slice().to_vec()).collect())
}

pub fn parse_vector(text: &str) -> Result<ComplexVector> {
    let v: Value = serde_json::from_str(text).map_err(|e| syntax_error(&e))?;
    vector_from_value(&v, "$")
}

pub fn scalar_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_value(x: &ComplexVector) -> Value {
    Value::Array(x.iter().map(|&z| scalar_to_value(z)).collect())
}

pub fn rows_to_value(rows: &[ComplexVector]) -> Value {
    Value::Array(rows.iter().map(vector_to_value).collect())
}

pub fn matrix_to_value(a: &ComplexMatrix) -> Value {
    Value::Array(
        (0..a.n())
            .map(|i| {
                Value::Array(a.row(i).iter().map(|&z| scalar_to_value(z)).collect())
            })
            .collect(),
    )
}

pub fn read_rows(path: &std::path::Path) -> Result<Vec<ComplexVector>> {
    parse_rows(&std::fs::read_to_string(path)?)
}

pub fn read_matrix(path: &std::path::Path) -> Result<ComplexMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}
