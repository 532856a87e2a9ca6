//! Parsing and rendering of cover elements for the `sl2` subcommands.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde_json::{json, Value};

use sublorentz::sl2cover::{CoverElement, TangentVector};

use crate::CliError;

fn triple(what: &str, s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("{what}: expected three comma-separated numbers or JSON, got {s:?}")));
    }
    let mut out = [0.0_f64; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| CliError::Usage(format!("{what}: {p:?} is not a number")))?;
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("{what}: components must be finite")));
    }
    Ok(out)
}

/// `"c,re,im"` or `{"c":..,"w":[re,im]}`.
pub fn parse_cover_element(s: &str) -> Result<CoverElement, CliError> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| CliError::Usage(format!("cover element: {e}")));
    }
    let [c, re, im] = triple("cover element", s)?;
    Ok(CoverElement::new(c, Complex64::new(re, im)))
}

/// `"xi,re,im"` or `{"xi":..,"zeta":[re,im]}`.
pub fn parse_tangent(s: &str) -> Result<TangentVector, CliError> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| CliError::Usage(format!("tangent vector: {e}")));
    }
    let [xi, re, im] = triple("tangent vector", s)?;
    Ok(TangentVector::new(xi, Complex64::new(re, im)))
}

pub fn cover_json(g: &CoverElement) -> Value {
    json!({ "c": g.c, "w": [g.w.re, g.w.im] })
}

pub fn tangent_json(v: &TangentVector) -> Value {
    json!({ "xi": v.xi, "zeta": [v.zeta.re, v.zeta.im] })
}

/// Rows of complex entries as `[re, im]` pairs.
pub fn matrix_json(m: &Matrix2<Complex64>) -> Value {
    let e = |i, j| {
        let z: Complex64 = m[(i, j)];
        json!([z.re, z.im])
    };
    json!({ "matrix": [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] })
}

/// One `key: value` line per top-level field.
pub fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
        other => format!("{other}\n"),
    }
}
