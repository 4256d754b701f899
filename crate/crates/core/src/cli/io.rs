//! Curve files, point parsing and JSON encoding for the command line.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::curve::{CurvePoint, PlaneCurve, SpaceCurve};
use crate::error::{Error, Result};
use crate::polyexpr::{parse, parse_complex, C64};
use crate::quadrature::QuadratureResult;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    variables: Vec<String>,
    f: String,
    #[serde(default)]
    g: Option<String>,
    #[serde(default)]
    tolerance: Option<f64>,
}

pub enum LoadedCurve {
    Space(SpaceCurve),
    Plane(PlaneCurve),
}

impl LoadedCurve {
    pub fn space(self) -> Result<SpaceCurve> {
        match self {
            LoadedCurve::Space(c) => Ok(c),
            LoadedCurve::Plane(_) => Err(Error::Invalid(
                "this command needs a space curve (a file with both \"f\" and \"g\")".into(),
            )),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_curve(path: &Path) -> Result<LoadedCurve> {
    let text = read(path)?;
    let file: CurveFile =
        serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let names: Vec<&str> = file.variables.iter().map(String::as_str).collect();
    let f = parse(&file.f, &names)?;
    match (&file.g, names.len()) {
        (Some(g), 3) => {
            let g = parse(g, &names)?;
            let c = SpaceCurve::new(f, g)?;
            Ok(LoadedCurve::Space(match file.tolerance {
                Some(t) => c.with_tolerance(t),
                None => c,
            }))
        }
        (None, 2) => Ok(LoadedCurve::Plane(PlaneCurve::new(f)?)),
        (g, n) => Err(Error::Invalid(format!(
            "a curve file has three variables with \"g\" or two without; got {n} variables and {} \"g\"",
            if g.is_some() { "a" } else { "no" }
        ))),
    }
}

/// Splits at commas outside parentheses.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// A complex number given as `re,im` or as a single literal like `1-2i`.
pub fn parse_scalar(text: &str) -> Result<C64> {
    let parts = split_top(text);
    match parts.as_slice() {
        [z] => parse_complex(z),
        [re, im] => {
            let (re, im) = (parse_complex(re)?, parse_complex(im)?);
            Ok(re + C64::new(0.0, 1.0) * im)
        }
        _ => Err(Error::Invalid(format!("`{text}` is not a complex number"))),
    }
}

/// A point given as three complex literals (`2,-2,-1` or `(1+i),0,2i`) or
/// as six reals `re1,im1,re2,im2,re3,im3`.
pub fn parse_triple(text: &str) -> Result<[C64; 3]> {
    let parts = split_top(text);
    let vals: Vec<C64> = parts.iter().map(|p| parse_complex(p)).collect::<Result<_>>()?;
    match vals.len() {
        3 => Ok([vals[0], vals[1], vals[2]]),
        6 => {
            let i = C64::new(0.0, 1.0);
            Ok([vals[0] + i * vals[1], vals[2] + i * vals[3], vals[4] + i * vals[5]])
        }
        n => Err(Error::Invalid(format!(
            "a point needs 3 complex or 6 real components, got {n}"
        ))),
    }
}

fn scalar_from_json(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::String(s) => parse_complex(s),
        Value::Object(m) => {
            let get = |k: &str| m.get(k).and_then(Value::as_f64).unwrap_or(0.0);
            Ok(C64::new(get("re"), get("im")))
        }
        _ => Err(Error::Invalid(format!("not a complex number: {v}"))),
    }
}

fn triple_from_json(v: &Value) -> Result<[C64; 3]> {
    match v {
        Value::String(s) => parse_triple(s),
        Value::Array(a) if a.len() == 3 => {
            Ok([scalar_from_json(&a[0])?, scalar_from_json(&a[1])?, scalar_from_json(&a[2])?])
        }
        Value::Object(m) if m.contains_key("x") => triple_from_json(&m["x"]),
        _ => Err(Error::Invalid(format!("not a point: {v}"))),
    }
}

/// A JSON array of points; each point is a string triple, an array of
/// three numbers / `{re, im}` objects, or an object with an `"x"` field.
pub fn load_points(path: &Path) -> Result<Vec<[C64; 3]>> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    match v {
        Value::Array(items) => items.iter().map(triple_from_json).collect(),
        _ => Err(Error::Invalid(format!("{}: expected a JSON array of points", path.display()))),
    }
}

/// Validates a user point and Newton-polishes it onto the curve.
pub fn on_curve(c: &SpaceCurve, x: [C64; 3]) -> Result<CurvePoint> {
    let residual = c.residual(&x);
    if residual > 1e-4 {
        return Err(Error::OffCurve { residual });
    }
    let p = c.polish(x)?;
    let moved = (0..3).map(|i| (p.x[i] - x[i]).norm()).fold(0.0, f64::max);
    let scale = 1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if moved > 1e-4 * scale {
        return Err(Error::OffCurve {
            residual: c.residual(&x),
        });
    }
    Ok(p)
}

pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn cx(z: C64) -> Value {
    json!({ "re": real(z.re), "im": real(z.im) })
}

pub fn cxs(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

pub fn point(p: &CurvePoint) -> Value {
    json!({ "x": cxs(&p.x), "residual": real(p.residual) })
}

pub fn quad(q: &QuadratureResult) -> Value {
    json!({
        "value": cx(q.value),
        "est_error": real(q.est_error),
        "nodes_used": q.nodes_used,
        "refinement_depth": q.refinement_depth,
        "converged": q.converged,
    })
}

pub fn error_json(e: &Error) -> Value {
    json!({ "error": { "kind": e.tag(), "detail": e.to_string() } })
}
