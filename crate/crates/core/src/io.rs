//! JSON input specs for curves and quadrangles, and finite-only JSON output.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, PlaneCurve, Quadrangle, Result, Tolerances};

/// Random Fourier perturbation applied after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSpec {
    pub magnitude: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Exactly one of `fourier` (listing `c_{-K}..c_K` as `[re, im]` pairs),
/// `circle` (radius) or `ellipse` (semi-axes) must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipse: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

impl CurveSpec {
    pub fn build(&self) -> Result<PlaneCurve> {
        let given = [self.fourier.is_some(), self.circle.is_some(), self.ellipse.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::InvalidCurve("give exactly one of \"fourier\", \"circle\", \"ellipse\"".into()));
        }
        let mut curve = if let Some(c) = &self.fourier {
            PlaneCurve::fourier(c.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())?
        } else if let Some(r) = self.circle {
            PlaneCurve::circle(r)?
        } else {
            let [a, b] = self.ellipse.unwrap_or_default();
            PlaneCurve::ellipse(a, b)?
        };
        if let Some(tol) = self.tolerances {
            tol.validate()?;
            curve = curve.with_tolerances(tol);
        }
        if let Some(p) = self.perturb {
            curve = curve.perturb(p.magnitude, p.seed)?;
        }
        if let Some(name) = &self.name {
            curve = curve.named(name.clone());
        }
        Ok(curve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub points: [[f64; 2]; 4],
}

impl QuadSpec {
    pub fn build(&self, tol: &Tolerances) -> Result<Quadrangle> {
        let [a, b, c, d] = self.points.map(|[re, im]| Complex64::new(re, im));
        Quadrangle::new(a, b, c, d, tol)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed {what} spec: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_curve(text: &str) -> Result<PlaneCurve> {
    parse::<CurveSpec>(text, "curve")?.build()
}

pub fn parse_quad(text: &str, tol: &Tolerances) -> Result<Quadrangle> {
    parse::<QuadSpec>(text, "quadrangle")?.build(tol)
}

pub fn load_curve(path: &Path) -> Result<PlaneCurve> {
    parse_curve(&read(path)?)
}

pub fn load_quad(path: &Path, tol: &Tolerances) -> Result<Quadrangle> {
    parse_quad(&read(path)?, tol)
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    parse(&read(path)?, what)
}

fn find_null(v: &Value, at: &mut String) -> bool {
    match v {
        Value::Null => true,
        Value::Array(items) => items.iter().enumerate().any(|(i, x)| {
            let len = at.len();
            at.push_str(&format!("[{i}]"));
            let hit = find_null(x, at);
            if !hit {
                at.truncate(len);
            }
            hit
        }),
        Value::Object(map) => map.iter().any(|(k, x)| {
            let len = at.len();
            at.push_str(&format!(".{k}"));
            let hit = find_null(x, at);
            if !hit {
                at.truncate(len);
            }
            hit
        }),
        _ => false,
    }
}

/// Pretty JSON with a trailing newline. Output types never serialize
/// `null`, so a null can only come from a non-finite float and is rejected.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    let mut at = String::from("$");
    if find_null(&v, &mut at) {
        return Err(Error::Input(format!("non-finite number in output at {at}")));
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_specs() {
        let c = parse_curve(r#"{"circle": 2.0}"#).unwrap();
        assert!((c.signed_area() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let e = parse_curve(r#"{"ellipse": [2, 1], "name": "e21"}"#).unwrap();
        assert_eq!(e.name(), Some("e21"));
        let f = parse_curve(r#"{"fourier": [[0,0],[0,0],[1,0],[0,0],[0.1,0]]}"#).unwrap();
        assert_eq!(f.degree(), 2);
        let p = parse_curve(r#"{"circle": 1, "perturb": {"magnitude": 0.01, "seed": 3}}"#).unwrap();
        assert!(p.degree() > 1);
    }

    #[test]
    fn bad_curve_specs() {
        assert!(parse_curve(r#"{"circle": 1, "ellipse": [1, 2]}"#).is_err());
        assert!(parse_curve(r#"{}"#).is_err());
        assert!(parse_curve(r#"{"circle": -1}"#).is_err());
        assert!(parse_curve(r#"{"fourier": [[0,0],[1,0]]}"#).is_err());
        assert!(parse_curve(r#"{"circle": 1, "color": "red"}"#).is_err());
        assert!(parse_curve("not json").is_err());
    }

    #[test]
    fn quad_specs() {
        let tol = Tolerances::default();
        assert!(parse_quad(r#"{"points": [[1,0],[0,1],[-1,0],[0,-1]]}"#, &tol).is_ok());
        let err = parse_quad(r#"{"points": [[1,0],[0,1],[-1,0],[0,-2]]}"#, &tol).unwrap_err();
        assert!(matches!(err, Error::NotConcyclic { .. }));
    }

    #[test]
    fn rejects_non_finite_output() {
        assert!(to_json(&[1.0, f64::NAN]).is_err());
        assert!(to_json(&serde_json::json!({"a": [1.0, 2.0]})).unwrap().ends_with("}\n"));
    }
}
