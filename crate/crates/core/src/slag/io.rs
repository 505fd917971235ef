//! Family files. Either a shorthand string (`"std:2"`, `"tilt:1:3"`) or
//! `{"model": "std:n" | <path> | {..model..}, "P": [[..]], "Q": [[..]], "r": [..], "phase": "auto" | radians}`
//! with matrices given row by row. A missing `phase` means 0; a missing `r` means 0.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::Value;

use super::family::{AffineSLagFamily, Phase};
use crate::cy::{FlatCalabiYauModel, ModelSpec};
use crate::error::{Error, Result};

/// Fully expanded family description, as echoed into reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FamilySpec {
    pub model: ModelSpec,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    pub phase: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

impl FamilySpec {
    pub fn from_family(fam: &AffineSLagFamily) -> Self {
        Self {
            model: ModelSpec::from_model(fam.base_model()),
            p: rows(fam.fiber_frame()),
            q: rows(fam.moduli_frame()),
            r: fam.offset().iter().copied().collect(),
            phase: fam.phase(),
        }
    }
}

fn parse_shorthand(s: &str) -> Result<AffineSLagFamily> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Input(format!("unknown family shorthand {s:?} (expected std:n or tilt:1:k)"));
    match parts.as_slice() {
        ["std", n] => AffineSLagFamily::standard(n.parse().map_err(|_| bad())?),
        ["tilt", "1", k] => AffineSLagFamily::tilt(k.parse().map_err(|_| bad())?),
        _ => Err(bad()),
    }
}

/// A model from `"std:n"`, a model file path (relative to `base_dir`) or an inline object.
pub fn model_from_value(v: &Value, base_dir: Option<&Path>) -> Result<FlatCalabiYauModel> {
    match v {
        Value::String(s) if s.starts_with("std:") => {
            let n = s[4..]
                .parse()
                .map_err(|_| Error::Input(format!("bad model shorthand {s:?}")))?;
            FlatCalabiYauModel::standard(n)
        }
        Value::String(path) => {
            let full = match base_dir {
                Some(d) => d.join(path),
                None => Path::new(path).to_path_buf(),
            };
            crate::cy::model_from_json(&std::fs::read_to_string(full)?)
        }
        Value::Object(_) => {
            let spec: ModelSpec = serde_json::from_value(v.clone())?;
            spec.to_model()
        }
        _ => Err(Error::Input("\"model\" must be a shorthand, a path or an object".into())),
    }
}

fn parse_matrix(v: Option<&Value>, name: &str, nrows: usize) -> Result<DMatrix<f64>> {
    let v = v.ok_or_else(|| Error::Input(format!("family is missing {name:?}")))?;
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone())
        .map_err(|e| Error::Input(format!("{name}: {e}")))?;
    if rows.len() != nrows {
        return Err(Error::Input(format!("{name} has {} rows, expected {nrows}", rows.len())));
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Input(format!("{name} rows must be non-empty and equally long")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Build a family from a parsed JSON value; relative model paths resolve against `base_dir`.
pub fn family_from_value(v: &Value, base_dir: Option<&Path>) -> Result<AffineSLagFamily> {
    match v {
        Value::String(s) => parse_shorthand(s),
        Value::Object(obj) => {
            let model = model_from_value(
                obj.get("model")
                    .ok_or_else(|| Error::Input("family is missing \"model\"".into()))?,
                base_dir,
            )?;
            let d = model.real_dim();
            let p = parse_matrix(obj.get("P"), "P", d)?;
            let q = parse_matrix(obj.get("Q"), "Q", d)?;
            let r = match obj.get("r") {
                None => DVector::zeros(d),
                Some(r) => {
                    let r: Vec<f64> = serde_json::from_value(r.clone())
                        .map_err(|e| Error::Input(format!("r: {e}")))?;
                    DVector::from_vec(r)
                }
            };
            let phase = match obj.get("phase") {
                None => Phase::Fixed(0.0),
                Some(Value::String(s)) if s == "auto" => Phase::Auto,
                Some(Value::Number(x)) => Phase::Fixed(x.as_f64().unwrap_or(0.0)),
                Some(other) => return Err(Error::Input(format!("bad phase {other}"))),
            };
            AffineSLagFamily::new(model, p, q, r, phase)
        }
        _ => Err(Error::Input("family must be a shorthand string or an object".into())),
    }
}

pub fn family_from_json(text: &str, base_dir: Option<&Path>) -> Result<AffineSLagFamily> {
    family_from_value(&serde_json::from_str(text)?, base_dir)
}

pub fn family_to_json(fam: &AffineSLagFamily) -> Result<String> {
    Ok(serde_json::to_string_pretty(&FamilySpec::from_family(fam))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        let f = family_from_json("\"tilt:1:2\"", None).unwrap();
        assert_eq!(f.fiber_frame()[(1, 0)], 2.0);
        assert_eq!(family_from_json("\"std:3\"", None).unwrap().n(), 3);
        assert!(family_from_json("\"tilt:2:1\"", None).is_err());
    }

    #[test]
    fn object_form_round_trips_through_expanded_spec() {
        let text = r#"{"model": "std:1", "P": [[1], [2]], "Q": [[0], [1]], "phase": "auto"}"#;
        let f = family_from_json(text, None).unwrap();
        let again = family_from_json(&family_to_json(&f).unwrap(), None).unwrap();
        assert!((again.phase() - f.phase()).abs() < 1e-15);
        assert_eq!(again.fiber_frame(), f.fiber_frame());
    }
}
