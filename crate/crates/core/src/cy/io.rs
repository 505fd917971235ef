//! JSON model files:
//! `{"n": 2, "lattice": [[..], ..], "omega": {"degree": 2, "coeffs": {"1,3": 1.0}}, ..}`.
//! Lattice rows are matrix rows; the lattice vectors are its columns.
//! Index tuples are 1-based and may be given in any order (the sign of the
//! sorting permutation is applied).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::constant::ConstantForm;
use super::model::FlatCalabiYauModel;
use crate::error::{Error, Result};
use crate::index::{index_sets, label};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormSpec {
    pub degree: usize,
    pub coeffs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelSpec {
    pub n: usize,
    pub lattice: Vec<Vec<f64>>,
    pub omega: FormSpec,
    pub omega1: FormSpec,
    pub omega2: FormSpec,
}

impl FormSpec {
    pub fn from_form(form: &ConstantForm) -> Self {
        let coeffs = index_sets(form.dim(), form.degree())
            .iter()
            .zip(form.coeffs())
            .filter(|(_, c)| **c != 0.0)
            .map(|(s, c)| (label(s), *c))
            .collect();
        Self {
            degree: form.degree(),
            coeffs,
        }
    }

    pub fn to_form(&self, dim: usize) -> Result<ConstantForm> {
        let mut f = ConstantForm::zero(dim, self.degree)?;
        for (key, &c) in &self.coeffs {
            let idx: Vec<usize> = key
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Input(format!("bad index tuple {key:?}")))?;
            if idx.len() != self.degree || idx.iter().any(|&i| i == 0 || i > dim) {
                return Err(Error::Input(format!(
                    "index tuple {key:?} invalid for a degree {} form on R^{dim}",
                    self.degree
                )));
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            f = f.add(&ConstantForm::monomial(dim, &zero_based, c)?)?;
        }
        Ok(f)
    }
}

impl ModelSpec {
    pub fn from_model(model: &FlatCalabiYauModel) -> Self {
        let l = model.lattice();
        Self {
            n: model.n(),
            lattice: (0..l.nrows()).map(|r| l.row(r).iter().copied().collect()).collect(),
            omega: FormSpec::from_form(model.omega()),
            omega1: FormSpec::from_form(model.omega1()),
            omega2: FormSpec::from_form(model.omega2()),
        }
    }

    pub fn to_model(&self) -> Result<FlatCalabiYauModel> {
        let d = 2 * self.n;
        if self.lattice.len() != d || self.lattice.iter().any(|r| r.len() != d) {
            return Err(Error::Input(format!("lattice must be {d}x{d}")));
        }
        let lattice = DMatrix::from_fn(d, d, |r, c| self.lattice[r][c]);
        for (name, spec, deg) in [
            ("omega", &self.omega, 2),
            ("omega1", &self.omega1, self.n),
            ("omega2", &self.omega2, self.n),
        ] {
            if spec.degree != deg {
                return Err(Error::Input(format!(
                    "{name} declared degree {}, expected {deg}",
                    spec.degree
                )));
            }
        }
        FlatCalabiYauModel::new(
            self.n,
            lattice,
            self.omega.to_form(d)?,
            self.omega1.to_form(d)?,
            self.omega2.to_form(d)?,
        )
    }
}

pub fn model_from_json(text: &str) -> Result<FlatCalabiYauModel> {
    let spec: ModelSpec = serde_json::from_str(text)?;
    spec.to_model()
}

pub fn model_to_json(model: &FlatCalabiYauModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelSpec::from_model(model))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_standard() {
        for n in 1..=3 {
            let m = FlatCalabiYauModel::standard(n).unwrap();
            let back = model_from_json(&model_to_json(&m).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn unsorted_key_picks_up_sign() {
        let spec = FormSpec {
            degree: 2,
            coeffs: [("3,1".to_string(), 1.0)].into_iter().collect(),
        };
        assert_eq!(spec.to_form(4).unwrap().coeff(&[0, 2]), -1.0);
    }

    #[test]
    fn rejects_bad_degree() {
        let m = FlatCalabiYauModel::standard(2).unwrap();
        let mut spec = ModelSpec::from_model(&m);
        spec.omega1.degree = 3;
        assert!(matches!(spec.to_model(), Err(Error::Input(_))));
    }
}
