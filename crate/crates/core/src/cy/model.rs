use nalgebra::DMatrix;
use num_complex::Complex64;

use super::annihilator::annihilator_space;
use super::constant::{ComplexForm, ConstantForm};
use crate::error::{Error, Result};

/// Largest complex dimension supported; all exterior algebra stays exhaustive.
pub const MAX_COMPLEX_DIM: usize = 3;

/// A flat Calabi-Yau model: constant forms `omega`, `Omega_1`, `Omega_2` on
/// `R^{2n}` together with a lattice (columns of `lattice`).
///
/// Coordinates are ordered `(x_1, .., x_n, y_1, .., y_n)` with `z_j = x_j + i y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatCalabiYauModel {
    n: usize,
    lattice: DMatrix<f64>,
    omega: ConstantForm,
    omega1: ConstantForm,
    omega2: ConstantForm,
}

impl FlatCalabiYauModel {
    pub fn new(
        n: usize,
        lattice: DMatrix<f64>,
        omega: ConstantForm,
        omega1: ConstantForm,
        omega2: ConstantForm,
    ) -> Result<Self> {
        if n == 0 || n > MAX_COMPLEX_DIM {
            return Err(Error::Input(format!(
                "complex dimension {n} outside 1..={MAX_COMPLEX_DIM}"
            )));
        }
        let d = 2 * n;
        for (name, f, deg) in [("omega", &omega, 2), ("omega1", &omega1, n), ("omega2", &omega2, n)] {
            if f.dim() != d || f.degree() != deg {
                return Err(Error::Input(format!(
                    "{name} has degree {} on R^{}, expected degree {deg} on R^{d}",
                    f.degree(),
                    f.dim()
                )));
            }
        }
        if lattice.nrows() != d || lattice.ncols() != d {
            return Err(Error::Input(format!("lattice must be {d}x{d}")));
        }
        if lattice.determinant().abs() < 1e-12 {
            return Err(Error::Degenerate("lattice basis is not invertible".into()));
        }
        Ok(Self {
            n,
            lattice,
            omega,
            omega1,
            omega2,
        })
    }

    /// `omega = sum dx_j ^ dy_j`, `Omega^c = i dz_1 ^ .. ^ dz_n`, lattice `Z^{2n}`.
    pub fn standard(n: usize) -> Result<Self> {
        let d = 2 * n;
        let mut omega = ConstantForm::zero(d, 2)?;
        for j in 0..n {
            omega = omega.add(&ConstantForm::monomial(d, &[j, n + j], 1.0)?)?;
        }
        let omega_c = holomorphic_volume(n)?.scale(Complex64::i());
        Self::new(n, DMatrix::identity(d, d), omega, omega_c.re(), omega_c.im())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn lattice(&self) -> &DMatrix<f64> {
        &self.lattice
    }

    pub fn omega(&self) -> &ConstantForm {
        &self.omega
    }

    pub fn omega1(&self) -> &ConstantForm {
        &self.omega1
    }

    pub fn omega2(&self) -> &ConstantForm {
        &self.omega2
    }

    pub fn omega_c(&self) -> ComplexForm {
        ComplexForm::from_parts(&self.omega1, &self.omega2).expect("validated degrees")
    }

    /// Replace `Omega^c` by `e^{i gamma} Omega^c`.
    pub fn with_phase(&self, gamma: f64) -> Self {
        let rotated = self.omega_c().scale(Complex64::from_polar(1.0, gamma));
        Self {
            omega1: rotated.re(),
            omega2: rotated.im(),
            ..self.clone()
        }
    }

    pub fn with_forms(&self, omega: ConstantForm, omega1: ConstantForm, omega2: ConstantForm) -> Result<Self> {
        Self::new(self.n, self.lattice.clone(), omega, omega1, omega2)
    }

    pub fn with_lattice(&self, lattice: DMatrix<f64>) -> Result<Self> {
        Self::new(self.n, lattice, self.omega.clone(), self.omega1.clone(), self.omega2.clone())
    }

    /// Express the model in new linear coordinates `x = frame * x'`.
    pub fn change_frame(&self, frame: &DMatrix<f64>) -> Result<Self> {
        let inv = frame
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("frame change is singular".into()))?;
        Self::new(
            self.n,
            inv * &self.lattice,
            self.omega.pullback(frame)?,
            self.omega1.pullback(frame)?,
            self.omega2.pullback(frame)?,
        )
    }

    /// The almost complex structure on vectors whose `(1,0)`-forms are the
    /// annihilator of `Omega^c`, so that `theta . J = i theta` on them.
    pub fn complex_structure(&self) -> Result<DMatrix<f64>> {
        let ann = annihilator_space(&self.omega_c(), super::annihilator::RANK_TOL)?;
        let n = self.n;
        if ann.basis.len() != n {
            return Err(Error::Degenerate(format!(
                "Omega^c is not decomposable: annihilator has dimension {}",
                ann.basis.len()
            )));
        }
        let d = 2 * n;
        let theta = DMatrix::from_fn(d, d, |r, c| {
            if r < n {
                ann.basis[r][c]
            } else {
                ann.basis[r - n][c].conj()
            }
        });
        let theta_inv = theta
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("(1,0)-forms and their conjugates are dependent".into()))?;
        let diag = DMatrix::from_fn(d, d, |r, c| {
            if r != c {
                Complex64::new(0.0, 0.0)
            } else if r < n {
                Complex64::i()
            } else {
                -Complex64::i()
            }
        });
        let j = theta_inv * diag * theta;
        Ok(j.map(|z| z.re))
    }

    /// The bilinear form `g(X, Y) = omega(X, J Y)`; positive definite for a
    /// genuine Kahler structure.
    pub fn hermitian_metric(&self) -> Result<DMatrix<f64>> {
        let j = self.complex_structure()?;
        let d = 2 * self.n;
        let w = omega_matrix(&self.omega);
        Ok(DMatrix::from_fn(d, d, |a, b| {
            (0..d).map(|c| w[(a, c)] * j[(c, b)]).sum()
        }))
    }
}

/// Antisymmetric matrix `W_ab = omega(e_a, e_b)` of a constant 2-form.
pub fn omega_matrix(omega: &ConstantForm) -> DMatrix<f64> {
    let d = omega.dim();
    let mut w = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in (a + 1)..d {
            let c = omega.coeff(&[a, b]);
            w[(a, b)] = c;
            w[(b, a)] = -c;
        }
    }
    w
}

/// `dz_j = dx_j + i dy_j` on `R^{2n}`.
pub fn dz(n: usize, j: usize) -> ComplexForm {
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * n];
    c[j] = Complex64::new(1.0, 0.0);
    c[n + j] = Complex64::i();
    ComplexForm::covector(&c)
}

/// `dz_1 ^ .. ^ dz_n`.
pub fn holomorphic_volume(n: usize) -> Result<ComplexForm> {
    let mut acc = dz(n, 0);
    for j in 1..n {
        acc = acc.wedge(&dz(n, j))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_complex_structure_rotates_x_into_y() {
        let m = FlatCalabiYauModel::standard(2).unwrap();
        let j = m.complex_structure().unwrap();
        // J d/dx_1 = d/dy_1
        assert!((j[(2, 0)] - 1.0).abs() < 1e-12);
        assert!((&j * &j + DMatrix::identity(4, 4)).amax() < 1e-12);
        let g = m.hermitian_metric().unwrap();
        assert!((g - DMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn rejects_wrong_degrees() {
        let m = FlatCalabiYauModel::standard(2).unwrap();
        let bad = m.with_forms(m.omega().clone(), ConstantForm::zero(4, 3).unwrap(), m.omega2().clone());
        assert!(matches!(bad, Err(Error::Input(_))));
        assert!(FlatCalabiYauModel::standard(4).is_err());
    }
}
