use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::index::{binomial, index_position, index_sets, merge};

/// Scalars a constant form may carry.
pub trait FormScalar: Num + Copy + Neg<Output = Self> + From<f64> + Debug {
    fn modulus(self) -> f64;
}

impl FormScalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl FormScalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// A constant-coefficient exterior form on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantForm<T = f64> {
    dim: usize,
    degree: usize,
    coeffs: Vec<T>,
}

pub type ComplexForm = ConstantForm<Complex64>;

impl<T: FormScalar> ConstantForm<T> {
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if degree > dim {
            return Err(Error::Degree(format!("degree {degree} exceeds dimension {dim}")));
        }
        Ok(Self {
            dim,
            degree,
            coeffs: vec![T::zero(); binomial(dim, degree)],
        })
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<T>) -> Result<Self> {
        let expect = binomial(dim, degree);
        if degree > dim || coeffs.len() != expect {
            return Err(Error::Degree(format!(
                "degree {degree} form on R^{dim} needs {expect} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { dim, degree, coeffs })
    }

    /// `c * dx^{i_1} ^ ... ^ dx^{i_k}` for an arbitrary (not necessarily sorted) index list.
    pub fn monomial(dim: usize, indices: &[usize], c: T) -> Result<Self> {
        let mut f = Self::zero(dim, indices.len())?;
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::Dimension(format!("index out of range in {indices:?}")));
        }
        if let Some(sign) = crate::index::sort_sign(indices) {
            let mut sorted = indices.to_vec();
            sorted.sort_unstable();
            f.coeffs[index_position(dim, &sorted)] = c * T::from(sign);
        }
        Ok(f)
    }

    /// The 1-form with the given covector components.
    pub fn covector(components: &[T]) -> Self {
        Self {
            dim: components.len(),
            degree: 1,
            coeffs: components.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, set: &[usize]) -> T {
        self.coeffs[index_position(self.dim, set)]
    }

    /// The single coefficient of a top-degree form.
    pub fn top(&self) -> Option<T> {
        (self.degree == self.dim).then(|| self.coeffs[0])
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.modulus()))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Degree(format!(
                "forms of (dim, degree) ({}, {}) and ({}, {})",
                self.dim, self.degree, other.dim, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "wedge on R^{} and R^{}",
                self.dim, other.dim
            )));
        }
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.dim, degree)?;
        let sa = index_sets(self.dim, self.degree);
        let sb = index_sets(self.dim, other.degree);
        for (i, a) in sa.iter().enumerate() {
            if self.coeffs[i] == T::zero() {
                continue;
            }
            for (j, b) in sb.iter().enumerate() {
                if other.coeffs[j] == T::zero() {
                    continue;
                }
                if let Some((k, sign)) = merge(a, b) {
                    let pos = index_position(self.dim, &k);
                    out.coeffs[pos] = out.coeffs[pos] + self.coeffs[i] * other.coeffs[j] * T::from(sign);
                }
            }
        }
        Ok(out)
    }

    /// Wedge power `self ^ ... ^ self` (`k` factors; `k = 0` gives the constant 1).
    pub fn power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::from_coeffs(self.dim, 0, vec![T::one()])?;
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Wedge that returns the zero form instead of failing when the degree
    /// would exceed the dimension.
    pub fn wedge_or_zero(&self, other: &Self) -> Result<Option<Self>> {
        if self.degree + other.degree > self.dim {
            return Ok(None);
        }
        self.wedge(other).map(Some)
    }

    /// Interior product with a real vector.
    pub fn interior(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector of length {} on R^{}",
                v.len(),
                self.dim
            )));
        }
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out = Self::zero(self.dim, self.degree - 1)?;
        for (i, set) in index_sets(self.dim, self.degree).iter().enumerate() {
            let c = self.coeffs[i];
            if c == T::zero() {
                continue;
            }
            for (slot, &axis) in set.iter().enumerate() {
                if v[axis] == 0.0 {
                    continue;
                }
                let mut rest = set.clone();
                rest.remove(slot);
                let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                let pos = index_position(self.dim, &rest);
                out.coeffs[pos] = out.coeffs[pos] + c * T::from(sign * v[axis]);
            }
        }
        Ok(out)
    }

    /// Pull back along the linear map `x -> map * x` from `R^{map.ncols()}`.
    pub fn pullback(&self, map: &DMatrix<f64>) -> Result<Self> {
        if map.nrows() != self.dim {
            return Err(Error::Dimension(format!(
                "pullback through a {}x{} map of a form on R^{}",
                map.nrows(),
                map.ncols(),
                self.dim
            )));
        }
        let src_dim = map.ncols();
        let mut out = Self::zero(src_dim, self.degree)?;
        let targets = index_sets(self.dim, self.degree);
        for (r, cols) in index_sets(src_dim, self.degree).iter().enumerate() {
            let mut acc = T::zero();
            for (i, rows) in targets.iter().enumerate() {
                let c = self.coeffs[i];
                if c == T::zero() {
                    continue;
                }
                let minor = if rows.is_empty() {
                    1.0
                } else {
                    DMatrix::from_fn(rows.len(), cols.len(), |a, b| map[(rows[a], cols[b])]).determinant()
                };
                acc = acc + c * T::from(minor);
            }
            out.coeffs[r] = acc;
        }
        Ok(out)
    }

    /// Evaluate on `k` vectors (the columns of `vectors`).
    pub fn evaluate(&self, vectors: &DMatrix<f64>) -> Result<T> {
        if vectors.ncols() != self.degree {
            return Err(Error::Degree(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vectors.ncols()
            )));
        }
        Ok(self.pullback(vectors)?.coeffs[0])
    }
}

impl ConstantForm<Complex64> {
    pub fn from_parts(re: &ConstantForm<f64>, im: &ConstantForm<f64>) -> Result<Self> {
        re.check_same(im)?;
        Ok(Self {
            dim: re.dim,
            degree: re.degree,
            coeffs: re
                .coeffs
                .iter()
                .zip(&im.coeffs)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        })
    }

    pub fn re(&self) -> ConstantForm<f64> {
        ConstantForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.re).collect(),
        }
    }

    pub fn im(&self) -> ConstantForm<f64> {
        ConstantForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.im).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

impl ConstantForm<f64> {
    pub fn complexify(&self) -> ComplexForm {
        ConstantForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_of_area_form() {
        // i(d/dy)(dx ^ dy) = -dx
        let w = ConstantForm::monomial(2, &[0, 1], 1.0).unwrap();
        let c = w.interior(&[0.0, 1.0]).unwrap();
        assert_eq!(c.coeffs(), &[-1.0, 0.0]);
    }

    #[test]
    fn pullback_matches_evaluation() {
        let w = ConstantForm::monomial(3, &[0, 2], 2.0)
            .unwrap()
            .add(&ConstantForm::monomial(3, &[1, 2], -1.0).unwrap())
            .unwrap();
        let p = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, 0.5, 3.0]);
        // direct: w(u, v) = 2 (u0 v2 - u2 v0) - (u1 v2 - u2 v1)
        let (u, v) = (p.column(0), p.column(1));
        let direct = 2.0 * (u[0] * v[2] - u[2] * v[0]) - (u[1] * v[2] - u[2] * v[1]);
        let pb = w.pullback(&p).unwrap();
        assert!((pb.coeffs()[0] - direct).abs() < 1e-14);
        assert!((w.evaluate(&p).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn power_of_symplectic_form() {
        let mut w = ConstantForm::<f64>::zero(4, 2).unwrap();
        for j in 0..2 {
            w = w.add(&ConstantForm::monomial(4, &[j, j + 2], 1.0).unwrap()).unwrap();
        }
        // (dx1^dy1 + dx2^dy2)^2 = 2 dx1^dy1^dx2^dy2 = -2 dx1^dx2^dy1^dy2
        assert_eq!(w.power(2).unwrap().top(), Some(-2.0));
    }
}
