use nalgebra::DMatrix;
use num_complex::Complex64;

use super::constant::ComplexForm;
use crate::error::{Error, Result};
use crate::index::binomial;

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_TOL: f64 = 1e-10;

/// Null space of `theta -> omega_c ^ theta` on complex covectors.
#[derive(Debug, Clone)]
pub struct Annihilator {
    /// Orthonormal complex covectors spanning the null space.
    pub basis: Vec<Vec<Complex64>>,
    /// All singular values of the wedge map, largest first.
    pub singular_values: Vec<f64>,
    /// Largest relative singular value among the accepted null directions
    /// (0 when the null space is empty).
    pub residual: f64,
}

impl Annihilator {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Basis of the covectors `theta` with `omega_c ^ theta = 0`, from a complex SVD
/// of the wedge map. `rank_tol` is relative to the largest singular value.
pub fn annihilator_space(omega_c: &ComplexForm, rank_tol: f64) -> Result<Annihilator> {
    let d = omega_c.dim();
    let k = omega_c.degree();
    if k + 1 > d {
        return Err(Error::Degree(format!(
            "annihilator of a top-degree form on R^{d} is everything"
        )));
    }
    if omega_c.norm_inf() == 0.0 {
        return Err(Error::Degenerate("annihilator of the zero form".into()));
    }
    let rows = binomial(d, k + 1);
    // Pad with zero rows: the thin SVD only yields d right singular vectors
    // when there are at least d rows.
    let mut m = DMatrix::<Complex64>::zeros(rows.max(d), d);
    for j in 0..d {
        let mut e = vec![Complex64::new(0.0, 0.0); d];
        e[j] = Complex64::new(1.0, 0.0);
        let w = omega_c.wedge(&ComplexForm::covector(&e))?;
        for (r, c) in w.coeffs().iter().enumerate() {
            m[(r, j)] = *c;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let mut basis = Vec::new();
    let mut residual: f64 = 0.0;
    for (i, &s) in sigma.iter().enumerate() {
        if s <= rank_tol * smax {
            basis.push(v_t.row(i).iter().map(|z| z.conj()).collect());
            residual = residual.max(s / smax);
        }
    }
    let mut sorted = sigma;
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(Annihilator {
        basis,
        singular_values: sorted,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cy::model::{dz, holomorphic_volume};

    #[test]
    fn decomposable_form_has_full_annihilator() {
        let w = holomorphic_volume(2).unwrap();
        let a = annihilator_space(&w, RANK_TOL).unwrap();
        assert_eq!(a.dimension(), 2);
        for theta in &a.basis {
            let t = ComplexForm::covector(theta);
            assert!(w.wedge(&t).unwrap().norm_inf() < 1e-12);
        }
    }

    #[test]
    fn sum_with_conjugate_has_no_annihilator() {
        let w = holomorphic_volume(2).unwrap();
        let both = w.add(&w.conj()).unwrap();
        assert_eq!(annihilator_space(&both, RANK_TOL).unwrap().dimension(), 0);
    }

    #[test]
    fn mixed_type_is_real_decomposable() {
        // dz1^dz2 + dz1^conj(dz2) = 2 dz1^dx2, annihilated by dz1 and dx2
        let a = dz(2, 0).wedge(&dz(2, 1)).unwrap();
        let b = dz(2, 0).wedge(&dz(2, 1).conj()).unwrap();
        let ann = annihilator_space(&a.add(&b).unwrap(), RANK_TOL).unwrap();
        assert_eq!(ann.dimension(), 2);
        let probe = |t: &[Complex64]| {
            ann.basis.iter().map(|v| v.iter().zip(t).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()).sum::<f64>()
        };
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let dz1 = [one, zero, Complex64::i(), zero];
        let dx2 = [zero, one, zero, zero];
        // both lie in the span: projection norm equals their own norm
        assert!((probe(&dz1) - 2.0).abs() < 1e-12);
        assert!((probe(&dx2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_form_is_degenerate() {
        let z = ComplexForm::zero(4, 2).unwrap();
        assert!(matches!(annihilator_space(&z, RANK_TOL), Err(Error::Degenerate(_))));
    }
}
