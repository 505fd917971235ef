use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::cy::{ConstantForm, FlatCalabiYauModel};
use crate::error::{Error, Result};
use crate::forms::{FormField, GridTorus, MetricField};

/// How the calibration phase `e^{i gamma}` on `Omega^c` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    /// Rotate so that `Omega^c` restricts to `i |Omega^c(P)|` times the fiber
    /// volume: `Re` vanishes and `Im` is positive on the fiber.
    Auto,
    Fixed(f64),
}

/// Affine torus family `f(s, t) = P s + Q t + r` in a flat model, `s` in `[0,1)^n`.
#[derive(Debug, Clone)]
pub struct AffineSLagFamily {
    base_model: FlatCalabiYauModel,
    model: FlatCalabiYauModel,
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DVector<f64>,
    phase: f64,
}

/// Tolerance for the integrality of fiber frame columns in lattice coordinates.
const LATTICE_TOL: f64 = 1e-9;

impl AffineSLagFamily {
    pub fn new(
        model: FlatCalabiYauModel,
        p: DMatrix<f64>,
        q: DMatrix<f64>,
        r: DVector<f64>,
        phase: Phase,
    ) -> Result<Self> {
        let n = model.n();
        let d = 2 * n;
        if p.nrows() != d || p.ncols() != n {
            return Err(Error::Dimension(format!(
                "fiber frame is {}x{}, expected {d}x{n}",
                p.nrows(),
                p.ncols()
            )));
        }
        if q.nrows() != d {
            return Err(Error::Dimension(format!("moduli frame has {} rows, expected {d}", q.nrows())));
        }
        if q.ncols() != n {
            return Err(Error::Input(format!(
                "moduli dimension {} differs from fiber dimension {n}; period matrices must be square",
                q.ncols()
            )));
        }
        if r.len() != d {
            return Err(Error::Dimension(format!("offset has length {}, expected {d}", r.len())));
        }
        let sv = p.clone().svd(false, false).singular_values;
        if sv.min() <= 1e-10 * sv.max() {
            return Err(Error::Degenerate("fiber frame columns are dependent".into()));
        }
        let coords = model
            .lattice()
            .clone()
            .try_inverse()
            .expect("validated lattice")
            * &p;
        let off = coords.iter().map(|c| (c - c.round()).abs()).fold(0.0, f64::max);
        if off > LATTICE_TOL {
            return Err(Error::Input(format!(
                "fiber frame columns are not lattice vectors (off by {off:e})"
            )));
        }
        let gamma = match phase {
            Phase::Fixed(g) => g,
            Phase::Auto => {
                let z = model.omega_c().evaluate(&p)?;
                if z.norm() < 1e-12 {
                    return Err(Error::Degenerate(
                        "Omega^c vanishes on the fiber; no calibration phase".into(),
                    ));
                }
                FRAC_PI_2 - z.arg()
            }
        };
        Ok(Self {
            model: model.with_phase(gamma),
            base_model: model,
            p,
            q,
            r,
            phase: gamma,
        })
    }

    /// Fibers along the `x` axes moving in the `y` directions.
    pub fn standard(n: usize) -> Result<Self> {
        let model = FlatCalabiYauModel::standard(n)?;
        let d = 2 * n;
        let p = DMatrix::from_fn(d, n, |r, c| if r == c { 1.0 } else { 0.0 });
        let q = DMatrix::from_fn(d, n, |r, c| if r == n + c { 1.0 } else { 0.0 });
        Self::new(model, p, q, DVector::zeros(d), Phase::Fixed(0.0))
    }

    /// Lines of slope `k` in the square 2-torus, translated along `y`.
    pub fn tilt(k: i64) -> Result<Self> {
        let model = FlatCalabiYauModel::standard(1)?;
        let p = DMatrix::from_column_slice(2, 1, &[1.0, k as f64]);
        let q = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        Self::new(model, p, q, DVector::zeros(2), Phase::Auto)
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn m(&self) -> usize {
        self.q.ncols()
    }

    /// The model with the calibration phase applied.
    pub fn model(&self) -> &FlatCalabiYauModel {
        &self.model
    }

    /// The model as given, before the phase rotation.
    pub fn base_model(&self) -> &FlatCalabiYauModel {
        &self.base_model
    }

    pub fn fiber_frame(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn moduli_frame(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.r
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Same fibers, moduli frame replaced.
    pub fn with_moduli_frame(&self, q: DMatrix<f64>) -> Result<Self> {
        Self::new(self.base_model.clone(), self.p.clone(), q, self.r.clone(), Phase::Fixed(self.phase))
    }

    /// Same family with the fiber frame recombined as `P Z^T`, i.e. new loops
    /// `A'_i = sum_k Z_ik A_k`. `Z` must be integral with determinant 1.
    pub fn with_cycle_change(&self, z: &DMatrix<f64>) -> Result<Self> {
        let n = self.n();
        if z.nrows() != n || z.ncols() != n {
            return Err(Error::Dimension(format!("cycle change must be {n}x{n}")));
        }
        if z.iter().any(|v| (v - v.round()).abs() > 1e-12) || (z.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::Input("cycle change must be integral with determinant 1".into()));
        }
        Self::new(
            self.base_model.clone(),
            &self.p * z.transpose(),
            self.q.clone(),
            self.r.clone(),
            Phase::Fixed(self.phase),
        )
    }

    /// Point of the torus `f(s, t)` (not reduced modulo the lattice).
    pub fn point(&self, s: &[f64], t: &[f64]) -> Result<DVector<f64>> {
        self.check_t(t)?;
        if s.len() != self.n() {
            return Err(Error::Dimension(format!("fiber parameter of length {}", s.len())));
        }
        Ok(&self.p * DVector::from_column_slice(s) + &self.q * DVector::from_column_slice(t) + &self.r)
    }

    pub(crate) fn check_t(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.m() {
            return Err(Error::Dimension(format!(
                "moduli point of length {}, expected {}",
                t.len(),
                self.m()
            )));
        }
        Ok(())
    }

    /// `(|omega restricted to L_t|_inf, |Omega_1 restricted to L_t|_inf)`.
    pub fn fiber_restriction_residuals(&self, t: &[f64]) -> Result<(f64, f64)> {
        self.check_t(t)?;
        fiber_restriction_residuals_for(&self.model, &self.p)
    }

    /// `i(Q_j) omega` pulled back to the fiber, as constant coefficients in `s`.
    pub fn theta_coeffs(&self, j: usize) -> Result<ConstantForm> {
        self.model.omega().interior(self.q.column(j).as_slice())?.pullback(&self.p)
    }

    /// `i(Q_j) Omega_1` pulled back to the fiber.
    pub fn phi_coeffs(&self, j: usize) -> Result<ConstantForm> {
        self.model.omega1().interior(self.q.column(j).as_slice())?.pullback(&self.p)
    }

    /// Square fiber grid `[0,1)^n`.
    pub fn fiber_grid(&self, resolution: usize) -> Result<GridTorus> {
        GridTorus::cube(self.n(), resolution)
    }

    /// Induced metric `P^T g P` on the fiber parameters.
    pub fn fiber_metric_matrix(&self) -> Result<DMatrix<f64>> {
        let g = self.model.hermitian_metric()?;
        let gp = self.p.transpose() * g * &self.p;
        Ok((&gp + gp.transpose()) * 0.5)
    }

    pub fn fiber_metric(&self, grid: &GridTorus) -> Result<MetricField> {
        MetricField::uniform(grid.clone(), self.fiber_metric_matrix()?)
    }

    /// The 1-form `theta_j` sampled on the fiber grid (`j` is 0-based).
    pub fn contraction_one_form(&self, t: &[f64], j: usize, grid: &GridTorus) -> Result<FormField> {
        self.check_t(t)?;
        self.check_j(j)?;
        FormField::constant(grid.clone(), 1, self.theta_coeffs(j)?.coeffs())
    }

    /// The `(n-1)`-form `phi_j` sampled on the fiber grid (`j` is 0-based).
    pub fn contraction_nminus1_form(&self, t: &[f64], j: usize, grid: &GridTorus) -> Result<FormField> {
        self.check_t(t)?;
        self.check_j(j)?;
        FormField::constant(grid.clone(), self.n() - 1, self.phi_coeffs(j)?.coeffs())
    }

    /// `Omega_2` restricted to the fiber as a top form.
    pub fn fiber_volume_form(&self, t: &[f64], grid: &GridTorus) -> Result<FormField> {
        self.check_t(t)?;
        FormField::constant(grid.clone(), self.n(), self.model.omega2().pullback(&self.p)?.coeffs())
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j >= self.m() {
            return Err(Error::Dimension(format!("moduli direction {j} of {}", self.m())));
        }
        Ok(())
    }
}

/// Restriction residuals of `omega` and `Omega_1` to the plane spanned by `frame`.
pub fn fiber_restriction_residuals_for(model: &FlatCalabiYauModel, frame: &DMatrix<f64>) -> Result<(f64, f64)> {
    // a form of degree above the fiber dimension restricts to zero
    let restricted = |f: &ConstantForm| -> Result<f64> {
        if f.degree() > frame.ncols() {
            Ok(0.0)
        } else {
            Ok(f.pullback(frame)?.norm_inf())
        }
    };
    Ok((restricted(model.omega())?, restricted(model.omega1())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_fibers_are_special() {
        for n in 1..=3 {
            let f = AffineSLagFamily::standard(n).unwrap();
            assert_eq!(f.fiber_restriction_residuals(&vec![0.3; n]).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn tilted_line_gets_calibrated() {
        for k in 1..=3 {
            let f = AffineSLagFamily::tilt(k).unwrap();
            let (a, b) = f.fiber_restriction_residuals(&[0.1]).unwrap();
            assert!(a < 1e-15 && b < 1e-15, "{a} {b}");
            // e^{i gamma} = (1 - i k)/sqrt(1 + k^2)
            let kk = k as f64;
            assert!((f.phase().tan() + kk).abs() < 1e-12);
            assert!((f.phase().cos() - 1.0 / (1.0 + kk * kk).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn tilting_fiber_by_eps_shows_in_omega() {
        let m = FlatCalabiYauModel::standard(2).unwrap();
        let eps = 0.013;
        let mut p = DMatrix::from_fn(4, 2, |r, c| if r == c { 1.0 } else { 0.0 });
        p[(3, 0)] = eps;
        let (a, _) = fiber_restriction_residuals_for(&m, &p).unwrap();
        assert!((a - eps).abs() < 1e-15);
    }

    #[test]
    fn standard_contractions() {
        let f = AffineSLagFamily::standard(3).unwrap();
        for j in 0..3 {
            let th = f.theta_coeffs(j).unwrap();
            let mut want = vec![0.0; 3];
            want[j] = -1.0;
            assert_eq!(th.coeffs(), want.as_slice());
        }
        let f1 = AffineSLagFamily::standard(1).unwrap();
        assert_eq!(f1.phi_coeffs(0).unwrap().coeffs(), &[-1.0]);
    }

    #[test]
    fn rejects_non_lattice_fiber() {
        let m = FlatCalabiYauModel::standard(1).unwrap();
        let p = DMatrix::from_column_slice(2, 1, &[1.0, 0.5]);
        let q = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let r = AffineSLagFamily::new(m, p, q, DVector::zeros(2), Phase::Auto);
        assert!(matches!(r, Err(Error::Input(_))));
    }
}
