use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::boxgrid::BoxGrid;
use crate::cy::{holomorphic_volume, omega_matrix, ComplexForm, ConstantForm};
use crate::error::Result;
use crate::forms::{GridTorus, MIN_RESOLUTION};
use crate::hessian::{GridStencils, HessianPotential};

/// The product of a convex base (coordinates `u`) with the torus of fiber
/// coordinates `x`, carrying the metric `sum phi_jk (du_j du_k + dx_j dx_k)`,
/// the Kahler form `-sum phi_jk du_j ^ dx_k` and `dw_1 ^ .. ^ dw_m` with
/// `w_j = u_j + i x_j`.
///
/// Real coordinates are ordered `(u_1, .., u_m, x_1, .., x_m)`.
#[derive(Debug, Clone)]
pub struct SemiflatManifold {
    potential: HessianPotential,
    fiber: GridTorus,
    hessian: Vec<DMatrix<f64>>,
    kahler_residual: f64,
}

/// Build the semiflat manifold of a convex potential.
pub fn build_semiflat(pot: &HessianPotential) -> Result<SemiflatManifold> {
    let m = pot.dim();
    let st = pot.stencils()?;
    let hessian = st.hessian(pot.values());
    crate::hessian::check_convex_nodes(pot.grid(), &hessian)?;
    let kahler_residual = closedness_residual(&st, pot.values(), &hessian);
    Ok(SemiflatManifold {
        potential: pot.clone(),
        fiber: GridTorus::cube(m, MIN_RESOLUTION)?,
        hessian,
        kahler_residual,
    })
}

/// Asymmetry of the Hessian together with the failure of
/// `d(-sum dv_k ^ dx_k) = 0` for `v = grad phi`, i.e. of `D_l D_j v_k = D_j D_l v_k`.
fn closedness_residual(st: &GridStencils, values: &[f64], hess: &[DMatrix<f64>]) -> f64 {
    let mut worst = hess
        .iter()
        .map(|h| (h - h.transpose()).amax())
        .fold(0.0, f64::max);
    let m = hess.first().map_or(0, |h| h.nrows());
    let grad = st.gradient(values);
    for vk in &grad {
        let dv: Vec<Vec<f64>> = (0..m).map(|j| st.d1(j, vk)).collect();
        for l in 0..m {
            for j in (l + 1)..m {
                let a = st.d1(l, &dv[j]);
                let b = st.d1(j, &dv[l]);
                let scale = a.iter().fold(1.0f64, |s, x| s.max(x.abs()));
                let r = a.iter().zip(&b).fold(0.0f64, |s, (x, y)| s.max((x - y).abs()));
                worst = worst.max(r / scale);
            }
        }
    }
    worst
}

impl SemiflatManifold {
    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn potential(&self) -> &HessianPotential {
        &self.potential
    }

    pub fn grid(&self) -> &BoxGrid {
        self.potential.grid()
    }

    pub fn fiber(&self) -> &GridTorus {
        &self.fiber
    }

    /// `Hess phi` at every base node.
    pub fn hessian(&self) -> &[DMatrix<f64>] {
        &self.hessian
    }

    /// Closedness residual of the Kahler form, relative to the size of the third derivatives.
    pub fn kahler_residual(&self) -> f64 {
        self.kahler_residual
    }

    /// The real `2m x 2m` metric `diag(Hess phi, Hess phi)` at a base node.
    pub fn metric_at(&self, node: usize) -> DMatrix<f64> {
        let m = self.dim();
        let h = &self.hessian[node];
        let mut g = DMatrix::zeros(2 * m, 2 * m);
        g.view_mut((0, 0), (m, m)).copy_from(h);
        g.view_mut((m, m), (m, m)).copy_from(h);
        g
    }

    /// The Kahler form `-sum phi_jk du_j ^ dx_k` at a base node.
    pub fn kahler_form_at(&self, node: usize) -> ConstantForm {
        let m = self.dim();
        let h = &self.hessian[node];
        let mut w = ConstantForm::zero(2 * m, 2).expect("degree 2 fits");
        for j in 0..m {
            for k in 0..m {
                let term = ConstantForm::monomial(2 * m, &[j, m + k], -h[(j, k)]).expect("valid indices");
                w = w.add(&term).expect("same degree");
            }
        }
        w
    }

    /// `I d/du_j = d/dx_j`, `I d/dx_j = -d/du_j`.
    pub fn complex_structure(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut i = DMatrix::zeros(2 * m, 2 * m);
        for j in 0..m {
            i[(m + j, j)] = 1.0;
            i[(j, m + j)] = -1.0;
        }
        i
    }

    /// `dw_1 ^ .. ^ dw_m`.
    pub fn holomorphic_form(&self) -> ComplexForm {
        holomorphic_volume(self.dim()).expect("dimension is positive")
    }

    /// `max |g(I., I.) - g|` over all nodes.
    pub fn hermitian_residual(&self) -> f64 {
        let i = self.complex_structure();
        (0..self.hessian.len())
            .map(|node| {
                let g = self.metric_at(node);
                (i.transpose() * &g * &i - g).amax()
            })
            .fold(0.0, f64::max)
    }

    /// `max |omega(X, Y) - g(X, I Y)|` over all nodes.
    pub fn compatibility_residual(&self) -> f64 {
        let i = self.complex_structure();
        (0..self.hessian.len())
            .map(|node| {
                let w = omega_matrix(&self.kahler_form_at(node));
                (w - self.metric_at(node) * &i).amax()
            })
            .fold(0.0, f64::max)
    }
}

/// Pointwise length of the holomorphic volume form over the base.
#[derive(Debug, Clone, Serialize)]
pub struct NormField {
    #[serde(skip)]
    pub grid: BoxGrid,
    pub values: Vec<f64>,
    /// `max / min - 1`.
    pub variation: f64,
}

/// `|Omega ^ conj(Omega)| / |omega^m / m!|` at every base node. This is
/// `2^m / det Hess phi`.
pub fn holomorphic_norm_field(sf: &SemiflatManifold) -> NormField {
    let m = sf.dim();
    let big = sf.holomorphic_form();
    let numerator = big
        .wedge(&big.conj())
        .expect("degrees fit")
        .top()
        .expect("top degree")
        .norm();
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let values: Vec<f64> = (0..sf.hessian.len())
        .map(|node| {
            let vol = sf.kahler_form_at(node).power(m).expect("degrees fit").top().expect("top degree");
            numerator / (vol.abs() / factorial)
        })
        .collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    NormField {
        grid: sf.grid().clone(),
        values,
        variation: hi / lo - 1.0,
    }
}

/// Restrictions of the structure forms to the fiber torus over each node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberCheck {
    /// `max |omega restricted|`.
    pub omega: f64,
    /// `max |Re(i^{1-m} Omega) restricted|`.
    pub real_part: f64,
    /// `min Im(i^{1-m} Omega) restricted`, positive on a calibrated fiber.
    pub imaginary_min: f64,
}

/// Check that the tori `{u = const}` are special Lagrangian.
pub fn fiber_special_lagrangian(sf: &SemiflatManifold) -> FiberCheck {
    let m = sf.dim();
    let frame = DMatrix::from_fn(2 * m, m, |r, c| if r == m + c { 1.0 } else { 0.0 });
    let rotated = sf
        .holomorphic_form()
        .scale(Complex64::i().powi(1 - m as i32))
        .pullback(&frame)
        .expect("frame fits")
        .coeffs()[0];
    let mut omega: f64 = 0.0;
    if m >= 2 {
        for node in 0..sf.hessian.len() {
            let r = sf.kahler_form_at(node).pullback(&frame).expect("frame fits");
            omega = omega.max(r.norm_inf());
        }
    }
    FiberCheck {
        omega,
        real_part: rotated.re.abs(),
        imaginary_min: rotated.im,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(m: usize) -> HessianPotential {
        let g = BoxGrid::cube(m, -1.0, 1.0, 9).unwrap();
        HessianPotential::from_fn(g, |u| u.iter().map(|x| x * x).sum::<f64>() / 2.0, Some(1.0)).unwrap()
    }

    #[test]
    fn round_potential_gives_flat_product() {
        let sf = build_semiflat(&round(2)).unwrap();
        for node in [0, 17, 40] {
            assert!((sf.metric_at(node) - DMatrix::identity(4, 4)).amax() < 1e-10);
            let w = sf.kahler_form_at(node);
            assert!((w.coeff(&[0, 2]) + 1.0).abs() < 1e-10);
            assert!((w.coeff(&[1, 3]) + 1.0).abs() < 1e-10);
            assert!(w.coeff(&[0, 3]).abs() < 1e-10);
        }
        assert!(sf.hermitian_residual() < 1e-12);
        assert!(sf.compatibility_residual() < 1e-12);
        let norm = holomorphic_norm_field(&sf);
        assert!(norm.variation < 1e-10);
        assert!((norm.values[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn diagonal_quadratic_scales_blocks() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 9).unwrap();
        let pot = HessianPotential::from_fn(g, |u| 3.0 * u[0] * u[0] / 2.0 + 0.5 * u[1] * u[1] / 2.0, None).unwrap();
        let sf = build_semiflat(&pot).unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 0.5, 3.0, 0.5]));
        assert!((sf.metric_at(30) - expect).amax() < 1e-10);
    }

    #[test]
    fn exponential_potential_norm_decays() {
        let g = BoxGrid::cube(1, 0.0, 1.0, 33).unwrap();
        let pot = HessianPotential::from_fn(g, |u| u[0].exp(), None).unwrap();
        let sf = build_semiflat(&pot).unwrap();
        assert!((sf.metric_at(16)[(0, 0)] - 0.5f64.exp()).abs() < 1e-6);
        let norm = holomorphic_norm_field(&sf);
        assert!((norm.variation - (1f64.exp() - 1.0)).abs() < 1e-5);
        assert_eq!(sf.kahler_residual(), 0.0);
    }

    #[test]
    fn fibers_are_calibrated() {
        for m in 1..=3 {
            let sf = build_semiflat(&round(m)).unwrap();
            let c = fiber_special_lagrangian(&sf);
            assert!(c.omega < 1e-14 && c.real_part < 1e-14);
            assert!((c.imaginary_min - 1.0).abs() < 1e-14);
        }
    }
}
