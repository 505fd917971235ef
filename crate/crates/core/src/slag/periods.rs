use nalgebra::DMatrix;
use serde::Serialize;

use super::family::AffineSLagFamily;
use crate::error::{Error, Result};
use crate::forms::{
    harmonicity_residual, hodge_star, integrate_cycle, l2_inner, CycleBasis, GridTorus,
};
use crate::index::complement;

/// `lambda_ij = int_{A_i} theta_j`, `mu_ij = int_{B_i} phi_j` at one moduli point.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrices {
    pub lambda: DMatrix<f64>,
    pub mu: DMatrix<f64>,
}

impl PeriodMatrices {
    pub fn new(lambda: DMatrix<f64>, mu: DMatrix<f64>) -> Result<Self> {
        if !lambda.is_square() || lambda.shape() != mu.shape() {
            return Err(Error::Dimension(format!(
                "period matrices of shapes {:?} and {:?}",
                lambda.shape(),
                mu.shape()
            )));
        }
        Ok(Self { lambda, mu })
    }

    /// `lambda^T mu`, the pulled-back L2 metric in `t` coordinates.
    pub fn pairing(&self) -> DMatrix<f64> {
        self.lambda.transpose() * &self.mu
    }

    /// Volume of the `H^1` torus, `sqrt det(mu lambda^{-1})`.
    pub fn h1_volume(&self) -> Result<f64> {
        let inv = self.lambda_inverse()?;
        Ok((&self.mu * inv).determinant().sqrt())
    }

    /// Volume of the `H^{n-1}` torus, `sqrt det(lambda mu^{-1})`.
    pub fn hn1_volume(&self) -> Result<f64> {
        let inv = self
            .mu
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("mu is singular".into()))?;
        Ok((&self.lambda * inv).determinant().sqrt())
    }

    pub fn lambda_inverse(&self) -> Result<DMatrix<f64>> {
        self.lambda
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("lambda is singular".into()))
    }
}

fn check_invertible(lambda: &DMatrix<f64>) -> Result<()> {
    let sv = lambda.clone().svd(false, false).singular_values;
    if sv.min() <= 1e-10 * sv.max().max(1.0) {
        return Err(Error::Degenerate(format!(
            "lambda is singular (smallest singular value {:e}); the theta_j are dependent",
            sv.min()
        )));
    }
    Ok(())
}

/// Period matrices by integrating the sampled forms over grid cycles.
pub fn period_matrices(fam: &AffineSLagFamily, t: &[f64], resolution: usize) -> Result<PeriodMatrices> {
    let grid = fam.fiber_grid(resolution)?;
    let basis = CycleBasis::standard(&grid);
    let m = fam.m();
    let mut lambda = DMatrix::zeros(m, m);
    let mut mu = DMatrix::zeros(m, m);
    for j in 0..m {
        let theta = fam.contraction_one_form(t, j, &grid)?;
        let phi = fam.contraction_nminus1_form(t, j, &grid)?;
        for i in 0..m {
            lambda[(i, j)] = integrate_cycle(&theta, &basis.one_cycles[i])?;
            mu[(i, j)] = integrate_cycle(&phi, &basis.dual_cells[i])?;
        }
    }
    check_invertible(&lambda)?;
    PeriodMatrices::new(lambda, mu)
}

/// Period matrices read off the constant coefficients: the loop `A_i` has
/// unit length along `s_i` and the slab `B_i` carries the sign `(-1)^i`.
pub fn exact_period_matrices(fam: &AffineSLagFamily, t: &[f64]) -> Result<PeriodMatrices> {
    fam.check_t(t)?;
    let n = fam.n();
    let m = fam.m();
    let mut lambda = DMatrix::zeros(m, m);
    let mut mu = DMatrix::zeros(m, m);
    for j in 0..m {
        let theta = fam.theta_coeffs(j)?;
        let phi = fam.phi_coeffs(j)?;
        for i in 0..m {
            lambda[(i, j)] = theta.coeff(&[i]);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            mu[(i, j)] = sign * phi.coeff(&complement(n, &[i]));
        }
    }
    check_invertible(&lambda)?;
    PeriodMatrices::new(lambda, mu)
}

/// `|lambda^T mu - mu^T lambda|_inf`.
pub fn lagrangian_residual(pm: &PeriodMatrices) -> f64 {
    let s = pm.pairing();
    (&s - s.transpose()).amax()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McLeanReport {
    pub direction: usize,
    /// `|d theta_j|_inf`.
    pub closed: f64,
    /// `|d * theta_j|_inf`.
    pub coclosed: f64,
    /// `|phi_j - * theta_j|_inf`.
    pub star: f64,
}

impl McLeanReport {
    pub fn max_residual(&self) -> f64 {
        self.closed.max(self.coclosed).max(self.star)
    }
}

/// Harmonicity of `theta_j` and the identity `phi_j = * theta_j` in the
/// induced fiber metric.
pub fn mclean_check(fam: &AffineSLagFamily, t: &[f64], j: usize, grid: &GridTorus) -> Result<McLeanReport> {
    let g = fam.fiber_metric(grid)?;
    let theta = fam.contraction_one_form(t, j, grid)?;
    let phi = fam.contraction_nminus1_form(t, j, grid)?;
    let (closed, coclosed) = harmonicity_residual(&theta, &g)?;
    let star = phi.sub(&hodge_star(&theta, &g)?)?.norm_inf();
    Ok(McLeanReport {
        direction: j,
        closed,
        coclosed,
        star,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct McLeanMetric {
    /// `g_jk = int theta_j ^ * theta_k`.
    pub metric: DMatrix<f64>,
    /// `lambda^T mu` at the same point.
    pub pairing: DMatrix<f64>,
    pub residual: f64,
}

/// The L2 metric on harmonic 1-forms, compared with `lambda^T mu`.
pub fn mclean_metric(fam: &AffineSLagFamily, t: &[f64], resolution: usize) -> Result<McLeanMetric> {
    let grid = fam.fiber_grid(resolution)?;
    let g = fam.fiber_metric(&grid)?;
    let m = fam.m();
    let thetas = (0..m)
        .map(|j| fam.contraction_one_form(t, j, &grid))
        .collect::<Result<Vec<_>>>()?;
    let mut metric = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            metric[(j, k)] = l2_inner(&thetas[j], &thetas[k], &g)?;
        }
    }
    let pairing = period_matrices(fam, t, resolution)?.pairing();
    let residual = (&metric - &pairing).amax();
    Ok(McLeanMetric {
        metric,
        pairing,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_periods_are_minus_identity() {
        for n in 1..=3 {
            let f = AffineSLagFamily::standard(n).unwrap();
            let pm = period_matrices(&f, &vec![0.0; n], 8).unwrap();
            let id = DMatrix::<f64>::identity(n, n);
            assert!((&pm.lambda + &id).amax() < 1e-14);
            assert!((&pm.mu + &id).amax() < 1e-14);
        }
    }

    #[test]
    fn tilt_periods() {
        for k in 1..=3 {
            let f = AffineSLagFamily::tilt(k).unwrap();
            let pm = period_matrices(&f, &[0.2], 8).unwrap();
            let kk = k as f64;
            assert!((pm.lambda[(0, 0)] + 1.0).abs() < 1e-14);
            assert!((pm.mu[(0, 0)] + 1.0 / (1.0 + kk * kk).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_and_coefficient_periods_agree() {
        let f = AffineSLagFamily::standard(3).unwrap();
        let a = period_matrices(&f, &[0.0; 3], 8).unwrap();
        let b = exact_period_matrices(&f, &[0.0; 3]).unwrap();
        assert!((a.lambda - b.lambda).amax() < 1e-14 && (a.mu - b.mu).amax() < 1e-14);
    }

    #[test]
    fn metric_of_tilt_one() {
        let f = AffineSLagFamily::tilt(1).unwrap();
        let mm = mclean_metric(&f, &[0.0], 16).unwrap();
        assert!((mm.metric[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(mm.residual < 1e-12);
    }
}
