use nalgebra::DMatrix;
use serde::Serialize;

use super::manifold::{build_semiflat, SemiflatManifold};
use super::ricci::{ricci_domain, RICCI_INSET};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::hessian::tolerance::{two_grid_estimate, Sampled, STENCIL_ORDER};
use crate::hessian::GridStencils;
use crate::slag::PeriodSource;

/// Default finite-difference step in the moduli coordinates.
pub const NIJENHUIS_STEP: f64 = 1e-2;

/// Almost complex structure on `(t, x)` space with `I d/dt_j = sum_i lambda_ij d/dx_i`
/// and `I d/dx_i = -sum_j (lambda^-1)_ji d/dt_j`.
pub fn almost_complex_structure(lambda: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = lambda.nrows();
    if lambda.ncols() != m {
        return Err(Error::Dimension("lambda must be square".into()));
    }
    let inv = lambda
        .clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Degenerate("lambda is singular".into()))?;
    let mut i = DMatrix::zeros(2 * m, 2 * m);
    i.view_mut((m, 0), (m, m)).copy_from(lambda);
    i.view_mut((0, m), (m, m)).copy_from(&(-inv));
    Ok(i)
}

/// Nijenhuis tensor at one point, from the structure and its derivatives
/// `di[l] = d I / d t_l` (derivatives along `x` vanish).
fn nijenhuis(i: &DMatrix<f64>, di: &[DMatrix<f64>]) -> f64 {
    let d = i.nrows();
    let m = di.len();
    let deriv = |l: usize, r: usize, c: usize| if l < m { di[l][(r, c)] } else { 0.0 };
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in (a + 1)..d {
            for k in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += i[(l, a)] * deriv(l, k, b) - i[(l, b)] * deriv(l, k, a);
                    s -= i[(k, l)] * (deriv(a, l, b) - deriv(b, l, a));
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

fn structure_at<S: PeriodSource + ?Sized>(src: &S, t: &[f64]) -> Result<DMatrix<f64>> {
    almost_complex_structure(&src.lambda(t))
}

/// Fourth-order central differences of `I` along each moduli axis.
fn derivatives<S: PeriodSource + ?Sized>(src: &S, t: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
    let m = t.len();
    let mut out = Vec::with_capacity(m);
    for l in 0..m {
        let at = |s: f64| {
            let mut p = t.to_vec();
            p[l] += s * h;
            structure_at(src, &p)
        };
        out.push((at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * 8.0) / (12.0 * h));
    }
    Ok(out)
}

/// Outcome of the integrability check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NijenhuisReport {
    /// Richardson-extrapolated max norm of the Nijenhuis tensor.
    pub residual: f64,
    /// Max norm at step `h` before extrapolation.
    pub raw: f64,
    /// Step-halving error estimate plus round-off.
    pub tolerance: f64,
}

impl NijenhuisReport {
    pub fn pass(&self) -> bool {
        self.residual < self.tolerance
    }
}

/// Nijenhuis tensor of the structure built from `lambda(t)`, at each sample
/// point, with steps `h` and `2h` combined by Richardson extrapolation.
pub fn complex_structure_residual<S: PeriodSource + ?Sized>(
    src: &S,
    points: &[Vec<f64>],
    h: f64,
) -> Result<NijenhuisReport> {
    if !(h > 0.0) {
        return Err(Error::Input(format!("step must be positive, got {h}")));
    }
    let m = src.moduli_dim();
    let mut report = NijenhuisReport {
        residual: 0.0,
        raw: 0.0,
        tolerance: 0.0,
    };
    for t in points {
        if t.len() != m {
            return Err(Error::Dimension(format!("sample point of length {} for {m} moduli", t.len())));
        }
        let i = structure_at(src, t)?;
        let fine = derivatives(src, t, h)?;
        let coarse = derivatives(src, t, 2.0 * h)?;
        let extrapolated: Vec<DMatrix<f64>> = fine
            .iter()
            .zip(&coarse)
            .map(|(f, c)| f + (f - c) / 15.0)
            .collect();
        let n_fine = nijenhuis(&i, &fine);
        let n_coarse = nijenhuis(&i, &coarse);
        let n_extra = nijenhuis(&i, &extrapolated);
        let spread: Vec<DMatrix<f64>> = fine.iter().zip(&coarse).map(|(f, c)| (f - c) / 15.0).collect();
        let estimate = nijenhuis_bound(&i, &spread).max((n_fine - n_coarse).abs() / 15.0);
        let floor = 100.0 * f64::EPSILON * i.amax() * i.amax() / h;
        report.residual = report.residual.max(n_extra);
        report.raw = report.raw.max(n_fine);
        report.tolerance = report.tolerance.max(estimate + floor);
    }
    Ok(report)
}

/// Bound on how much the Nijenhuis tensor can move when the derivatives
/// change by `delta`.
fn nijenhuis_bound(i: &DMatrix<f64>, delta: &[DMatrix<f64>]) -> f64 {
    let d = i.nrows() as f64;
    let imax = i.amax();
    let dmax = delta.iter().map(|x| x.amax()).fold(0.0, f64::max);
    4.0 * d * imax * dmax
}

/// Nijenhuis tensor norm at every node for a structure built from nodal
/// `lambda` matrices, with derivatives taken by the grid stencils.
pub fn grid_nijenhuis(grid: &BoxGrid, lambda: &[DMatrix<f64>]) -> Result<Vec<f64>> {
    if lambda.len() != grid.node_count() {
        return Err(Error::Dimension(format!("{} matrices on {} nodes", lambda.len(), grid.node_count())));
    }
    let st = GridStencils::new(grid)?;
    let structures = lambda.iter().map(almost_complex_structure).collect::<Result<Vec<_>>>()?;
    let d = structures.first().map_or(0, |i| i.nrows());
    let m = grid.dim();
    // derivs[l][r * d + c][node]
    let derivs: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|l| {
            (0..d * d)
                .map(|rc| {
                    let comp: Vec<f64> = structures.iter().map(|i| i[(rc / d, rc % d)]).collect();
                    st.d1(l, &comp)
                })
                .collect()
        })
        .collect();
    Ok((0..grid.node_count())
        .map(|node| {
            let di: Vec<DMatrix<f64>> = (0..m)
                .map(|l| DMatrix::from_fn(d, d, |r, c| derivs[l][r * d + c][node]))
                .collect();
            nijenhuis(&structures[node], &di)
        })
        .collect())
}

/// Integrability of the structure whose `lambda` is `Hess phi` itself, on
/// the curvature nodes, with a two-grid tolerance.
pub fn hessian_chart_nijenhuis(sf: &SemiflatManifold) -> Result<NijenhuisReport> {
    let eval = |sf: &SemiflatManifold| -> Result<(BoxGrid, Vec<f64>)> {
        let grid = sf.grid();
        let inner = ricci_domain(grid)?;
        let lambda: Vec<DMatrix<f64>> = (0..inner.node_count())
            .map(|idx| sf.hessian()[grid.inset_index(RICCI_INSET, &inner, idx)].clone())
            .collect();
        let n = grid_nijenhuis(&inner, &lambda)?;
        Ok((inner, n))
    };
    let (fine_grid, fine) = eval(sf)?;
    let (coarse_grid, coarse) = eval(&build_semiflat(&sf.potential().coarsened()?)?)?;
    let estimate = two_grid_estimate(
        &Sampled {
            grid: fine_grid.clone(),
            values: fine.clone(),
        },
        &Sampled {
            grid: coarse_grid,
            values: coarse,
        },
        STENCIL_ORDER,
    )?;
    let h = (0..fine_grid.dim()).map(|a| fine_grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let scale = sf.hessian().iter().map(|x| x.amax()).fold(1.0, f64::max);
    let residual = fine.iter().cloned().fold(0.0, f64::max);
    Ok(NijenhuisReport {
        residual,
        raw: residual,
        tolerance: estimate + 100.0 * f64::EPSILON * scale * scale / h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slag::SyntheticPeriods;

    fn samples() -> Vec<Vec<f64>> {
        vec![vec![0.1, 0.2], vec![-0.3, 0.4], vec![0.5, -0.1]]
    }

    #[test]
    fn structure_squares_to_minus_one() {
        let l = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let i = almost_complex_structure(&l).unwrap();
        assert!((&i * &i + DMatrix::identity(4, 4)).amax() < 1e-14);
        assert!(matches!(
            almost_complex_structure(&DMatrix::zeros(2, 2)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn constant_lambda_is_exactly_integrable() {
        let l = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let src = SyntheticPeriods::new(2, move |_: &[f64]| l.clone(), |_: &[f64]| DMatrix::identity(2, 2));
        let r = complex_structure_residual(&src, &samples(), NIJENHUIS_STEP).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn hessian_chart_is_integrable() {
        // lambda = Hess of f(t) = exp(t1) + exp(t2) + t1^2 t2^2 / 2 + (t1^2 + t2^2)
        let hess = |t: &[f64]| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    t[0].exp() + t[1] * t[1] + 2.0,
                    2.0 * t[0] * t[1],
                    2.0 * t[0] * t[1],
                    t[1].exp() + t[0] * t[0] + 2.0,
                ],
            )
        };
        let src = SyntheticPeriods::new(2, hess, |_: &[f64]| DMatrix::identity(2, 2));
        let r = complex_structure_residual(&src, &samples(), NIJENHUIS_STEP).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn gridded_hessian_chart_is_nearly_integrable() {
        let g = BoxGrid::cube(2, -0.5, 0.5, 33).unwrap();
        let pot = crate::hessian::HessianPotential::from_fn(
            g,
            |u| u[0].exp() + u[1].exp() + u[0] * u[0] * u[1] * u[1] / 2.0,
            None,
        )
        .unwrap();
        let sf = build_semiflat(&pot).unwrap();
        let r = hessian_chart_nijenhuis(&sf).unwrap();
        assert!(r.residual < 10.0 * r.tolerance, "{r:?}");
        assert!(r.residual < 1e-3);
    }

    #[test]
    fn manufactured_chart_is_not_integrable() {
        let lam = |t: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, t[0], 0.0, 1.0]);
        let src = SyntheticPeriods::new(2, lam, |_: &[f64]| DMatrix::identity(2, 2));
        let r = complex_structure_residual(&src, &samples(), NIJENHUIS_STEP).unwrap();
        assert!(r.residual > 1e-2, "{r:?}");
    }
}
