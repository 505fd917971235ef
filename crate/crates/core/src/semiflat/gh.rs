use nalgebra::DMatrix;
use serde::Serialize;

use super::ricci::{christoffel_ricci, RicciField};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::hessian::tolerance::{two_grid_estimate, Sampled, STENCIL_ORDER};
use crate::hessian::GridStencils;

/// A Gibbons-Hawking metric `V (dy1^2 + dy2^2 + dy3^2) + V^-1 (dtau + a dy3)^2`
/// with `V = V(y1, y2)`, sampled on a grid in `(y1, y2)`. Metric matrices use
/// the coordinate order `(y1, y2, y3, tau)`.
#[derive(Debug, Clone)]
pub struct GhMetric {
    pub grid: BoxGrid,
    pub potential: Vec<f64>,
    /// Connection coefficient `a` with `d(a dy3) = *dV`.
    pub connection: Vec<f64>,
    pub metric: Vec<DMatrix<f64>>,
    /// `max |Laplacian V|`.
    pub laplacian_residual: f64,
}

/// Running integral of nodal values along a line by cubic interpolation on
/// each cell.
fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    for k in 0..n - 1 {
        let cell = if k == 0 {
            9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]
        } else if k == n - 2 {
            values[n - 4] - 5.0 * values[n - 3] + 19.0 * values[n - 2] + 9.0 * values[n - 1]
        } else {
            -values[k - 1] + 13.0 * values[k] + 13.0 * values[k + 1] - values[k + 2]
        };
        out[k + 1] = out[k] + cell * h / 24.0;
    }
    out
}

/// Build the metric from nodal values of a positive harmonic `V`.
pub fn gh_metric(grid: &BoxGrid, v: &[f64], tol: f64) -> Result<GhMetric> {
    if grid.dim() != 2 {
        return Err(Error::Dimension("V must be a function of two variables".into()));
    }
    if v.len() != grid.node_count() {
        return Err(Error::Dimension(format!("{} values on {} nodes", v.len(), grid.node_count())));
    }
    let st = GridStencils::new(grid)?;
    let laplacian_residual = st.laplacian(v).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(laplacian_residual < tol) {
        return Err(Error::Input(format!(
            "V is not harmonic: max |Laplacian V| = {laplacian_residual:e}"
        )));
    }
    if let Some(node) = v.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Positivity(format!(
            "V = {} at {:?}",
            v[node],
            grid.coordinates(node)
        )));
    }
    // (a_1, a_2) = (-V_2, V_1); integrate along y1 on the first row, then along y2.
    let grad = st.gradient(v);
    let (n1, n2) = (grid.resolution()[0], grid.resolution()[1]);
    let first_row: Vec<f64> = (0..n1).map(|i| -grad[1][grid.linear_index(&[i, 0])]).collect();
    let base = cumulative_integral(&first_row, grid.spacing(0));
    let mut a = vec![0.0; v.len()];
    for i in 0..n1 {
        let column: Vec<f64> = (0..n2).map(|j| grad[0][grid.linear_index(&[i, j])]).collect();
        for (j, s) in cumulative_integral(&column, grid.spacing(1)).into_iter().enumerate() {
            a[grid.linear_index(&[i, j])] = base[i] + s;
        }
    }
    let metric = v
        .iter()
        .zip(&a)
        .map(|(&vv, &aa)| {
            let mut g = DMatrix::zeros(4, 4);
            g[(0, 0)] = vv;
            g[(1, 1)] = vv;
            g[(2, 2)] = vv + aa * aa / vv;
            g[(2, 3)] = aa / vv;
            g[(3, 2)] = aa / vv;
            g[(3, 3)] = 1.0 / vv;
            g
        })
        .collect();
    Ok(GhMetric {
        grid: grid.clone(),
        potential: v.to_vec(),
        connection: a,
        metric,
        laplacian_residual,
    })
}

impl GhMetric {
    /// Ricci tensor through Christoffel symbols at every node.
    pub fn ricci(&self) -> Result<RicciField> {
        Ok(RicciField {
            grid: self.grid.clone(),
            values: christoffel_ricci(&self.grid, &self.metric)?,
        })
    }
}

/// Ricci-flatness check of a Gibbons-Hawking metric.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GhReport {
    pub ricci_max: f64,
    pub tolerance: f64,
    pub laplacian_residual: f64,
}

impl GhReport {
    pub fn pass(&self) -> bool {
        self.ricci_max < 10.0 * self.tolerance
    }
}

/// Build the metric, compute its Ricci tensor and estimate the stencil
/// tolerance from the every-other-node subgrid.
pub fn gh_check(grid: &BoxGrid, v: &[f64], tol: f64) -> Result<GhReport> {
    let fine = gh_metric(grid, v, tol)?;
    let coarse_grid = grid.coarsened()?;
    let coarse_v: Vec<f64> = (0..coarse_grid.node_count())
        .map(|i| v[grid.refine_index(&coarse_grid, i)])
        .collect();
    let coarse = gh_metric(&coarse_grid, &coarse_v, tol)?;
    let rf = fine.ricci()?;
    let rc = coarse.ricci()?;
    let mut estimate: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let f = Sampled {
                grid: rf.grid.clone(),
                values: rf.values.iter().map(|m| m[(r, c)]).collect(),
            };
            let g = Sampled {
                grid: rc.grid.clone(),
                values: rc.values.iter().map(|m| m[(r, c)]).collect(),
            };
            estimate = estimate.max(two_grid_estimate(&f, &g, STENCIL_ORDER)?);
        }
    }
    let h = grid.spacing(0).min(grid.spacing(1));
    let scale = fine.metric.iter().map(|m| m.amax()).fold(1.0, f64::max);
    Ok(GhReport {
        ricci_max: rf.max_abs(),
        tolerance: estimate + 100.0 * f64::EPSILON * scale / (h * h),
        laplacian_residual: fine.laplacian_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> BoxGrid {
        BoxGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![17, 17]).unwrap()
    }

    #[test]
    fn cumulative_integral_is_exact_for_cubics() {
        let h = 0.1;
        let vals: Vec<f64> = (0..11).map(|i| (i as f64 * h).powi(3)).collect();
        let out = cumulative_integral(&vals, h);
        for (i, s) in out.iter().enumerate() {
            assert!((s - (i as f64 * h).powi(4) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_potential_is_flat() {
        let g = grid();
        let v = vec![1.0; g.node_count()];
        let r = gh_check(&g, &v, 1e-8).unwrap();
        assert!(r.ricci_max < 1e-10, "{r:?}");
    }

    #[test]
    fn linear_potential_is_ricci_flat() {
        let g = grid();
        let v = g.sample(|y| 2.0 + y[0]);
        let gh = gh_metric(&g, &v, 1e-8).unwrap();
        let a_exact = g.sample(|y| y[1]);
        assert!(gh.connection.iter().zip(&a_exact).all(|(a, b)| (a - b).abs() < 1e-12));
        let r = gh_check(&g, &v, 1e-8).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn rejects_non_harmonic_and_non_positive() {
        let g = grid();
        let v = g.sample(|y| 2.0 + y[0] * y[0]);
        match gh_metric(&g, &v, 1e-8) {
            Err(Error::Input(msg)) => {
                let value: f64 = msg.rsplit("= ").next().unwrap().parse().unwrap();
                assert!((value - 2.0).abs() < 1e-9, "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let v = g.sample(|y| y[0] - 0.5);
        assert!(matches!(gh_metric(&g, &v, 1e-8), Err(Error::Positivity(_))));
    }
}
