//! Grid-refinement error estimates. A quantity computed with a stencil of
//! order `p` on the grid and on its every-other-node subgrid differs by about
//! `(2^p - 1)` times the fine-grid error, which gives a per-run tolerance.

use super::interp::Interpolant;
use super::potential::HessianPotential;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

/// Order of the derivative stencils.
pub const STENCIL_ORDER: i32 = 4;
/// Order of the quintic interpolant.
pub const INTERPOLATION_ORDER: i32 = 6;

/// Nodal values of a derived quantity together with the grid they live on.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub grid: BoxGrid,
    pub values: Vec<f64>,
}

fn locate(grid: &BoxGrid, p: &[f64]) -> Option<usize> {
    let mut idx = Vec::with_capacity(grid.dim());
    for (a, &x) in p.iter().enumerate() {
        let z = (x - grid.lower()[a]) / grid.spacing(a);
        let i = z.round();
        if (z - i).abs() > 1e-6 || i < 0.0 || i as usize >= grid.resolution()[a] {
            return None;
        }
        idx.push(i as usize);
    }
    Some(grid.linear_index(&idx))
}

/// `max |coarse - fine| / (2^order - 1)` over coarse nodes that are also fine nodes.
pub fn two_grid_estimate(fine: &Sampled, coarse: &Sampled, order: i32) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for node in 0..coarse.grid.node_count() {
        if let Some(f) = locate(&fine.grid, &coarse.grid.coordinates(node)) {
            worst = worst.max((coarse.values[node] - fine.values[f]).abs());
            matched += 1;
        }
    }
    if matched == 0 {
        return Err(Error::Input("coarse and fine grids share no nodes".into()));
    }
    Ok(worst / (2f64.powi(order) - 1.0))
}

/// Round-off level of a second-derivative quantity of `pot`.
pub fn roundoff_floor(pot: &HessianPotential) -> f64 {
    let g = pot.grid();
    let hmin = (0..g.dim()).map(|a| g.spacing(a)).fold(f64::INFINITY, f64::min);
    let scale = pot.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    100.0 * f64::EPSILON * scale / (hmin * hmin)
}

/// Stencil tolerance of `quantity(pot)`: the two-grid estimate on `pot` and
/// its coarsened copy, plus the round-off floor.
pub fn stencil_tolerance<F>(pot: &HessianPotential, quantity: F) -> Result<f64>
where
    F: Fn(&HessianPotential) -> Result<Sampled>,
{
    let fine = quantity(pot)?;
    let coarse = quantity(&pot.coarsened()?)?;
    Ok(two_grid_estimate(&fine, &coarse, STENCIL_ORDER)? + roundoff_floor(pot))
}

/// Interpolation tolerance of nodal data: interpolate from the coarsened
/// grid onto the fine nodes and scale the discrepancy down by `2^6`.
pub fn interpolation_tolerance(grid: &BoxGrid, values: &[f64]) -> Result<f64> {
    let coarse = grid.coarsened()?;
    let cvals: Vec<f64> = (0..coarse.node_count())
        .map(|i| values[grid.refine_index(&coarse, i)])
        .collect();
    let ip = Interpolant::new(&coarse, &cvals)?;
    let mut worst: f64 = 0.0;
    for node in 0..grid.node_count() {
        worst = worst.max((ip.value(&grid.coordinates(node))? - values[node]).abs());
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    Ok(worst / 2f64.powi(INTERPOLATION_ORDER) + 100.0 * f64::EPSILON * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hessian::det_hessian;

    #[test]
    fn estimate_tracks_actual_error() {
        let g = BoxGrid::cube(2, 0.0, 1.0, 33).unwrap();
        let f = |u: &[f64]| (u[0] + 2.0 * u[1]).exp();
        let pot = HessianPotential::from_fn(g.clone(), f, None).unwrap();
        let q = |p: &HessianPotential| {
            Ok(Sampled {
                grid: p.grid().clone(),
                values: det_hessian(p)?,
            })
        };
        let tol = stencil_tolerance(&pot, q).unwrap();
        // exact det Hess = 4 e^{2(u1+2u2)} - 4 e^{2(u1+2u2)} = 0
        let actual = det_hessian(&pot).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(actual < 3.0 * tol && actual > tol / 30.0, "actual {actual:e} tol {tol:e}");
    }
}
