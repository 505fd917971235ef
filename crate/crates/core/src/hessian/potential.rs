use nalgebra::{DMatrix, SymmetricEigen};

use super::interp::Interpolant;
use super::stencil::GridStencils;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::forms::MetricField;

/// Nodal values of a convex potential on a box grid, with an optional
/// Monge-Ampere target `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianPotential {
    grid: BoxGrid,
    values: Vec<f64>,
    c: Option<f64>,
}

impl HessianPotential {
    pub fn new(grid: BoxGrid, values: Vec<f64>, c: Option<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Dimension(format!(
                "{} values on {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("potential has non-finite values".into()));
        }
        Ok(Self { grid, values, c })
    }

    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: BoxGrid, f: F, c: Option<f64>) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(grid, values, c)
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn c(&self) -> Option<f64> {
        self.c
    }

    pub fn with_c(mut self, c: Option<f64>) -> Self {
        self.c = c;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            c: self.c.map(|c| c * s.powi(self.dim() as i32)),
        }
    }

    pub fn stencils(&self) -> Result<GridStencils> {
        GridStencils::new(&self.grid)
    }

    pub fn interpolant(&self) -> Result<Interpolant<'_>> {
        Interpolant::new(&self.grid, &self.values)
    }

    /// `gradient[axis][node]` by 4th-order stencils.
    pub fn gradient(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.stencils()?.gradient(&self.values))
    }

    pub fn hessian_field(&self) -> Result<Vec<DMatrix<f64>>> {
        Ok(self.stencils()?.hessian(&self.values))
    }

    /// Every other node on each axis.
    pub fn coarsened(&self) -> Result<Self> {
        let coarse = self.grid.coarsened()?;
        let values = (0..coarse.node_count())
            .map(|i| self.values[self.grid.refine_index(&coarse, i)])
            .collect();
        Self::new(coarse, values, self.c)
    }

    /// Error unless the discrete Hessian is positive definite at every interior node.
    pub fn check_convexity(&self) -> Result<()> {
        let hess = self.hessian_field()?;
        check_convex_nodes(&self.grid, &hess)
    }
}

pub(crate) fn check_convex_nodes(grid: &BoxGrid, hess: &[DMatrix<f64>]) -> Result<()> {
    for (node, h) in hess.iter().enumerate() {
        if !grid.is_interior(node) {
            continue;
        }
        let min = SymmetricEigen::new(h.clone()).eigenvalues.min();
        if !(min > 1e-12 * h.amax().max(1.0)) {
            return Err(Error::Convexity {
                node,
                coords: grid.coordinates(node),
                min_eig: min,
            });
        }
    }
    Ok(())
}

/// The Hessian metric `sum phi_ij du_i du_j` at every node.
pub fn hessian_metric(pot: &HessianPotential) -> Result<MetricField<BoxGrid>> {
    let hess = pot.hessian_field()?;
    check_convex_nodes(pot.grid(), &hess)?;
    MetricField::per_node(pot.grid().clone(), hess)
}

/// `det Hess phi` at every node.
pub fn det_hessian(pot: &HessianPotential) -> Result<Vec<f64>> {
    Ok(pot.hessian_field()?.iter().map(|h| h.determinant()).collect())
}

/// `det Hess phi - c` at every node.
pub fn ma_residual(pot: &HessianPotential, c: f64) -> Result<Vec<f64>> {
    let hess = pot.hessian_field()?;
    check_convex_nodes(pot.grid(), &hess)?;
    Ok(hess.iter().map(|h| h.determinant() - c).collect())
}

/// Smallest `<grad phi(a) - grad phi(b), a - b> / |a - b|^2` over the given node pairs.
pub fn gradient_monotonicity(pot: &HessianPotential, pairs: &[(usize, usize)]) -> Result<f64> {
    let grad = pot.gradient()?;
    let g = pot.grid();
    let mut worst = f64::INFINITY;
    for &(a, b) in pairs {
        if a == b {
            continue;
        }
        let (ua, ub) = (g.coordinates(a), g.coordinates(b));
        let mut dot = 0.0;
        let mut norm = 0.0;
        for k in 0..g.dim() {
            let du = ua[k] - ub[k];
            dot += (grad[k][a] - grad[k][b]) * du;
            norm += du * du;
        }
        worst = worst.min(dot / norm);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_metric_is_diagonal() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 9).unwrap();
        let p = HessianPotential::from_fn(g, |u| 1.5 * u[0] * u[0] + 0.25 * u[1] * u[1], None).unwrap();
        let m = hessian_metric(&p).unwrap();
        for node in 0..p.grid().node_count() {
            let h = m.at(node);
            assert!((h[(0, 0)] - 3.0).abs() < 1e-10 && (h[(1, 1)] - 0.5).abs() < 1e-10 && h[(0, 1)].abs() < 1e-10);
        }
    }

    #[test]
    fn concave_potential_reports_location() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 9).unwrap();
        let p = HessianPotential::from_fn(g, |u| u[0] * u[0] - u[1] * u[1], None).unwrap();
        match p.check_convexity() {
            Err(Error::Convexity { coords, min_eig, .. }) => {
                assert_eq!(coords.len(), 2);
                assert!((min_eig + 2.0).abs() < 1e-9);
            }
            other => panic!("expected a convexity error, got {other:?}"),
        }
    }

    #[test]
    fn quartic_residual_is_u1_squared() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 17).unwrap();
        let p = HessianPotential::from_fn(
            g.clone(),
            |u| u[0].powi(4) / 12.0 + u[0] * u[0] / 2.0 + u[1] * u[1] / 2.0,
            None,
        )
        .unwrap();
        let r = ma_residual(&p, 1.0).unwrap();
        for (node, v) in r.iter().enumerate() {
            let u = g.coordinates(node);
            assert!((v - u[0] * u[0]).abs() < 1e-10);
        }
    }
}
