//! Local tensor-product quintic interpolation of nodal data on a box grid.

use nalgebra::{DMatrix, DVector};

use super::stencil::fornberg_weights;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

/// Nodes per axis in each interpolation window.
pub const WINDOW: usize = 6;

/// Value, gradient and Hessian of an interpolant at a point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct Interpolant<'a> {
    grid: &'a BoxGrid,
    values: &'a [f64],
}

impl<'a> Interpolant<'a> {
    pub fn new(grid: &'a BoxGrid, values: &'a [f64]) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Dimension(format!(
                "{} values on {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if grid.resolution().iter().any(|&n| n < WINDOW) {
            return Err(Error::Input(format!("interpolation needs {WINDOW} nodes per axis")));
        }
        Ok(Self { grid, values })
    }

    fn axis_weights(&self, axis: usize, x: f64) -> (usize, Vec<Vec<f64>>) {
        let g = self.grid;
        let n = g.resolution()[axis];
        let h = g.spacing(axis);
        let z = (x - g.lower()[axis]) / h;
        let cell = (z.floor().max(0.0) as usize).min(n - 2);
        let start = cell.saturating_sub(WINDOW / 2 - 1).min(n - WINDOW);
        let nodes: Vec<f64> = (start..start + WINDOW).map(|k| k as f64).collect();
        let mut w = fornberg_weights(z, &nodes, 2);
        w[1].iter_mut().for_each(|v| *v /= h);
        w[2].iter_mut().for_each(|v| *v /= h * h);
        (start, w)
    }

    /// Value and first two derivatives at `p`; `p` must lie in the box.
    pub fn jet(&self, p: &[f64]) -> Result<Jet> {
        let g = self.grid;
        let d = g.dim();
        if p.len() != d {
            return Err(Error::Dimension(format!("point of length {} in {d} dimensions", p.len())));
        }
        let slack = 1e-12;
        for a in 0..d {
            let w = g.upper()[a] - g.lower()[a];
            if p[a] < g.lower()[a] - slack * w || p[a] > g.upper()[a] + slack * w || !p[a].is_finite() {
                return Err(Error::Domain(format!(
                    "point {p:?} outside the interpolation box"
                )));
            }
        }
        let axes: Vec<(usize, Vec<Vec<f64>>)> = (0..d).map(|a| self.axis_weights(a, p[a])).collect();
        let mut value = 0.0;
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        let total = WINDOW.pow(d as u32);
        let mut idx = vec![0usize; d];
        for flat in 0..total {
            let mut rem = flat;
            for a in (0..d).rev() {
                idx[a] = rem % WINDOW;
                rem /= WINDOW;
            }
            let node: Vec<usize> = (0..d).map(|a| axes[a].0 + idx[a]).collect();
            let f = self.values[g.linear_index(&node)];
            let w0: Vec<f64> = (0..d).map(|a| axes[a].1[0][idx[a]]).collect();
            let prod0: f64 = w0.iter().product();
            value += prod0 * f;
            for a in 0..d {
                let others: f64 = (0..d).filter(|&b| b != a).map(|b| w0[b]).product();
                grad[a] += axes[a].1[1][idx[a]] * others * f;
                hess[(a, a)] += axes[a].1[2][idx[a]] * others * f;
                for b in (a + 1)..d {
                    let rest: f64 = (0..d).filter(|&c| c != a && c != b).map(|c| w0[c]).product();
                    let v = axes[a].1[1][idx[a]] * axes[b].1[1][idx[b]] * rest * f;
                    hess[(a, b)] += v;
                    hess[(b, a)] += v;
                }
            }
        }
        Ok(Jet {
            value,
            gradient: grad,
            hessian: hess,
        })
    }

    pub fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.jet(p)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_data_is_reproduced() {
        let g = BoxGrid::new(vec![0.0, -1.0], vec![1.0, 1.0], vec![8, 10]).unwrap();
        let f = |u: &[f64]| u[0].powi(5) - u[0] * u[1] * u[1] + 3.0 * u[1].powi(4);
        let vals = g.sample(f);
        let ip = Interpolant::new(&g, &vals).unwrap();
        for p in [[0.13, 0.77], [0.999, -0.999], [0.5, 0.0], [1.0, 1.0]] {
            let j = ip.jet(&p).unwrap();
            assert!((j.value - f(&p)).abs() < 1e-12);
            assert!((j.gradient[0] - (5.0 * p[0].powi(4) - p[1] * p[1])).abs() < 1e-10);
            assert!((j.hessian[(0, 1)] + 2.0 * p[1]).abs() < 1e-9);
            assert!((j.hessian[(1, 1)] - (-2.0 * p[0] + 36.0 * p[1] * p[1])).abs() < 1e-8);
        }
        assert!(matches!(ip.jet(&[1.5, 0.0]), Err(Error::Domain(_))));
    }
}
