//! Finite-difference and interpolation weights on box grids.
//!
//! First derivatives use 5-point windows (centered where possible, shifted at
//! the boundary); second derivatives use the centered 5-point stencil inside
//! and 6-point one-sided windows near the boundary. All are 4th order.

use nalgebra::DMatrix;

use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

/// Smallest per-axis node count the stencils support.
pub const MIN_NODES: usize = 7;

/// Weights for derivatives `0..=order` at `z` from nodes `x` (Fornberg's recursion).
pub fn fornberg_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Per-node stencils along one axis: `(first node, weights)`.
#[derive(Debug, Clone)]
pub struct AxisStencil {
    pub entries: Vec<(usize, Vec<f64>)>,
}

impl AxisStencil {
    fn build(n: usize, h: f64, order: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                let (start, len) = match order {
                    1 => (i.saturating_sub(2).min(n - 5), 5),
                    _ => {
                        if i >= 2 && i + 2 < n {
                            (i - 2, 5)
                        } else if i < 2 {
                            (0, 6)
                        } else {
                            (n - 6, 6)
                        }
                    }
                };
                let x: Vec<f64> = (start..start + len).map(|k| k as f64).collect();
                let w = fornberg_weights(i as f64, &x, order);
                let scale = h.powi(order as i32);
                (start, w[order].iter().map(|v| v / scale).collect())
            })
            .collect();
        Self { entries }
    }

    pub fn first(n: usize, h: f64) -> Self {
        Self::build(n, h, 1)
    }

    pub fn second(n: usize, h: f64) -> Self {
        Self::build(n, h, 2)
    }
}

/// First- and second-derivative stencils for every axis of a grid.
#[derive(Debug, Clone)]
pub struct GridStencils {
    pub grid: BoxGrid,
    pub d1: Vec<AxisStencil>,
    pub d2: Vec<AxisStencil>,
}

impl GridStencils {
    pub fn new(grid: &BoxGrid) -> Result<Self> {
        if let Some(a) = grid.resolution().iter().position(|&n| n < MIN_NODES) {
            return Err(Error::Input(format!(
                "axis {a} has {} nodes; stencils need at least {MIN_NODES}",
                grid.resolution()[a]
            )));
        }
        let d = grid.dim();
        Ok(Self {
            grid: grid.clone(),
            d1: (0..d)
                .map(|a| AxisStencil::first(grid.resolution()[a], grid.spacing(a)))
                .collect(),
            d2: (0..d)
                .map(|a| AxisStencil::second(grid.resolution()[a], grid.spacing(a)))
                .collect(),
        })
    }

    /// Apply a stencil along `axis` to nodal values.
    pub fn apply(&self, st: &AxisStencil, axis: usize, values: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let stride = g.stride(axis);
        let n = g.resolution()[axis];
        let mut out = vec![0.0; values.len()];
        for (node, o) in out.iter_mut().enumerate() {
            let i = (node / stride) % n;
            let base = node - i * stride;
            let (start, w) = &st.entries[i];
            *o = w
                .iter()
                .enumerate()
                .map(|(k, wk)| wk * values[base + (start + k) * stride])
                .sum();
        }
        out
    }

    pub fn d1(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        self.apply(&self.d1[axis], axis, values)
    }

    pub fn d2(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        self.apply(&self.d2[axis], axis, values)
    }

    /// Gradient components, `grad[axis][node]`.
    pub fn gradient(&self, values: &[f64]) -> Vec<Vec<f64>> {
        (0..self.grid.dim()).map(|a| self.d1(a, values)).collect()
    }

    /// Hessian matrix per node: `D2_j` on the diagonal, `D1_j D1_k` off it.
    pub fn hessian(&self, values: &[f64]) -> Vec<DMatrix<f64>> {
        let d = self.grid.dim();
        let grad = self.gradient(values);
        let mut comps = vec![vec![Vec::new(); d]; d];
        for j in 0..d {
            comps[j][j] = self.d2(j, values);
            for k in (j + 1)..d {
                let a = self.d1(j, &grad[k]);
                let b = self.d1(k, &grad[j]);
                comps[j][k] = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            }
        }
        (0..values.len())
            .map(|node| {
                DMatrix::from_fn(d, d, |r, c| {
                    let (j, k) = if r <= c { (r, c) } else { (c, r) };
                    comps[j][k][node]
                })
            })
            .collect()
    }

    /// `sum_j D2_j`.
    pub fn laplacian(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        for a in 0..self.grid.dim() {
            for (o, v) in out.iter_mut().zip(self.d2(a, values)) {
                *o += v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_second_derivative_weights() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let want = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w[2].iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn quartic_polynomials_are_differentiated_exactly() {
        let g = BoxGrid::new(vec![-1.0, 0.0], vec![1.0, 2.0], vec![9, 11]).unwrap();
        let st = GridStencils::new(&g).unwrap();
        let f = g.sample(|u| u[0].powi(4) + u[0] * u[1].powi(3) - 2.0 * u[1] * u[1]);
        let h = st.hessian(&f);
        let grad = st.gradient(&f);
        for node in 0..g.node_count() {
            let u = g.coordinates(node);
            assert!((grad[0][node] - (4.0 * u[0].powi(3) + u[1].powi(3))).abs() < 1e-10);
            assert!((h[node][(0, 0)] - 12.0 * u[0] * u[0]).abs() < 1e-9);
            assert!((h[node][(0, 1)] - 3.0 * u[1] * u[1]).abs() < 1e-9);
            assert!((h[node][(1, 1)] - (6.0 * u[0] * u[1] - 4.0)).abs() < 1e-9);
        }
    }
}
