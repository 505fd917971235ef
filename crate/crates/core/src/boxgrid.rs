//! Tensor grids on closed boxes `[lower_1, upper_1] x .. x [lower_m, upper_m]`
//! with nodes on both endpoints; row-major, last axis fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::NodeSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
}

impl BoxGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let d = resolution.len();
        if d == 0 || lower.len() != d || upper.len() != d {
            return Err(Error::Dimension(format!(
                "box grid bounds {}/{} for {d} axes",
                lower.len(),
                upper.len()
            )));
        }
        for a in 0..d {
            if resolution[a] < 2 {
                return Err(Error::Input(format!("axis {a} needs at least 2 nodes")));
            }
            if !(upper[a] > lower[a]) || !lower[a].is_finite() || !upper[a].is_finite() {
                return Err(Error::Input(format!(
                    "axis {a} bounds [{}, {}] are not an interval",
                    lower[a], upper[a]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            resolution,
        })
    }

    /// `[lower, upper]^dim` with `n` nodes per axis.
    pub fn cube(dim: usize, lower: f64, upper: f64, n: usize) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim], vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.resolution[axis] - 1) as f64
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.resolution[axis + 1..].iter().product()
    }

    pub fn axis_coordinate(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.resolution[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.spacing(axis)
        }
    }

    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.resolution[axis])
            .map(|i| self.axis_coordinate(axis, i))
            .collect()
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.resolution)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = idx % self.resolution[a];
            idx /= self.resolution[a];
        }
        out
    }

    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axis_coordinate(a, i))
            .collect()
    }

    /// Nodes with no index on the boundary of the box.
    pub fn is_interior(&self, idx: usize) -> bool {
        self.multi_index(idx)
            .iter()
            .zip(&self.resolution)
            .all(|(&i, &n)| i > 0 && i + 1 < n)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(a, &x)| x >= self.lower[a] && x <= self.upper[a])
    }

    /// The grid formed by every other node; needs an odd count on each axis.
    pub fn coarsened(&self) -> Result<Self> {
        if self.resolution.iter().any(|&n| n % 2 == 0 || n < 5) {
            return Err(Error::Input(format!(
                "coarsening needs odd resolutions >= 5, got {:?}",
                self.resolution
            )));
        }
        Self::new(
            self.lower.clone(),
            self.upper.clone(),
            self.resolution.iter().map(|n| (n + 1) / 2).collect(),
        )
    }

    /// Index of the fine node coinciding with coarse node `idx` of [`coarsened`](Self::coarsened).
    pub fn refine_index(&self, coarse: &BoxGrid, idx: usize) -> usize {
        let m: Vec<usize> = coarse.multi_index(idx).iter().map(|i| 2 * i).collect();
        self.linear_index(&m)
    }

    /// The grid of interior nodes (`1..n-1` on each axis).
    pub fn interior(&self) -> Result<Self> {
        self.inset(1)
    }

    /// The grid of nodes `k..n-k` on each axis.
    pub fn inset(&self, k: usize) -> Result<Self> {
        let d = self.dim();
        if self.resolution.iter().any(|&n| n < 2 * k + 2) {
            return Err(Error::Domain(format!(
                "resolution {:?} leaves no box after removing {k} layers",
                self.resolution
            )));
        }
        Self::new(
            (0..d).map(|a| self.axis_coordinate(a, k)).collect(),
            (0..d)
                .map(|a| self.axis_coordinate(a, self.resolution[a] - 1 - k))
                .collect(),
            self.resolution.iter().map(|n| n - 2 * k).collect(),
        )
    }

    /// Index in `self` of node `idx` of `self.inset(k)`.
    pub fn inset_index(&self, k: usize, inner: &BoxGrid, idx: usize) -> usize {
        let m: Vec<usize> = inner.multi_index(idx).iter().map(|i| i + k).collect();
        self.linear_index(&m)
    }

    /// Sample `f` at every node.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        (0..self.node_count())
            .map(|i| f(&self.coordinates(i)))
            .collect()
    }
}

impl NodeSet for BoxGrid {
    fn dim(&self) -> usize {
        BoxGrid::dim(self)
    }
    fn node_count(&self) -> usize {
        BoxGrid::node_count(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_nodes() {
        let g = BoxGrid::new(vec![-1.0, 0.0], vec![1.0, 3.0], vec![5, 4]).unwrap();
        assert_eq!(g.coordinates(0), vec![-1.0, 0.0]);
        assert_eq!(g.coordinates(g.node_count() - 1), vec![1.0, 3.0]);
        assert_eq!(g.multi_index(g.linear_index(&[3, 2])), vec![3, 2]);
        assert!(!g.is_interior(0));
        assert!(g.is_interior(g.linear_index(&[1, 1])));
    }

    #[test]
    fn coarse_nodes_sit_on_fine_nodes() {
        let g = BoxGrid::cube(2, 0.0, 1.0, 9).unwrap();
        let c = g.coarsened().unwrap();
        for i in 0..c.node_count() {
            assert_eq!(c.coordinates(i), g.coordinates(g.refine_index(&c, i)));
        }
        assert!(BoxGrid::cube(2, 0.0, 1.0, 8).unwrap().coarsened().is_err());
    }
}
