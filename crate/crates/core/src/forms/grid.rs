use crate::error::{Error, Result};

/// Smallest resolution accepted per axis; coarser grids alias the mode-1 fields.
pub const MIN_RESOLUTION: usize = 8;

/// A periodic grid on the flat torus `prod_k R / period_k Z`.
///
/// Nodes are stored row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTorus {
    resolution: Vec<usize>,
    period: Vec<f64>,
    strides: Vec<usize>,
}

impl GridTorus {
    pub fn new(resolution: Vec<usize>, period: Vec<f64>) -> Result<Self> {
        if resolution.is_empty() {
            return Err(Error::Dimension("grid torus needs at least one axis".into()));
        }
        if resolution.len() != period.len() {
            return Err(Error::Dimension(format!(
                "{} resolutions but {} periods",
                resolution.len(),
                period.len()
            )));
        }
        if let Some(&n) = resolution.iter().find(|&&n| n < MIN_RESOLUTION) {
            return Err(Error::Input(format!(
                "resolution {n} below the minimum {MIN_RESOLUTION}"
            )));
        }
        if let Some(p) = period.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(Error::Input(format!("period must be positive, got {p}")));
        }
        let mut strides = vec![1; resolution.len()];
        for k in (0..resolution.len() - 1).rev() {
            strides[k] = strides[k + 1] * resolution[k + 1];
        }
        Ok(Self {
            resolution,
            period,
            strides,
        })
    }

    /// Unit-period torus with the same resolution on every axis.
    pub fn cube(dim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn period(&self) -> &[f64] {
        &self.period
    }

    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.resolution[axis] as f64
    }

    /// Volume of one grid cell (quadrature weight of every node).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    pub fn volume(&self) -> f64 {
        self.period.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.strides)
            .zip(&self.resolution)
            .map(|((&i, &s), &n)| (i % n) * s)
            .sum()
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for k in 0..self.dim() {
            out[k] = idx / self.strides[k];
            idx %= self.strides[k];
        }
        out
    }

    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(k, &i)| i as f64 * self.spacing(k))
            .collect()
    }

    /// Starting offsets of every grid line running along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&idx| (idx / self.strides[axis]) % self.resolution[axis] == 0)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grids() {
        assert!(GridTorus::new(vec![8, 7], vec![1.0, 1.0]).is_err());
        assert!(GridTorus::new(vec![8], vec![0.0]).is_err());
        assert!(GridTorus::new(vec![8, 8], vec![1.0]).is_err());
    }

    #[test]
    fn indexing_round_trips() {
        let g = GridTorus::new(vec![8, 9, 10], vec![1.0, 2.0, 0.5]).unwrap();
        for idx in [0, 1, 17, 333, g.node_count() - 1] {
            assert_eq!(g.linear_index(&g.multi_index(idx)), idx);
        }
        let c = g.coordinates(g.linear_index(&[1, 2, 3]));
        assert!((c[0] - 0.125).abs() < 1e-15);
        assert!((c[1] - 4.0 / 9.0).abs() < 1e-15);
        assert!((c[2] - 0.15).abs() < 1e-15);
        assert_eq!(g.line_starts(1).len(), 80);
    }
}
