use nalgebra::{DMatrix, SymmetricEigen};

use super::grid::GridTorus;
use crate::error::{Error, Result};

/// Anything that enumerates nodes of a fixed spatial dimension.
pub trait NodeSet {
    fn dim(&self) -> usize;
    fn node_count(&self) -> usize;
}

impl NodeSet for GridTorus {
    fn dim(&self) -> usize {
        GridTorus::dim(self)
    }
    fn node_count(&self) -> usize {
        GridTorus::node_count(self)
    }
}

/// Eigenvalue floor below which a metric node counts as degenerate.
pub const METRIC_EIG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Components {
    Uniform(DMatrix<f64>),
    PerNode(Vec<DMatrix<f64>>),
}

/// A symmetric positive definite bilinear form at every node of a grid.
#[derive(Debug, Clone)]
pub struct MetricField<G = GridTorus> {
    base: G,
    components: Components,
}

fn check_node(node: usize, m: &DMatrix<f64>, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Dimension(format!(
            "metric at node {node} is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Metric {
            node,
            detail: format!("asymmetry {asym:e}"),
        });
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.min();
    if !(min > METRIC_EIG_FLOOR * scale) {
        return Err(Error::Metric {
            node,
            detail: format!("smallest eigenvalue {min:e}"),
        });
    }
    Ok(())
}

impl<G: NodeSet> MetricField<G> {
    /// The same matrix at every node.
    pub fn uniform(base: G, g: DMatrix<f64>) -> Result<Self> {
        check_node(0, &g, base.dim())?;
        Ok(Self {
            base,
            components: Components::Uniform(g),
        })
    }

    pub fn per_node(base: G, nodes: Vec<DMatrix<f64>>) -> Result<Self> {
        if nodes.len() != base.node_count() {
            return Err(Error::Dimension(format!(
                "{} metric nodes for a grid of {}",
                nodes.len(),
                base.node_count()
            )));
        }
        for (i, m) in nodes.iter().enumerate() {
            check_node(i, m, base.dim())?;
        }
        Ok(Self {
            base,
            components: Components::PerNode(nodes),
        })
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn at(&self, node: usize) -> &DMatrix<f64> {
        match &self.components {
            Components::Uniform(g) => g,
            Components::PerNode(v) => &v[node],
        }
    }

    /// The shared matrix when the field is constant.
    pub fn as_uniform(&self) -> Option<&DMatrix<f64>> {
        match &self.components {
            Components::Uniform(g) => Some(g),
            Components::PerNode(_) => None,
        }
    }
}

impl MetricField<GridTorus> {
    /// Flat Euclidean metric on the torus.
    pub fn euclidean(base: GridTorus) -> Self {
        let d = base.dim();
        Self {
            base,
            components: Components::Uniform(DMatrix::identity(d, d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_indefinite_node_with_index() {
        let g = GridTorus::cube(2, 8).unwrap();
        let mut nodes = vec![DMatrix::identity(2, 2); 64];
        nodes[5] = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        match MetricField::per_node(g, nodes) {
            Err(Error::Metric { node, .. }) => assert_eq!(node, 5),
            other => panic!("expected metric error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let g = GridTorus::cube(2, 8).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 2.0]);
        assert!(MetricField::uniform(g, m).is_err());
    }
}
