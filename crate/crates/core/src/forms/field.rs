use super::grid::GridTorus;
use crate::error::{Error, Result};
use crate::index::{binomial, index_position, index_sets};

/// A `k`-form on a periodic grid: one real coefficient per increasing index
/// tuple per node, tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    base: GridTorus,
    degree: usize,
    /// `components[c][node]`
    components: Vec<Vec<f64>>,
}

impl FormField {
    pub fn zeros(base: GridTorus, degree: usize) -> Result<Self> {
        if degree > base.dim() {
            return Err(Error::Degree(format!(
                "degree {degree} exceeds dimension {}",
                base.dim()
            )));
        }
        let comps = binomial(base.dim(), degree);
        let n = base.node_count();
        Ok(Self {
            base,
            degree,
            components: vec![vec![0.0; n]; comps],
        })
    }

    /// Constant coefficients, one per index tuple.
    pub fn constant(base: GridTorus, degree: usize, coeffs: &[f64]) -> Result<Self> {
        let mut f = Self::zeros(base, degree)?;
        if coeffs.len() != f.components.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} components",
                coeffs.len(),
                f.components.len()
            )));
        }
        for (comp, &c) in f.components.iter_mut().zip(coeffs) {
            comp.iter_mut().for_each(|v| *v = c);
        }
        Ok(f)
    }

    /// Build from a function of node coordinates returning all coefficients.
    pub fn from_fn<F>(base: GridTorus, degree: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut out = Self::zeros(base, degree)?;
        let ncomp = out.components.len();
        for node in 0..out.base.node_count() {
            let x = out.base.coordinates(node);
            let vals = f(&x);
            if vals.len() != ncomp {
                return Err(Error::Dimension(format!(
                    "closure returned {} coefficients, expected {ncomp}",
                    vals.len()
                )));
            }
            for (c, v) in vals.into_iter().enumerate() {
                out.components[c][node] = v;
            }
        }
        Ok(out)
    }

    /// A scalar field (0-form) sampled from `f`.
    pub fn scalar<F: Fn(&[f64]) -> f64>(base: GridTorus, f: F) -> Self {
        Self::from_fn(base, 0, |x| vec![f(x)]).expect("0-forms always fit")
    }

    pub(crate) fn from_components(
        base: GridTorus,
        degree: usize,
        components: Vec<Vec<f64>>,
    ) -> Self {
        debug_assert_eq!(components.len(), binomial(base.dim(), degree));
        Self {
            base,
            degree,
            components,
        }
    }

    pub fn base(&self) -> &GridTorus {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    /// Coefficient array of the tuple `set` (0-based, increasing).
    pub fn component(&self, set: &[usize]) -> &[f64] {
        &self.components[index_position(self.base.dim(), set)]
    }

    pub fn index_sets(&self) -> Vec<Vec<usize>> {
        index_sets(self.base.dim(), self.degree)
    }

    /// All coefficients at one node.
    pub fn at(&self, node: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[node]).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::Dimension("forms live on different grids".into()));
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "degrees {} and {} differ",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// `self + scale * other`
    pub fn axpy(&self, scale: f64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + scale * y).collect())
            .collect();
        Ok(Self::from_components(self.base.clone(), self.degree, components))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| c.iter().map(|v| v * s).collect())
            .collect();
        Self::from_components(self.base.clone(), self.degree, components)
    }

    /// Integral of a top-degree form over the whole torus (rectangle rule).
    pub fn integrate_top(&self) -> Result<f64> {
        if self.degree != self.base.dim() {
            return Err(Error::Degree(format!(
                "integration over the torus needs degree {}, got {}",
                self.base.dim(),
                self.degree
            )));
        }
        Ok(self.components[0].iter().sum::<f64>() * self.base.cell_volume())
    }
}
