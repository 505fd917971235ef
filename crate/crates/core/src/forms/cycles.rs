use super::field::FormField;
use super::grid::GridTorus;
use super::ops::wedge;
use crate::error::{Error, Result};
use crate::index::complement;

/// An integration cycle on a grid torus.
#[derive(Debug, Clone, PartialEq)]
pub enum Cycle {
    /// The closed grid line along `axis` through node `through`.
    Loop { axis: usize, through: Vec<usize> },
    /// The codimension-one subtorus `{x_normal = const}` through `through`,
    /// oriented so that the dual classes pair to `+1`.
    Slab { normal: usize, through: Vec<usize> },
}

impl Cycle {
    pub fn axis_loop(dim: usize, axis: usize) -> Self {
        Cycle::Loop {
            axis,
            through: vec![0; dim],
        }
    }

    pub fn slab(dim: usize, normal: usize) -> Self {
        Cycle::Slab {
            normal,
            through: vec![0; dim],
        }
    }
}

/// Trapezoidal quadrature of a form over a cycle; on periodic lines and slabs
/// this is spectrally accurate for smooth integrands.
pub fn integrate_cycle(a: &FormField, cycle: &Cycle) -> Result<f64> {
    let grid = a.base();
    let dim = grid.dim();
    match cycle {
        Cycle::Loop { axis, through } => {
            if a.degree() != 1 {
                return Err(Error::Degree(format!(
                    "loop integral needs a 1-form, got degree {}",
                    a.degree()
                )));
            }
            check_cycle(grid, *axis, through)?;
            let coeff = a.component(&[*axis]);
            let mut node = through.clone();
            let mut acc = 0.0;
            for i in 0..grid.resolution()[*axis] {
                node[*axis] = i;
                acc += coeff[grid.linear_index(&node)];
            }
            Ok(acc * grid.spacing(*axis))
        }
        Cycle::Slab { normal, through } => {
            if a.degree() + 1 != dim {
                return Err(Error::Degree(format!(
                    "slab integral needs degree {}, got {}",
                    dim - 1,
                    a.degree()
                )));
            }
            check_cycle(grid, *normal, through)?;
            let tangent = complement(dim, &[*normal]);
            let coeff = a.component(&tangent);
            let sign = if normal % 2 == 0 { 1.0 } else { -1.0 };
            let mut acc = 0.0;
            let mut weight = 1.0;
            for &ax in &tangent {
                weight *= grid.spacing(ax);
            }
            // Walk every node of the slab.
            let count: usize = tangent.iter().map(|&ax| grid.resolution()[ax]).product();
            let mut node = through.clone();
            for flat in 0..count {
                let mut rem = flat;
                for &ax in tangent.iter().rev() {
                    let n = grid.resolution()[ax];
                    node[ax] = rem % n;
                    rem /= n;
                }
                acc += coeff[grid.linear_index(&node)];
            }
            Ok(sign * acc * weight)
        }
    }
}

fn check_cycle(grid: &GridTorus, axis: usize, through: &[usize]) -> Result<()> {
    if axis >= grid.dim() || through.len() != grid.dim() {
        return Err(Error::Dimension(format!(
            "cycle axis {axis} / base point of length {} on a {}-torus",
            through.len(),
            grid.dim()
        )));
    }
    Ok(())
}

/// Axis loops `A_i`, Poincare-dual slabs `B_i`, and constant dual classes with
/// `int_{A_i} alpha_j = delta_ij`, `int_{B_i} beta_j = delta_ij` and
/// `int_L alpha_i ^ beta_l = delta_il`.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub one_cycles: Vec<Cycle>,
    pub dual_cells: Vec<Cycle>,
    pub alpha: Vec<FormField>,
    pub beta: Vec<FormField>,
}

impl CycleBasis {
    pub fn standard(grid: &GridTorus) -> Self {
        let dim = grid.dim();
        let one_cycles = (0..dim).map(|i| Cycle::axis_loop(dim, i)).collect();
        let dual_cells = (0..dim).map(|i| Cycle::slab(dim, i)).collect();
        let alpha = (0..dim)
            .map(|i| {
                let mut c = vec![0.0; dim];
                c[i] = 1.0 / grid.period()[i];
                FormField::constant(grid.clone(), 1, &c).expect("degree 1 fits")
            })
            .collect();
        let beta = (0..dim)
            .map(|l| {
                // (-1)^l dx^0 ^ .. (omit l) .. ^ dx^{d-1}, normalized by slab area.
                let tangent = complement(dim, &[l]);
                let area: f64 = tangent.iter().map(|&ax| grid.period()[ax]).product();
                let mut f = FormField::zeros(grid.clone(), dim - 1).expect("degree fits");
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let sets = f.index_sets();
                let pos = sets.iter().position(|s| *s == tangent).expect("tangent set");
                let mut coeffs = vec![0.0; sets.len()];
                coeffs[pos] = sign / area;
                f = FormField::constant(grid.clone(), dim - 1, &coeffs).expect("sized");
                f
            })
            .collect();
        Self {
            one_cycles,
            dual_cells,
            alpha,
            beta,
        }
    }

    /// Largest deviation from the three duality relations.
    pub fn duality_residual(&self) -> Result<f64> {
        let m = self.one_cycles.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((integrate_cycle(&self.alpha[j], &self.one_cycles[i])? - delta).abs());
                worst = worst.max((integrate_cycle(&self.beta[j], &self.dual_cells[i])? - delta).abs());
                let top = wedge(&self.alpha[i], &self.beta[j])?;
                worst = worst.max((top.integrate_top()? - delta).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ops::coordinate_one_form;
    use std::f64::consts::PI;

    #[test]
    fn loop_integrals_of_coordinate_forms() {
        for dim in 1..=3 {
            let g = GridTorus::cube(dim, 8).unwrap();
            let dx1 = coordinate_one_form(&g, 0);
            assert!((integrate_cycle(&dx1, &Cycle::axis_loop(dim, 0)).unwrap() - 1.0).abs() < 1e-14);
            if dim > 1 {
                let dx2 = coordinate_one_form(&g, 1);
                assert!(integrate_cycle(&dx2, &Cycle::axis_loop(dim, 0)).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn periodic_perturbation_integrates_away() {
        let g = GridTorus::cube(2, 16).unwrap();
        let a = FormField::from_fn(g, 1, |x| vec![1.0 + 0.3 * (2.0 * PI * x[0]).sin(), 0.0]).unwrap();
        let v = integrate_cycle(&a, &Cycle::axis_loop(2, 0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_mismatch() {
        let g = GridTorus::cube(3, 8).unwrap();
        let a = coordinate_one_form(&g, 0);
        assert!(matches!(integrate_cycle(&a, &Cycle::slab(3, 0)), Err(Error::Degree(_))));
        let f = FormField::scalar(g, |_| 1.0);
        assert!(matches!(integrate_cycle(&f, &Cycle::axis_loop(3, 0)), Err(Error::Degree(_))));
    }

    #[test]
    fn standard_basis_is_dual() {
        for dim in 1..=3 {
            let periods: Vec<f64> = (0..dim).map(|k| 1.0 + 0.5 * k as f64).collect();
            let g = GridTorus::new(vec![8; dim], periods).unwrap();
            assert!(CycleBasis::standard(&g).duality_residual().unwrap() < 1e-10);
        }
    }
}
