use nalgebra::DMatrix;

use super::field::FormField;
use super::grid::GridTorus;
use super::metric::MetricField;
use super::spectral::differentiate;
use crate::error::{Error, Result};
use crate::index::{complement, index_position, index_sets, merge};

/// Pointwise exterior product.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    if a.base() != b.base() {
        return Err(Error::Dimension("wedge of forms on different grids".into()));
    }
    let dim = a.base().dim();
    let degree = a.degree() + b.degree();
    if degree > dim {
        return Err(Error::Degree(format!(
            "wedge of degrees {} and {} overflows dimension {dim}",
            a.degree(),
            b.degree()
        )));
    }
    let sa = index_sets(dim, a.degree());
    let sb = index_sets(dim, b.degree());
    let mut table = Vec::new();
    for (ia, i) in sa.iter().enumerate() {
        for (jb, j) in sb.iter().enumerate() {
            if let Some((k, sign)) = merge(i, j) {
                table.push((ia, jb, index_position(dim, &k), sign));
            }
        }
    }
    let mut out = FormField::zeros(a.base().clone(), degree)?;
    let n = a.base().node_count();
    let mut comps = vec![vec![0.0; n]; out.components().len()];
    for &(ia, jb, kc, sign) in &table {
        let (ca, cb) = (&a.components()[ia], &b.components()[jb]);
        let dst = &mut comps[kc];
        for node in 0..n {
            dst[node] += sign * ca[node] * cb[node];
        }
    }
    out = FormField::from_components(out.base().clone(), degree, comps);
    Ok(out)
}

/// Exterior derivative with spectral differentiation along each axis.
pub fn exterior_derivative(a: &FormField) -> Result<FormField> {
    let grid = a.base();
    let dim = grid.dim();
    if a.degree() >= dim {
        return Err(Error::Degree(format!(
            "exterior derivative of a degree-{} form on a {dim}-torus",
            a.degree()
        )));
    }
    let n = grid.node_count();
    let targets = index_sets(dim, a.degree() + 1);
    let mut comps = vec![vec![0.0; n]; targets.len()];
    // d(f dx^I) = sum_j df/dx^j dx^j ^ dx^I; place dx^j at its sorted slot.
    for (ci, set) in index_sets(dim, a.degree()).iter().enumerate() {
        let coeff = &a.components()[ci];
        if coeff.iter().all(|v| *v == 0.0) {
            continue;
        }
        for axis in 0..dim {
            if set.contains(&axis) {
                continue;
            }
            let (k, sign) = merge(&[axis], set).expect("axis not in set");
            let deriv = differentiate(grid, coeff, axis);
            let dst = &mut comps[index_position(dim, &k)];
            for node in 0..n {
                dst[node] += sign * deriv[node];
            }
        }
    }
    Ok(FormField::from_components(grid.clone(), a.degree() + 1, comps))
}

fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]).determinant()
}

/// Linear map sending the coefficients of a `k`-form to those of its star.
fn star_matrix(g: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let dim = g.nrows();
    let inv = g.clone().try_inverse().expect("metric validated as positive definite");
    let vol = g.determinant().sqrt();
    let src = index_sets(dim, k);
    let dst = index_sets(dim, dim - k);
    let mut t = DMatrix::zeros(dst.len(), src.len());
    for (r, j) in dst.iter().enumerate() {
        let raised = complement(dim, j);
        let (_, sign) = merge(&raised, j).expect("complement is disjoint");
        for (c, i) in src.iter().enumerate() {
            t[(r, c)] = vol * sign * minor(&inv, &raised, i);
        }
    }
    t
}

/// Metric Hodge star, oriented by ascending axis order.
pub fn hodge_star(a: &FormField, g: &MetricField) -> Result<FormField> {
    if a.base() != g.base() {
        return Err(Error::Dimension("form and metric on different grids".into()));
    }
    let dim = a.base().dim();
    let k = a.degree();
    let n = a.base().node_count();
    let ndst = index_sets(dim, dim - k).len();
    let mut comps = vec![vec![0.0; n]; ndst];
    let apply = |t: &DMatrix<f64>, node: usize, comps: &mut Vec<Vec<f64>>| {
        for (r, dst) in comps.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (c, src) in a.components().iter().enumerate() {
                acc += t[(r, c)] * src[node];
            }
            dst[node] = acc;
        }
    };
    match g.as_uniform() {
        Some(m) => {
            let t = star_matrix(m, k);
            for node in 0..n {
                apply(&t, node, &mut comps);
            }
        }
        None => {
            for node in 0..n {
                let t = star_matrix(g.at(node), k);
                apply(&t, node, &mut comps);
            }
        }
    }
    Ok(FormField::from_components(a.base().clone(), dim - k, comps))
}

/// `integral of a ^ *b` over the torus.
pub fn l2_inner(a: &FormField, b: &FormField, g: &MetricField) -> Result<f64> {
    if a.degree() != b.degree() {
        return Err(Error::Degree(format!(
            "inner product of degrees {} and {}",
            a.degree(),
            b.degree()
        )));
    }
    let top = wedge(a, &hodge_star(b, g)?)?;
    top.integrate_top()
}

/// `(|da|_inf, |d*a|_inf)` for a 1-form; both vanish for a harmonic form.
pub fn harmonicity_residual(a: &FormField, g: &MetricField) -> Result<(f64, f64)> {
    if a.degree() != 1 {
        return Err(Error::Degree(format!(
            "harmonicity residual is defined for 1-forms, got degree {}",
            a.degree()
        )));
    }
    // On a circle every 1-form is closed.
    let closed = if a.base().dim() > 1 {
        exterior_derivative(a)?.norm_inf()
    } else {
        0.0
    };
    let coclosed = exterior_derivative(&hodge_star(a, g)?)?.norm_inf();
    Ok((closed, coclosed))
}

/// Covector `dx^axis` as a constant 1-form.
pub fn coordinate_one_form(base: &GridTorus, axis: usize) -> FormField {
    let mut c = vec![0.0; base.dim()];
    c[axis] = 1.0;
    FormField::constant(base.clone(), 1, &c).expect("axis within dimension")
}
