//! Legendre duality `psi(v) = sup_u (<u, v> - phi(u))` for gridded convex potentials.
//!
//! The discrete transform conjugates the piecewise-linear data one axis at a
//! time (lower hull plus a monotone sweep), which is exact for the
//! piecewise-linear interpolant and locates the maximizing node. Each maximizer
//! is then polished by Newton's method on `grad Phi(u) = v`, `Phi` the quintic
//! interpolant, so that `psi` inherits the interpolation accuracy.

use nalgebra::DVector;

use super::potential::HessianPotential;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LegendreOptions {
    /// Fraction of the gradient-image box trimmed from each side of the dual grid.
    pub margin: f64,
    /// Dual grid node counts; defaults to the primal ones.
    pub resolution: Option<Vec<usize>>,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        Self {
            margin: 0.05,
            resolution: None,
            newton_tol: 1e-13,
            max_newton: 50,
        }
    }
}

/// A potential and its Legendre dual on a grid inside the gradient image.
#[derive(Debug, Clone)]
pub struct LegendrePair {
    pub primal: HessianPotential,
    pub dual: HessianPotential,
    /// `max |phi(u) + psi(grad phi(u)) - <u, grad phi(u)>|` over interior
    /// primal nodes whose gradient lies in the dual grid.
    pub fenchel_residual: f64,
    /// Paired points `(u, v)` with `v = grad phi(u)`, one per dual node.
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

/// `max_i (x_i v - y_i)` for ascending queries `v`, returning values and maximizing indices.
fn conjugate_1d(x: &[f64], y: &[f64], v: &[f64]) -> (Vec<f64>, Vec<usize>) {
    // lower convex hull of (x_i, y_i), x ascending
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(v.len());
    let mut arg = Vec::with_capacity(v.len());
    let mut k = 0;
    for &q in v {
        while k + 1 < hull.len() {
            let (a, b) = (hull[k], hull[k + 1]);
            let slope = (y[b] - y[a]) / (x[b] - x[a]);
            if slope < q {
                k += 1;
            } else {
                break;
            }
        }
        let i = hull[k];
        out.push(x[i] * q - y[i]);
        arg.push(i);
    }
    (out, arg)
}

fn flat_index(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

/// Box of dual points whose maximizer is interior, from the gradient on the faces.
pub fn gradient_image_box(pot: &HessianPotential, margin: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = pot.grid();
    let grad = pot.gradient()?;
    let d = g.dim();
    let mut lo = vec![f64::NEG_INFINITY; d];
    let mut hi = vec![f64::INFINITY; d];
    for node in 0..g.node_count() {
        let idx = g.multi_index(node);
        for a in 0..d {
            if idx[a] == 0 {
                lo[a] = lo[a].max(grad[a][node]);
            }
            if idx[a] + 1 == g.resolution()[a] {
                hi[a] = hi[a].min(grad[a][node]);
            }
        }
    }
    for a in 0..d {
        if !(hi[a] > lo[a]) {
            return Err(Error::Domain(format!(
                "gradient image has no room along axis {a}: [{}, {}]",
                lo[a], hi[a]
            )));
        }
        let w = hi[a] - lo[a];
        lo[a] += margin * w;
        hi[a] -= margin * w;
    }
    Ok((lo, hi))
}

/// Discrete conjugate on the nodes of `dual`: values and maximizing primal node per dual node.
pub fn discrete_conjugate(pot: &HessianPotential, dual: &BoxGrid) -> Result<(Vec<f64>, Vec<usize>)> {
    let g = pot.grid();
    let d = g.dim();
    if dual.dim() != d {
        return Err(Error::Dimension("dual grid dimension differs".into()));
    }
    let mut shape: Vec<usize> = g.resolution().to_vec();
    // at stage k, `y` holds the function being conjugated along axis k
    let mut y: Vec<f64> = pot.values().to_vec();
    let mut args: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(d);
    for k in 0..d {
        let xs = g.axis_coordinates(k);
        let vs = dual.axis_coordinates(k);
        let mut new_shape = shape.clone();
        new_shape[k] = vs.len();
        let count: usize = new_shape.iter().product();
        let mut out = vec![0.0; count];
        let mut arg = vec![0usize; count];
        let lines: usize = shape.iter().enumerate().filter(|&(a, _)| a != k).map(|(_, &n)| n).product();
        for line in 0..lines {
            // enumerate the other indices
            let mut rest = line;
            let mut idx = vec![0usize; d];
            for a in (0..d).rev() {
                if a == k {
                    continue;
                }
                idx[a] = rest % shape[a];
                rest /= shape[a];
            }
            let ys: Vec<f64> = (0..shape[k])
                .map(|i| {
                    idx[k] = i;
                    y[flat_index(&shape, &idx)]
                })
                .collect();
            let (vals, am) = conjugate_1d(&xs, &ys, &vs);
            for (j, (val, a)) in vals.into_iter().zip(am).enumerate() {
                idx[k] = j;
                let f = flat_index(&new_shape, &idx);
                out[f] = val;
                arg[f] = a;
            }
        }
        args.push((new_shape.clone(), arg));
        shape = new_shape;
        // the next stage conjugates -out
        y = if k + 1 < d { out.iter().map(|v| -v).collect() } else { out };
    }
    // backtrack maximizing primal nodes
    let mut nodes = Vec::with_capacity(dual.node_count());
    for vnode in 0..dual.node_count() {
        let vidx = dual.multi_index(vnode);
        let mut idx = vidx.clone();
        for k in (0..d).rev() {
            let (ref sh, ref arg) = args[k];
            let mut probe = idx.clone();
            probe[k] = vidx[k];
            let ui = arg[flat_index(sh, &probe)];
            idx[k] = ui;
        }
        nodes.push(g.linear_index(&idx));
    }
    Ok((y, nodes))
}

/// Newton polish of `grad Phi(u) = v` from `u0`; returns the maximizer.
fn polish(pot: &HessianPotential, v: &[f64], u0: Vec<f64>, opts: &LegendreOptions) -> Result<Vec<f64>> {
    let ip = pot.interpolant()?;
    let g = pot.grid();
    let d = g.dim();
    let target = DVector::from_column_slice(v);
    let mut u = u0;
    let mut history: Vec<f64> = Vec::new();
    let mut best = (f64::NEG_INFINITY, u.clone());
    for _ in 0..opts.max_newton {
        let jet = ip.jet(&u)?;
        let r = &jet.gradient - &target;
        let rn = r.amax();
        history.push(rn);
        if rn <= opts.newton_tol * (1.0 + target.amax()) {
            return Ok(u);
        }
        let objective = u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - jet.value;
        if objective > best.0 {
            best = (objective, u.clone());
        }
        // The interpolant gradient jumps slightly across cell faces, so a
        // maximizer on a face has no exact root; settle for the best iterate.
        let k = history.len();
        if k > 4 && history[k - 4..].iter().all(|&h| h > 0.5 * history[k - 5]) {
            return Ok(best.1);
        }
        let chol = jet.hessian.clone().cholesky().ok_or_else(|| Error::Convexity {
            node: usize::MAX,
            coords: u.clone(),
            min_eig: jet.hessian.clone().symmetric_eigenvalues().min(),
        })?;
        let step = chol.solve(&r);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = (0..d).map(|a| u[a] - alpha * step[a]).collect();
            if g.contains(&trial) {
                u = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-8 {
                return Err(Error::Domain(format!(
                    "maximizer for v = {v:?} leaves the primal box"
                )));
            }
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_newton,
        history,
    })
}

pub fn legendre_transform(pot: &HessianPotential) -> Result<LegendrePair> {
    legendre_transform_with(pot, &LegendreOptions::default())
}

pub fn legendre_transform_with(pot: &HessianPotential, opts: &LegendreOptions) -> Result<LegendrePair> {
    pot.check_convexity()?;
    let g = pot.grid();
    let (lo, hi) = gradient_image_box(pot, opts.margin)?;
    let res = opts.resolution.clone().unwrap_or_else(|| g.resolution().to_vec());
    let dual_grid = BoxGrid::new(lo, hi, res)?;
    let (values, pairs) = conjugate_nodes(pot, &dual_grid, opts)?;
    let dual = HessianPotential::new(dual_grid, values, pot.c().map(|c| 1.0 / c))?;
    let fenchel_residual = fenchel_residual(pot, &dual)?;
    Ok(LegendrePair {
        primal: pot.clone(),
        dual,
        fenchel_residual,
        pairs,
    })
}

/// Polished conjugate at every node of `target`, with the `(u, v)` pairs.
fn conjugate_nodes(
    pot: &HessianPotential,
    target: &BoxGrid,
    opts: &LegendreOptions,
) -> Result<(Vec<f64>, Vec<(Vec<f64>, Vec<f64>)>)> {
    let g = pot.grid();
    let (_, nodes) = discrete_conjugate(pot, target)?;
    let ip = pot.interpolant()?;
    let mut values = Vec::with_capacity(target.node_count());
    let mut pairs = Vec::with_capacity(target.node_count());
    for (vnode, &unode) in nodes.iter().enumerate() {
        let v = target.coordinates(vnode);
        if !g.is_interior(unode) {
            return Err(Error::Domain(format!(
                "dual point {v:?} is outside the gradient image (maximizer on the boundary)"
            )));
        }
        let u = polish(pot, &v, g.coordinates(unode), opts)?;
        let phi = ip.value(&u)?;
        values.push(u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() - phi);
        pairs.push((u, v));
    }
    Ok((values, pairs))
}

/// The conjugate of `pot` sampled on a caller-chosen grid inside the
/// gradient image, e.g. to transform a dual potential back.
pub fn conjugate_on(pot: &HessianPotential, target: &BoxGrid) -> Result<HessianPotential> {
    pot.check_convexity()?;
    let (values, _) = conjugate_nodes(pot, target, &LegendreOptions::default())?;
    HessianPotential::new(target.clone(), values, pot.c().map(|c| 1.0 / c))
}

/// The conjugate of `pot` at scattered points, each maximizer located by a
/// scan over the nodes and then polished.
pub fn conjugate_at(pot: &HessianPotential, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    pot.check_convexity()?;
    let g = pot.grid();
    let opts = LegendreOptions::default();
    let ip = pot.interpolant()?;
    let coords: Vec<Vec<f64>> = (0..g.node_count()).map(|i| g.coordinates(i)).collect();
    points
        .iter()
        .map(|v| {
            if v.len() != g.dim() {
                return Err(Error::Dimension(format!("point of length {} for {} variables", v.len(), g.dim())));
            }
            let score = |i: usize| coords[i].iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - pot.values()[i];
            let best = (0..g.node_count())
                .max_by(|&a, &b| score(a).total_cmp(&score(b)))
                .expect("grid has nodes");
            if !g.is_interior(best) {
                return Err(Error::Domain(format!(
                    "point {v:?} is outside the gradient image (maximizer on the boundary)"
                )));
            }
            let u = polish(pot, v, coords[best].clone(), &opts)?;
            Ok(u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - ip.value(&u)?)
        })
        .collect()
}

/// `max |phi(u) + psi(grad phi(u)) - <u, grad phi(u)>|` over interior primal
/// nodes with stencil gradient inside the dual box.
pub fn fenchel_residual(primal: &HessianPotential, dual: &HessianPotential) -> Result<f64> {
    let g = primal.grid();
    let grad = primal.gradient()?;
    let ip = dual.interpolant()?;
    let mut worst: f64 = 0.0;
    for node in 0..g.node_count() {
        if !g.is_interior(node) {
            continue;
        }
        let v: Vec<f64> = (0..g.dim()).map(|a| grad[a][node]).collect();
        if !dual.grid().contains(&v) {
            continue;
        }
        let u = g.coordinates(node);
        let pair: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        worst = worst.max((primal.values()[node] + ip.value(&v)? - pair).abs());
    }
    Ok(worst)
}
