//! Dirichlet problem `det Hess phi = c` on a rectangle (two variables) by
//! damped Newton iteration on the discrete equations at interior nodes.

use std::collections::BTreeMap;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::potential::HessianPotential;
use super::stencil::GridStencils;
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub c: f64,
    pub max_iter: usize,
    /// Convergence threshold on `max |det Hess phi - c|` over interior nodes.
    pub tol: f64,
    /// Initial step length of the line search.
    pub damping: f64,
    /// Lower clamp on Hessian eigenvalues inside the linearization.
    pub clamp: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_iter: 50,
            tol: 1e-8,
            damping: 1.0,
            clamp: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `max |F|` before each step and after the last one.
    pub residual_history: Vec<f64>,
    /// Interior nodes whose Hessian needed clamping, per iteration.
    pub clamped_nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MaSolution {
    pub potential: HessianPotential,
    pub report: SolveReport,
}

/// Least-squares quadratic through the boundary data, with its Hessian
/// pushed into the positive cone, sampled at every node.
pub fn quadratic_boundary_fit(grid: &BoxGrid, values: &[f64]) -> Result<Vec<f64>> {
    let rows: Vec<usize> = (0..grid.node_count()).filter(|&i| !grid.is_interior(i)).collect();
    let basis = |u: &[f64]| [1.0, u[0], u[1], u[0] * u[0], u[0] * u[1], u[1] * u[1]];
    let a = DMatrix::from_fn(rows.len(), 6, |r, c| basis(&grid.coordinates(rows[r]))[c]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| values[i]));
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Degenerate(format!("boundary fit: {e}")))?;
    let h = Matrix2::new(2.0 * coef[3], coef[4], coef[4], 2.0 * coef[5]);
    let eig = SymmetricEigen::new(h);
    let floor = 1e-3 * eig.eigenvalues.amax().max(1.0);
    let clamped = eig.eigenvectors
        * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| l.max(floor)))
        * eig.eigenvectors.transpose();
    let q = |u: &[f64]| {
        coef[0]
            + coef[1] * u[0]
            + coef[2] * u[1]
            + 0.5 * (clamped[(0, 0)] * u[0] * u[0] + 2.0 * clamped[(0, 1)] * u[0] * u[1] + clamped[(1, 1)] * u[1] * u[1])
    };
    Ok(grid.sample(q))
}

/// Initial guess: the convex quadratic fit plus the bilinearly blended
/// (Coons) extension of its boundary mismatch, so the guess is smooth and
/// matches the data on every boundary node.
pub fn initial_guess(grid: &BoxGrid, values: &[f64]) -> Result<Vec<f64>> {
    let q = quadratic_boundary_fit(grid, values)?;
    let (n0, n1) = (grid.resolution()[0], grid.resolution()[1]);
    let e = |i: usize, j: usize| {
        let k = grid.linear_index(&[i, j]);
        values[k] - q[k]
    };
    Ok((0..grid.node_count())
        .map(|k| {
            if !grid.is_interior(k) {
                return values[k];
            }
            let idx = grid.multi_index(k);
            let (i, j) = (idx[0], idx[1]);
            let s = (grid.axis_coordinate(0, i) - grid.lower()[0]) / (grid.upper()[0] - grid.lower()[0]);
            let r = (grid.axis_coordinate(1, j) - grid.lower()[1]) / (grid.upper()[1] - grid.lower()[1]);
            let (a, b) = (n0 - 1, n1 - 1);
            let coons = (1.0 - s) * e(0, j) + s * e(a, j) + (1.0 - r) * e(i, 0) + r * e(i, b)
                - ((1.0 - s) * (1.0 - r) * e(0, 0)
                    + s * (1.0 - r) * e(a, 0)
                    + (1.0 - s) * r * e(0, b)
                    + s * r * e(a, b));
            q[k] + coons
        })
        .collect())
}

struct Problem {
    grid: BoxGrid,
    st: GridStencils,
    unknowns: Vec<usize>,
    column: Vec<Option<usize>>,
    c: f64,
}

impl Problem {
    fn residual(&self, phi: &[f64]) -> (Vec<f64>, Vec<DMatrix<f64>>) {
        let hess = self.st.hessian(phi);
        let f = self.unknowns.iter().map(|&n| hess[n].determinant() - self.c).collect();
        (f, hess)
    }

    fn jacobian(&self, hess: &[DMatrix<f64>], clamp: f64, clamped: &mut usize) -> Result<SparseColMat<usize, f64>> {
        let g = &self.grid;
        let (n0, n1) = (g.resolution()[0], g.resolution()[1]);
        let (s0, s1) = (g.stride(0), g.stride(1));
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let add = |row: usize, node: usize, w: f64, acc: &mut BTreeMap<(usize, usize), f64>| {
            if let Some(col) = self.column[node] {
                *acc.entry((row, col)).or_insert(0.0) += w;
            }
        };
        for (row, &node) in self.unknowns.iter().enumerate() {
            let eig = SymmetricEigen::new(hess[node].clone());
            let mut h = hess[node].clone();
            if eig.eigenvalues.min() < clamp {
                *clamped += 1;
                let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(clamp)));
                h = &eig.eigenvectors * d * eig.eigenvectors.transpose();
            }
            let (a11, a22, a12) = (h[(1, 1)], h[(0, 0)], -2.0 * h[(0, 1)]);
            let i0 = (node / s0) % n0;
            let i1 = (node / s1) % n1;
            let base0 = node - i0 * s0;
            let base1 = node - i1 * s1;
            let (st, w) = &self.st.d2[0].entries[i0];
            for (k, wk) in w.iter().enumerate() {
                add(row, base0 + (st + k) * s0, a11 * wk, &mut acc);
            }
            let (st, w) = &self.st.d2[1].entries[i1];
            for (k, wk) in w.iter().enumerate() {
                add(row, base1 + (st + k) * s1, a22 * wk, &mut acc);
            }
            let (st0, w0) = &self.st.d1[0].entries[i0];
            let (st1, w1) = &self.st.d1[1].entries[i1];
            let corner = node - i0 * s0 - i1 * s1;
            for (p, wp) in w0.iter().enumerate() {
                for (q, wq) in w1.iter().enumerate() {
                    add(row, corner + (st0 + p) * s0 + (st1 + q) * s1, a12 * wp * wq, &mut acc);
                }
            }
        }
        let n = self.unknowns.len();
        let triplets: Vec<Triplet<usize, usize, f64>> =
            acc.into_iter().map(|((r, c), v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Degenerate(format!("Jacobian assembly: {e:?}")))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Size of the Monge-Ampere residual that round-off alone produces.
pub(crate) fn roundoff_level(grid: &BoxGrid, phi: &[f64]) -> f64 {
    let h = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let scale = phi.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    1e3 * f64::EPSILON * scale / (h * h)
}

/// Solve `det Hess phi = c` with `phi` fixed to `boundary` on the boundary
/// nodes (interior entries of `boundary` are ignored).
pub fn solve_ma_dirichlet(grid: &BoxGrid, boundary: &[f64], config: &SolverConfig) -> Result<MaSolution> {
    if grid.dim() != 2 {
        return Err(Error::Dimension(format!(
            "the Monge-Ampere solver handles two variables, got {}",
            grid.dim()
        )));
    }
    if boundary.len() != grid.node_count() {
        return Err(Error::Dimension(format!(
            "{} boundary values for {} nodes",
            boundary.len(),
            grid.node_count()
        )));
    }
    if !(config.c > 0.0) {
        return Err(Error::Input(format!("Monge-Ampere constant must be positive, got {}", config.c)));
    }
    let st = GridStencils::new(grid)?;
    let unknowns: Vec<usize> = (0..grid.node_count()).filter(|&i| grid.is_interior(i)).collect();
    let mut column = vec![None; grid.node_count()];
    for (k, &n) in unknowns.iter().enumerate() {
        column[n] = Some(k);
    }
    let prob = Problem {
        grid: grid.clone(),
        st,
        unknowns,
        column,
        c: config.c,
    };
    let mut phi = initial_guess(grid, boundary)?;
    let (mut f, mut hess) = prob.residual(&phi);
    let mut history = vec![inf_norm(&f)];
    let mut clamped_hist = Vec::new();
    let mut iterations = 0;
    while *history.last().expect("nonempty") >= config.tol {
        if iterations == config.max_iter {
            return Err(Error::Convergence {
                iterations,
                history,
            });
        }
        iterations += 1;
        let mut clamped = 0;
        let jac = prob.jacobian(&hess, config.clamp, &mut clamped)?;
        clamped_hist.push(clamped);
        let lu = jac
            .sp_lu()
            .map_err(|e| Error::Degenerate(format!("Newton system: {e:?}")))?;
        let rhs = faer::Mat::from_fn(f.len(), 1, |i, _| -f[i]);
        let delta = lu.solve(&rhs);
        let current = *history.last().expect("nonempty");
        let mut alpha = config.damping;
        loop {
            let mut trial = phi.clone();
            for (k, &node) in prob.unknowns.iter().enumerate() {
                trial[node] += alpha * delta[(k, 0)];
            }
            let (tf, th) = prob.residual(&trial);
            let norm = inf_norm(&tf);
            if norm < (1.0 - 1e-4 * alpha) * current || alpha < 1e-3 {
                phi = trial;
                f = tf;
                hess = th;
                history.push(norm);
                break;
            }
            alpha *= 0.5;
        }
        // Below a tolerance the arithmetic cannot reach, stop once Newton stalls.
        let last = *history.last().expect("nonempty");
        if last >= current * (1.0 - 1e-4) && last < roundoff_level(grid, &phi) {
            break;
        }
    }
    Ok(MaSolution {
        potential: HessianPotential::new(grid.clone(), phi, Some(config.c))?,
        report: SolveReport {
            iterations,
            residual_history: history,
            clamped_nodes: clamped_hist,
        },
    })
}

/// [`solve_ma_dirichlet`] with boundary values sampled from `f`.
pub fn solve_ma_dirichlet_fn<F: Fn(&[f64]) -> f64>(grid: &BoxGrid, f: F, config: &SolverConfig) -> Result<MaSolution> {
    let b = grid.sample(|u| f(u));
    solve_ma_dirichlet(grid, &b, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_closed_form_solution() {
        // det Hess (u1^2/(2 u2) + u2^3/6) = 1
        let g = BoxGrid::new(vec![-0.5, 0.5], vec![0.5, 1.5], vec![17, 17]).unwrap();
        let exact = |u: &[f64]| u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0;
        let sol = solve_ma_dirichlet_fn(&g, exact, &SolverConfig::default()).unwrap();
        assert!(sol.report.iterations > 0 && sol.report.iterations <= 15);
        let err = (0..g.node_count())
            .map(|i| (sol.potential.values()[i] - exact(&g.coordinates(i))).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "error {err:e}");
    }

    #[test]
    fn nonconvergence_carries_history() {
        let g = BoxGrid::cube(2, 0.0, 1.0, 9).unwrap();
        let cfg = SolverConfig {
            max_iter: 1,
            tol: 1e-30,
            ..Default::default()
        };
        match solve_ma_dirichlet_fn(&g, |u| (u[0] + 0.3 * u[1]).cosh() + u[1] * u[1], &cfg) {
            Err(Error::Convergence { iterations, history }) => {
                assert_eq!(iterations, 1);
                assert_eq!(history.len(), 2);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }
}
