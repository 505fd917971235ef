use nalgebra::DMatrix;
use serde::Serialize;

use super::manifold::{build_semiflat, SemiflatManifold};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::hessian::tolerance::{two_grid_estimate, Sampled, STENCIL_ORDER};
use crate::hessian::{GridStencils, MIN_NODES};

/// Layers of base nodes dropped before curvature is computed. On the
/// remaining nodes every Hessian entry comes from a centered stencil, so the
/// discretization error is smooth and two-grid estimates apply.
pub const RICCI_INSET: usize = 2;

/// A field of square matrices over a box grid.
#[derive(Debug, Clone)]
pub struct RicciField {
    pub grid: BoxGrid,
    pub values: Vec<DMatrix<f64>>,
}

impl RicciField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|r| r.amax()).fold(0.0, f64::max)
    }

    fn component(&self, r: usize, c: usize) -> Vec<f64> {
        self.values.iter().map(|m| m[(r, c)]).collect()
    }

    fn size(&self) -> usize {
        self.values.first().map_or(0, |m| m.nrows())
    }
}

/// The base nodes on which curvature is evaluated.
pub fn ricci_domain(grid: &BoxGrid) -> Result<BoxGrid> {
    let inner = grid.inset(RICCI_INSET).map_err(|_| too_small(grid))?;
    if inner.resolution().iter().any(|&n| n < MIN_NODES) {
        return Err(too_small(grid));
    }
    Ok(inner)
}

fn too_small(grid: &BoxGrid) -> Error {
    Error::Domain(format!(
        "resolution {:?} leaves fewer than {MIN_NODES} interior nodes per axis for curvature",
        grid.resolution()
    ))
}

/// `R_jk = -1/2 d_j d_k log det Hess phi` on the interior nodes.
pub fn ricci_form(sf: &SemiflatManifold) -> Result<RicciField> {
    let grid = sf.grid();
    let inner = ricci_domain(grid)?;
    let mut logdet = Vec::with_capacity(inner.node_count());
    for idx in 0..inner.node_count() {
        let node = grid.inset_index(RICCI_INSET, &inner, idx);
        let det = sf.hessian()[node].determinant();
        if !(det > 0.0) {
            return Err(Error::Convexity {
                node,
                coords: grid.coordinates(node),
                min_eig: det,
            });
        }
        logdet.push(det.ln());
    }
    let st = GridStencils::new(&inner)?;
    let values = st.hessian(&logdet).into_iter().map(|h| h * -0.5).collect();
    Ok(RicciField { grid: inner, values })
}

/// Ricci tensor of the full real metric `diag(Hess phi, Hess phi)` through
/// Christoffel symbols, on the same nodes as [`ricci_form`].
pub fn ricci_oracle(sf: &SemiflatManifold) -> Result<RicciField> {
    let grid = sf.grid();
    let inner = ricci_domain(grid)?;
    let metric: Vec<DMatrix<f64>> = (0..inner.node_count())
        .map(|idx| sf.metric_at(grid.inset_index(RICCI_INSET, &inner, idx)))
        .collect();
    let values = christoffel_ricci(&inner, &metric)?;
    Ok(RicciField { grid: inner, values })
}

/// Ricci tensor `R_bd = d_a G^a_bd - d_d G^a_ab + G^a_ae G^e_bd - G^a_de G^e_ab`
/// of a metric on `R^D` sampled on a grid over the first `p = grid.dim()`
/// coordinates; the metric is taken to be independent of the remaining ones.
pub fn christoffel_ricci(grid: &BoxGrid, metric: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
    let n = grid.node_count();
    if metric.len() != n {
        return Err(Error::Dimension(format!("{} metrics on {n} nodes", metric.len())));
    }
    let d = metric.first().map_or(0, |g| g.nrows());
    let p = grid.dim();
    if d < p || metric.iter().any(|g| g.nrows() != d || g.ncols() != d) {
        return Err(Error::Dimension(format!(
            "metric must be square of size at least {p}"
        )));
    }
    let st = GridStencils::new(grid)?;
    let mut inv = Vec::with_capacity(n);
    for (node, g) in metric.iter().enumerate() {
        inv.push(g.clone().try_inverse().ok_or_else(|| Error::Metric {
            node,
            detail: "singular metric".into(),
        })?);
    }
    let idx3 = |a: usize, b: usize, c: usize| (a * d + b) * d + c;

    // dg[c][a * d + b][node] = d_c g_ab for c < p
    let dg: Vec<Vec<Vec<f64>>> = (0..p)
        .map(|c| {
            (0..d * d)
                .map(|ab| {
                    let comp: Vec<f64> = metric.iter().map(|g| g[(ab / d, ab % d)]).collect();
                    st.d1(c, &comp)
                })
                .collect()
        })
        .collect();
    let dgv = |c: usize, a: usize, b: usize, node: usize| if c < p { dg[c][a * d + b][node] } else { 0.0 };

    // gamma[idx3(a, b, c)][node] = G^a_bc
    let mut gamma = vec![vec![0.0; n]; d * d * d];
    for node in 0..n {
        for b in 0..d {
            for c in b..d {
                let lowered: Vec<f64> = (0..d)
                    .map(|e| 0.5 * (dgv(b, e, c, node) + dgv(c, e, b, node) - dgv(e, b, c, node)))
                    .collect();
                for a in 0..d {
                    let v: f64 = (0..d).map(|e| inv[node][(a, e)] * lowered[e]).sum();
                    gamma[idx3(a, b, c)][node] = v;
                    gamma[idx3(a, c, b)][node] = v;
                }
            }
        }
    }
    // dgamma[e][idx3][node] = d_e G for e < p
    let dgamma: Vec<Vec<Vec<f64>>> = (0..p)
        .map(|e| gamma.iter().map(|comp| st.d1(e, comp)).collect())
        .collect();
    let dgam = |e: usize, i: usize, node: usize| if e < p { dgamma[e][i][node] } else { 0.0 };

    let mut out = Vec::with_capacity(n);
    for node in 0..n {
        let g = |a: usize, b: usize, c: usize| gamma[idx3(a, b, c)][node];
        let r = DMatrix::from_fn(d, d, |b, dd| {
            let mut s = 0.0;
            for a in 0..d {
                s += dgam(a, idx3(a, b, dd), node) - dgam(dd, idx3(a, a, b), node);
                for e in 0..d {
                    s += g(a, a, e) * g(e, b, dd) - g(a, dd, e) * g(e, a, b);
                }
            }
            s
        });
        out.push(r);
    }
    Ok(out)
}

/// Largest two-grid estimate over the components of a matrix field.
fn field_tolerance(fine: &RicciField, coarse: &RicciField) -> Result<f64> {
    let k = fine.size();
    let mut worst: f64 = 0.0;
    for r in 0..k {
        for c in 0..k {
            let f = Sampled {
                grid: fine.grid.clone(),
                values: fine.component(r, c),
            };
            let g = Sampled {
                grid: coarse.grid.clone(),
                values: coarse.component(r, c),
            };
            worst = worst.max(two_grid_estimate(&f, &g, STENCIL_ORDER)?);
        }
    }
    Ok(worst)
}

/// Round-off level of a fourth derivative of the potential.
fn curvature_floor(sf: &SemiflatManifold) -> f64 {
    let g = sf.grid();
    let h = (0..g.dim()).map(|a| g.spacing(a)).fold(f64::INFINITY, f64::min);
    let scale = sf
        .potential()
        .values()
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    100.0 * f64::EPSILON * scale / h.powi(4)
}

/// Stencil tolerance of [`ricci_form`] from the every-other-node subgrid.
pub fn ricci_tolerance(sf: &SemiflatManifold) -> Result<f64> {
    let coarse = build_semiflat(&sf.potential().coarsened()?)?;
    Ok(field_tolerance(&ricci_form(sf)?, &ricci_form(&coarse)?)? + curvature_floor(sf))
}

/// Agreement of the Kahler-identity Ricci tensor with the Christoffel one.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RicciComparison {
    pub kahler_max: f64,
    pub oracle_max: f64,
    /// Largest entry of `oracle - diag(R, R)`.
    pub discrepancy: f64,
    /// Sum of the stencil tolerances of both routes.
    pub tolerance: f64,
}

impl RicciComparison {
    /// Agreement within ten times the stencil tolerance.
    pub fn pass(&self) -> bool {
        self.discrepancy < 10.0 * self.tolerance
    }
}

pub fn compare_ricci(sf: &SemiflatManifold) -> Result<RicciComparison> {
    let m = sf.dim();
    let kahler = ricci_form(sf)?;
    let oracle = ricci_oracle(sf)?;
    let mut discrepancy: f64 = 0.0;
    for (r, o) in kahler.values.iter().zip(&oracle.values) {
        let mut expect = DMatrix::zeros(2 * m, 2 * m);
        expect.view_mut((0, 0), (m, m)).copy_from(r);
        expect.view_mut((m, m), (m, m)).copy_from(r);
        discrepancy = discrepancy.max((o - expect).amax());
    }
    let coarse = build_semiflat(&sf.potential().coarsened()?)?;
    let tolerance = field_tolerance(&kahler, &ricci_form(&coarse)?)?
        + field_tolerance(&oracle, &ricci_oracle(&coarse)?)?
        + 2.0 * curvature_floor(sf);
    Ok(RicciComparison {
        kahler_max: kahler.max_abs(),
        oracle_max: oracle.max_abs(),
        discrepancy,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hessian::HessianPotential;

    #[test]
    fn round_potential_is_flat() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 13).unwrap();
        let pot = HessianPotential::from_fn(g, |u| (u[0] * u[0] + u[1] * u[1]) / 2.0, None).unwrap();
        let sf = build_semiflat(&pot).unwrap();
        assert!(ricci_form(&sf).unwrap().max_abs() < 1e-8);
        assert!(ricci_oracle(&sf).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn small_grid_is_a_domain_error() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 9).unwrap();
        let pot = HessianPotential::from_fn(g, |u| (u[0] * u[0] + u[1] * u[1]) / 2.0, None).unwrap();
        let sf = build_semiflat(&pot).unwrap();
        assert!(matches!(ricci_form(&sf), Err(Error::Domain(_))));
    }

    #[test]
    fn quartic_matches_closed_form() {
        let g = BoxGrid::new(vec![-0.5, -0.5], vec![0.5, 0.5], vec![33, 33]).unwrap();
        let pot = HessianPotential::from_fn(
            g,
            |u| u[0].powi(4) / 12.0 + u[0] * u[0] / 2.0 + u[1] * u[1] / 2.0,
            None,
        )
        .unwrap();
        let sf = build_semiflat(&pot).unwrap();
        let r = ricci_form(&sf).unwrap();
        // -1/2 (log(1 + u^2))'' = -(1 - u^2) / (1 + u^2)^2
        for (idx, m) in r.values.iter().enumerate() {
            let u = r.grid.coordinates(idx)[0];
            let exact = -(1.0 - u * u) / (1.0 + u * u).powi(2);
            assert!((m[(0, 0)] - exact).abs() < 1e-4, "{} vs {exact}", m[(0, 0)]);
            assert!(m[(1, 1)].abs() < 1e-6 && m[(0, 1)].abs() < 1e-6);
        }
        let cmp = compare_ricci(&sf).unwrap();
        assert!(cmp.pass(), "{cmp:?}");
    }

    #[test]
    fn conformal_surface_curvature() {
        // g = e^{2u}(du^2 + dx^2) has Ricci -(1/2)(log e^{2u})'' g = 0,
        // while g = (1 + u^2)(du^2 + dx^2) has R_uu = -(1/2)(log(1 + u^2))''.
        let g = BoxGrid::cube(1, -1.0, 1.0, 41).unwrap();
        let metric: Vec<DMatrix<f64>> = (0..g.node_count())
            .map(|i| {
                let u = g.coordinates(i)[0];
                DMatrix::identity(2, 2) * (1.0 + u * u)
            })
            .collect();
        let r = christoffel_ricci(&g, &metric).unwrap();
        for i in 4..37 {
            let u = g.coordinates(i)[0];
            let exact = -(1.0 - u * u) / (1.0 + u * u).powi(2);
            assert!((r[i][(0, 0)] - exact).abs() < 1e-4);
            assert!((r[i][(1, 1)] - exact).abs() < 1e-4);
            assert!(r[i][(0, 1)].abs() < 1e-12);
        }
    }
}
