//! Partial Legendre transform in the first variable of a two-variable
//! potential: `s = d phi / d u_1`, `h(s, u_2) = u_1 s - phi(u_1, u_2)`.
//! Then `h_ss + h_{u_2 u_2} = (1 - det Hess phi) / phi_11`, so Monge-Ampere
//! solutions with `c = 1` become harmonic.

use super::interp::Interpolant;
use super::potential::HessianPotential;
use super::stencil::GridStencils;
use super::tolerance::{roundoff_floor, stencil_tolerance, two_grid_estimate, Sampled, STENCIL_ORDER};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PartialLegendre {
    /// Grid in `(s, u_2)`.
    pub grid: BoxGrid,
    pub h: Vec<f64>,
    /// `u_1` solving `d phi/d u_1 = s` at every node.
    pub u1: Vec<f64>,
    pub laplacian: Vec<f64>,
    /// `max |Laplacian h|`.
    pub residual: f64,
    /// The potential after rescaling to `c = 1`.
    pub normalized: HessianPotential,
}

/// Fraction of the common slope range trimmed from each end of the `s` axis.
const MARGIN: f64 = 0.05;

fn solve_slope(ip: &Interpolant<'_>, lo: f64, hi: f64, s: f64, start: f64) -> Result<f64> {
    let mut u = start;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let jet = ip.jet(&[u])?;
        let r = jet.gradient[0] - s;
        if r.abs() <= 1e-14 * (1.0 + s.abs()) {
            return Ok(u);
        }
        if r > 0.0 {
            b = u;
        } else {
            a = u;
        }
        let curv = jet.hessian[(0, 0)];
        let newton = u - r / curv;
        u = if curv > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < 1e-15 * (1.0 + u.abs()) {
            return Ok(u);
        }
    }
    Ok(u)
}

pub fn partial_legendre_2d(pot: &HessianPotential) -> Result<PartialLegendre> {
    if pot.dim() != 2 {
        return Err(Error::Dimension(format!("partial Legendre needs two variables, got {}", pot.dim())));
    }
    let c = pot.c().unwrap_or(1.0);
    if !(c > 0.0) {
        return Err(Error::Input(format!("Monge-Ampere constant must be positive, got {c}")));
    }
    let normalized = pot.scaled(1.0 / c.sqrt()).with_c(Some(1.0));
    let g = normalized.grid();
    let st = normalized.stencils()?;
    let phi = normalized.values();
    let d1 = st.d1(0, phi);
    let d11 = st.d2(0, phi);
    let (n1, n2) = (g.resolution()[0], g.resolution()[1]);
    for node in 0..g.node_count() {
        if !(d11[node] > 0.0) {
            return Err(Error::Convexity {
                node,
                coords: g.coordinates(node),
                min_eig: d11[node],
            });
        }
    }
    let mut s_lo = f64::NEG_INFINITY;
    let mut s_hi = f64::INFINITY;
    for j in 0..n2 {
        s_lo = s_lo.max(d1[g.linear_index(&[0, j])]);
        s_hi = s_hi.min(d1[g.linear_index(&[n1 - 1, j])]);
    }
    if !(s_hi > s_lo) {
        return Err(Error::Domain("slices share no common slope range".into()));
    }
    let w = s_hi - s_lo;
    let out = BoxGrid::new(
        vec![s_lo + MARGIN * w, g.lower()[1]],
        vec![s_hi - MARGIN * w, g.upper()[1]],
        vec![n1, n2],
    )?;
    let line = BoxGrid::new(vec![g.lower()[0]], vec![g.upper()[0]], vec![n1])?;
    let mut h = vec![0.0; out.node_count()];
    let mut u1 = vec![0.0; out.node_count()];
    for j in 0..n2 {
        let slice: Vec<f64> = (0..n1).map(|i| phi[g.linear_index(&[i, j])]).collect();
        let slopes: Vec<f64> = (0..n1).map(|i| d1[g.linear_index(&[i, j])]).collect();
        let ip = Interpolant::new(&line, &slice)?;
        for k in 0..n1 {
            let s = out.axis_coordinate(0, k);
            let near = slopes.partition_point(|&v| v < s).min(n1 - 1);
            let u = solve_slope(&ip, line.lower()[0], line.upper()[0], s, line.axis_coordinate(0, near))?;
            let node = out.linear_index(&[k, j]);
            h[node] = u * s - ip.value(&[u])?;
            u1[node] = u;
        }
    }
    let lap = GridStencils::new(&out)?.laplacian(&h);
    let residual = lap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(PartialLegendre {
        grid: out,
        h,
        u1,
        laplacian: lap,
        residual,
        normalized,
    })
}

impl PartialLegendre {
    /// Discretization level of `Laplacian h`: the two-grid estimate of the
    /// Laplacian stencil on `h`, plus the stencil error of `det Hess phi`
    /// divided by the smallest `phi_11` (which feeds the right-hand side).
    pub fn stencil_tolerance(&self) -> Result<f64> {
        let coarse = self.grid.coarsened()?;
        let ch: Vec<f64> = (0..coarse.node_count())
            .map(|i| self.h[self.grid.refine_index(&coarse, i)])
            .collect();
        let lap_c = GridStencils::new(&coarse)?.laplacian(&ch);
        let lap_tol = two_grid_estimate(
            &Sampled {
                grid: self.grid.clone(),
                values: self.laplacian.clone(),
            },
            &Sampled {
                grid: coarse,
                values: lap_c,
            },
            STENCIL_ORDER,
        )?;
        let hpot = HessianPotential::new(self.grid.clone(), self.h.clone(), None)?;
        let det_tol = stencil_tolerance(&self.normalized, |p| {
            Ok(Sampled {
                grid: p.grid().clone(),
                values: super::potential::det_hessian(p)?,
            })
        })?;
        let st = self.normalized.stencils()?;
        let min_d11 = st
            .d2(0, self.normalized.values())
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        Ok(lap_tol + roundoff_floor(&hpot) + det_tol / min_d11)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_quadratic_gives_harmonic_saddle() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 17).unwrap();
        let p = HessianPotential::from_fn(g, |u| (u[0] * u[0] + u[1] * u[1]) / 2.0, Some(1.0)).unwrap();
        let pl = partial_legendre_2d(&p).unwrap();
        for node in 0..pl.grid.node_count() {
            let x = pl.grid.coordinates(node);
            assert!((pl.h[node] - (x[0] * x[0] - x[1] * x[1]) / 2.0).abs() < 1e-12);
        }
        assert!(pl.residual < 1e-9);
    }

    #[test]
    fn quartic_matches_closed_form_laplacian() {
        let g = BoxGrid::cube(2, -1.0, 1.0, 33).unwrap();
        let p = HessianPotential::from_fn(
            g,
            |u| u[0].powi(4) / 12.0 + u[0] * u[0] / 2.0 + u[1] * u[1] / 2.0,
            None,
        )
        .unwrap();
        let pl = partial_legendre_2d(&p).unwrap();
        for node in 0..pl.grid.node_count() {
            let u = pl.u1[node];
            let want = -u * u / (1.0 + u * u);
            assert!((pl.laplacian[node] - want).abs() < 1e-4);
        }
    }
}
