use std::io::Write;

use serde::Serialize;

use super::manifold::{fiber_special_lagrangian, holomorphic_norm_field, FiberCheck, SemiflatManifold};
use super::ricci::{compare_ricci, ricci_form, ricci_tolerance, RicciComparison};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::hessian::tolerance::{stencil_tolerance, Sampled};
use crate::hessian::{det_hessian, HessianPotential};

/// Summary of the semiflat checks for one potential.
#[derive(Debug, Clone, Serialize)]
pub struct SemiflatReport {
    /// Monge-Ampere constant used for the residual.
    pub c: f64,
    pub ma_residual_max: f64,
    pub ma_tolerance: f64,
    pub norm_variation: f64,
    pub norm_tolerance: f64,
    pub ricci_max: f64,
    pub ricci_tolerance: f64,
    pub kahler_residual: f64,
    pub hermitian_residual: f64,
    pub fiber: FiberCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<RicciComparison>,
}

impl SemiflatReport {
    pub fn ma_pass(&self) -> bool {
        self.ma_residual_max < 10.0 * self.ma_tolerance
    }

    pub fn norm_pass(&self) -> bool {
        self.norm_variation < 10.0 * self.norm_tolerance
    }

    pub fn ricci_pass(&self) -> bool {
        self.ricci_max < 10.0 * self.ricci_tolerance
    }
}

fn det_sampled(pot: &HessianPotential) -> Result<Sampled> {
    Ok(Sampled {
        grid: pot.grid().clone(),
        values: det_hessian(pot)?,
    })
}

/// Run the Monge-Ampere, norm and Ricci checks. Without a target constant on
/// the potential, `c` is the mean of `det Hess phi`. With `oracle` the Ricci
/// tensor is also computed through Christoffel symbols and compared.
pub fn semiflat_report(sf: &SemiflatManifold, oracle: bool) -> Result<SemiflatReport> {
    let pot = sf.potential();
    let det = det_hessian(pot)?;
    let c = pot.c().unwrap_or_else(|| det.iter().sum::<f64>() / det.len() as f64);
    let ma_residual_max = det.iter().fold(0.0f64, |m, d| m.max((d - c).abs()));
    let det_tol = stencil_tolerance(pot, det_sampled)?;
    let norm = holomorphic_norm_field(sf);
    let min_det = det.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_det = det.iter().cloned().fold(0.0, f64::max);
    if !(min_det > 0.0) {
        return Err(Error::Convexity {
            node: det.iter().position(|d| !(*d > 0.0)).unwrap_or(0),
            coords: Vec::new(),
            min_eig: min_det,
        });
    }
    // The norm is 2^m / det, so its relative spread moves by about
    // (max det / min det) times the relative error of det at either end.
    let norm_tolerance = 2.0 * det_tol / min_det * (max_det / min_det);
    Ok(SemiflatReport {
        c,
        ma_residual_max,
        ma_tolerance: det_tol,
        norm_variation: norm.variation,
        norm_tolerance,
        ricci_max: ricci_form(sf)?.max_abs(),
        ricci_tolerance: ricci_tolerance(sf)?,
        kahler_residual: sf.kahler_residual(),
        hermitian_residual: sf.hermitian_residual(),
        fiber: fiber_special_lagrangian(sf),
        oracle: if oracle { Some(compare_ricci(sf)?) } else { None },
    })
}

/// CSV with one row per node: `node`, the coordinates `u_1..`, then the given columns.
pub fn write_field_csv<W: Write>(grid: &BoxGrid, columns: &[(&str, &[f64])], out: W) -> Result<()> {
    let n = grid.node_count();
    if let Some((name, _)) = columns.iter().find(|(_, v)| v.len() != n) {
        return Err(Error::Dimension(format!("column {name} does not have {n} values")));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend((1..=grid.dim()).map(|a| format!("u_{a}")));
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    for node in 0..n {
        let mut row = vec![node.to_string()];
        row.extend(grid.coordinates(node).iter().map(|x| format!("{x:e}")));
        row.extend(columns.iter().map(|(_, v)| format!("{:e}", v[node])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
