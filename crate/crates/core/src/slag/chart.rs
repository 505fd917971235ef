use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use super::family::AffineSLagFamily;
use super::periods::{exact_period_matrices, lagrangian_residual, mclean_metric, period_matrices, PeriodMatrices};
use crate::boxgrid::BoxGrid;
use crate::error::{Error, Result};
use crate::quadrature::{polyline_integral, segment_integral};

/// Period matrices as functions of the moduli point.
pub trait PeriodSource {
    fn moduli_dim(&self) -> usize;
    fn lambda(&self, t: &[f64]) -> DMatrix<f64>;
    fn mu(&self, t: &[f64]) -> DMatrix<f64>;
}

/// Periods of an affine family. The fiber map has the same derivative `P`
/// at every `t`, so the matrices are computed once.
#[derive(Debug, Clone)]
pub struct FamilyPeriods {
    periods: PeriodMatrices,
}

impl FamilyPeriods {
    pub fn new(fam: &AffineSLagFamily) -> Result<Self> {
        Ok(Self {
            periods: exact_period_matrices(fam, &vec![0.0; fam.m()])?,
        })
    }

    pub fn periods(&self) -> &PeriodMatrices {
        &self.periods
    }
}

impl PeriodSource for FamilyPeriods {
    fn moduli_dim(&self) -> usize {
        self.periods.lambda.nrows()
    }
    fn lambda(&self, _t: &[f64]) -> DMatrix<f64> {
        self.periods.lambda.clone()
    }
    fn mu(&self, _t: &[f64]) -> DMatrix<f64> {
        self.periods.mu.clone()
    }
}

/// Period matrices given by closures, for manufactured charts.
pub struct SyntheticPeriods<L, M> {
    dim: usize,
    lambda: L,
    mu: M,
}

impl<L, M> SyntheticPeriods<L, M>
where
    L: Fn(&[f64]) -> DMatrix<f64>,
    M: Fn(&[f64]) -> DMatrix<f64>,
{
    pub fn new(dim: usize, lambda: L, mu: M) -> Self {
        Self { dim, lambda, mu }
    }
}

impl<L, M> PeriodSource for SyntheticPeriods<L, M>
where
    L: Fn(&[f64]) -> DMatrix<f64>,
    M: Fn(&[f64]) -> DMatrix<f64>,
{
    fn moduli_dim(&self) -> usize {
        self.dim
    }
    fn lambda(&self, t: &[f64]) -> DMatrix<f64> {
        (self.lambda)(t)
    }
    fn mu(&self, t: &[f64]) -> DMatrix<f64> {
        (self.mu)(t)
    }
}

fn check_loop(dim: usize, points: &[Vec<f64>]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::Input("a loop needs at least three vertices".into()));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension(format!("loop vertices must have length {dim}")));
    }
    let (a, b) = (&points[0], &points[points.len() - 1]);
    let gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if gap > 1e-12 {
        return Err(Error::Input(format!("polyline is not closed (gap {gap:e})")));
    }
    Ok(())
}

/// `max_i |loop integral of xi_i|` with `xi_i = sum_j lambda_ij dt_j`.
pub fn closedness_loop_residual<S: PeriodSource + ?Sized>(src: &S, points: &[Vec<f64>]) -> Result<f64> {
    check_loop(src.moduli_dim(), points)?;
    let v = polyline_integral(&|t: &[f64]| src.lambda(t), points)?;
    Ok(v.amax())
}

/// The same loop test for `eta_i = sum_j mu_ij dt_j`.
pub fn closedness_loop_residual_mu<S: PeriodSource + ?Sized>(src: &S, points: &[Vec<f64>]) -> Result<f64> {
    check_loop(src.moduli_dim(), points)?;
    let v = polyline_integral(&|t: &[f64]| src.mu(t), points)?;
    Ok(v.amax())
}

/// Closed rectangle with opposite corners `a`, `b` in the plane of axes `(i, j)`.
pub fn rectangle_loop(a: &[f64], b: &[f64], i: usize, j: usize) -> Vec<Vec<f64>> {
    let mut p1 = a.to_vec();
    p1[i] = b[i];
    let mut p2 = p1.clone();
    p2[j] = b[j];
    let mut p3 = a.to_vec();
    p3[j] = b[j];
    vec![a.to_vec(), p1, p2, p3, a.to_vec()]
}

/// Coordinates `u`, `v` on a box of moduli points with `u(t0) = v(t0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliChart {
    pub grid: BoxGrid,
    pub basepoint: Vec<f64>,
    /// `u[node][i]`.
    pub u: Vec<Vec<f64>>,
    /// `v[node][i]`.
    pub v: Vec<Vec<f64>>,
}

impl ModuliChart {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Component `i` of `u` at every node.
    pub fn u_component(&self, i: usize) -> Vec<f64> {
        self.u.iter().map(|x| x[i]).collect()
    }

    pub fn v_component(&self, i: usize) -> Vec<f64> {
        self.v.iter().map(|x| x[i]).collect()
    }

    /// Largest difference to another chart on the same grid.
    pub fn distance(&self, other: &ModuliChart) -> f64 {
        let d = |a: &[Vec<f64>], b: &[Vec<f64>]| {
            a.iter()
                .flatten()
                .zip(b.iter().flatten())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        d(&self.u, &other.u).max(d(&self.v, &other.v))
    }
}

/// Integrate `du = lambda dt`, `dv = mu dt` along axis-ordered staircase paths.
pub fn moduli_coordinates<S: PeriodSource + ?Sized>(
    src: &S,
    grid: &BoxGrid,
    basepoint: &[f64],
    tol: f64,
) -> Result<ModuliChart> {
    let order: Vec<usize> = (0..grid.dim()).collect();
    moduli_coordinates_ordered(src, grid, basepoint, tol, &order)
}

/// As [`moduli_coordinates`], with the staircase visiting axes in `order`.
pub fn moduli_coordinates_ordered<S: PeriodSource + ?Sized>(
    src: &S,
    grid: &BoxGrid,
    basepoint: &[f64],
    tol: f64,
    order: &[usize],
) -> Result<ModuliChart> {
    let m = src.moduli_dim();
    if grid.dim() != m || basepoint.len() != m {
        return Err(Error::Dimension(format!(
            "chart of dimension {m} on a {}-dimensional grid",
            grid.dim()
        )));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return Err(Error::Input(format!("axis order {order:?} is not a permutation")));
    }
    // Path independence on the generating rectangles through the basepoint.
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            for corner in [grid.lower(), grid.upper()] {
                let lp = rectangle_loop(basepoint, corner, i, j);
                worst = worst
                    .max(closedness_loop_residual(src, &lp)?)
                    .max(closedness_loop_residual_mu(src, &lp)?);
            }
        }
    }
    if worst > tol {
        return Err(Error::PathDependence { residual: worst, tol });
    }
    let mut u = Vec::with_capacity(grid.node_count());
    let mut v = Vec::with_capacity(grid.node_count());
    for node in 0..grid.node_count() {
        let t = grid.coordinates(node);
        let mut cur = basepoint.to_vec();
        let mut uu = nalgebra::DVector::zeros(m);
        let mut vv = nalgebra::DVector::zeros(m);
        for &axis in order {
            if cur[axis] == t[axis] {
                continue;
            }
            let mut next = cur.clone();
            next[axis] = t[axis];
            uu += segment_integral(&|x: &[f64]| src.lambda(x), &cur, &next);
            vv += segment_integral(&|x: &[f64]| src.mu(x), &cur, &next);
            cur = next;
        }
        u.push(uu.iter().copied().collect());
        v.push(vv.iter().copied().collect());
    }
    Ok(ModuliChart {
        grid: grid.clone(),
        basepoint: basepoint.to_vec(),
        u,
        v,
    })
}

/// The tabulated map `t -> (u(t), v(t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub t: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    /// Smallest `|u(a) - u(b)|` over distinct nodes.
    pub min_separation: f64,
    pub injective: bool,
}

#[allow(non_snake_case)]
pub fn embed_F(chart: &ModuliChart) -> Embedding {
    let t: Vec<Vec<f64>> = (0..chart.grid.node_count())
        .map(|i| chart.grid.coordinates(i))
        .collect();
    let mut min_sep = f64::INFINITY;
    for a in 0..chart.u.len() {
        for b in (a + 1)..chart.u.len() {
            let d = chart.u[a]
                .iter()
                .zip(&chart.u[b])
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            min_sep = min_sep.min(d);
        }
    }
    Embedding {
        t,
        u: chart.u.clone(),
        v: chart.v.clone(),
        min_separation: min_sep,
        injective: min_sep > 1e-12,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: Vec<f64>,
    pub vol_h1: f64,
    pub vol_hn1: f64,
    pub vol_fiber: f64,
    pub lag_residual: f64,
    pub metric_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialnessScan {
    pub rows: Vec<ScanRow>,
    /// Relative variation `(max - min) / |mean|` of the three volumes.
    pub variation_h1: f64,
    pub variation_hn1: f64,
    pub variation_fiber: f64,
}

fn relative_variation(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (mut lo, mut hi, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for x in values {
        lo = lo.min(x);
        hi = hi.max(x);
        sum += x;
        n += 1;
    }
    let mean = sum / n as f64;
    if mean == 0.0 {
        hi - lo
    } else {
        (hi - lo) / mean.abs()
    }
}

/// Tabulate the torus volumes and structural residuals over the moduli grid.
pub fn specialness_scan(fam: &AffineSLagFamily, grid: &BoxGrid, fiber_resolution: usize) -> Result<SpecialnessScan> {
    if grid.dim() != fam.m() {
        return Err(Error::Dimension(format!(
            "scan grid of dimension {} for {} moduli",
            grid.dim(),
            fam.m()
        )));
    }
    let fiber = fam.fiber_grid(fiber_resolution)?;
    let mut rows = Vec::with_capacity(grid.node_count());
    for node in 0..grid.node_count() {
        let t = grid.coordinates(node);
        let pm = period_matrices(fam, &t, fiber_resolution)?;
        let metric = mclean_metric(fam, &t, fiber_resolution)?;
        rows.push(ScanRow {
            vol_h1: pm.h1_volume()?,
            vol_hn1: pm.hn1_volume()?,
            vol_fiber: fam.fiber_volume_form(&t, &fiber)?.integrate_top()?,
            lag_residual: lagrangian_residual(&pm),
            metric_residual: metric.residual,
            t,
        });
    }
    Ok(SpecialnessScan {
        variation_h1: relative_variation(rows.iter().map(|r| r.vol_h1)),
        variation_hn1: relative_variation(rows.iter().map(|r| r.vol_hn1)),
        variation_fiber: relative_variation(rows.iter().map(|r| r.vol_fiber)),
        rows,
    })
}

impl SpecialnessScan {
    /// CSV with columns `t_1..t_m, vol_H1, vol_Hn1, vol_fiber, lag_residual, metric_residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m = self.rows.first().map_or(0, |r| r.t.len());
        let mut header: Vec<String> = (1..=m).map(|i| format!("t_{i}")).collect();
        header.extend(
            ["vol_H1", "vol_Hn1", "vol_fiber", "lag_residual", "metric_residual"]
                .iter()
                .map(|s| s.to_string()),
        );
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.t.iter().map(|x| format!("{x:e}")).collect();
            for x in [r.vol_h1, r.vol_hn1, r.vol_fiber, r.lag_residual, r.metric_residual] {
                rec.push(format!("{x:e}"));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_chart_is_minus_t() {
        let f = AffineSLagFamily::standard(2).unwrap();
        let src = FamilyPeriods::new(&f).unwrap();
        let g = BoxGrid::cube(2, -0.5, 0.5, 5).unwrap();
        let c = moduli_coordinates(&src, &g, &[0.0, 0.0], 1e-10).unwrap();
        for node in 0..g.node_count() {
            let t = g.coordinates(node);
            for i in 0..2 {
                assert!((c.u[node][i] + t[i]).abs() < 1e-13);
                assert!((c.v[node][i] + t[i]).abs() < 1e-13);
            }
        }
        assert!(embed_F(&c).injective);
    }

    #[test]
    fn nonsymmetric_jacobian_is_path_dependent() {
        let src = SyntheticPeriods::new(
            2,
            |t: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, t[0], 0.0, 1.0]),
            |_: &[f64]| DMatrix::identity(2, 2),
        );
        let lp = rectangle_loop(&[0.0, 0.0], &[1.0, 1.0], 0, 1);
        assert!((closedness_loop_residual(&src, &lp).unwrap() - 1.0).abs() < 1e-12);
        let g = BoxGrid::cube(2, 0.0, 1.0, 3).unwrap();
        assert!(matches!(
            moduli_coordinates(&src, &g, &[0.0, 0.0], 1e-8),
            Err(Error::PathDependence { .. })
        ));
    }

    #[test]
    fn open_polyline_is_rejected() {
        let f = AffineSLagFamily::standard(2).unwrap();
        let src = FamilyPeriods::new(&f).unwrap();
        let r = closedness_loop_residual(&src, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert!(matches!(r, Err(Error::Input(_))));
    }
}
