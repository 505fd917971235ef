use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use super::report::{Check, Report};
use super::{Command, Context, Output};
use crate::boxgrid::BoxGrid;
use crate::cy::{validate_axioms, ModelSpec};
use crate::error::{Error, Result};
use crate::hessian::tolerance::{interpolation_tolerance, stencil_tolerance, Sampled};
use crate::hessian::{
    det_hessian, legendre_transform, roundoff_level, partial_legendre_2d, solve_ma_dirichlet, write_potential_csv, HessianPotential,
    MirrorSwap, PotentialSpec, SolverFile,
};
use crate::semiflat::{
    build_semiflat, gh_check, gh_metric, hessian_chart_nijenhuis, ricci_form, semiflat_report, write_field_csv,
};
use crate::slag::{
    closedness_loop_residual, closedness_loop_residual_mu, embed_F, exact_period_matrices, family_from_value,
    lagrangian_residual, mclean_check, mclean_metric, model_from_value, moduli_coordinates, period_matrices,
    rectangle_loop, specialness_scan, AffineSLagFamily, FamilyPeriods, FamilySpec,
};

const AXIOM_TOL: f64 = 1e-10;
const MCLEAN_TOL: f64 = 1e-8;
const LOOP_TOL: f64 = 1e-8;
const METRIC_TOL: f64 = 1e-8;
const PAIRING_TOL: f64 = 1e-10;
const SPECIAL_TOL: f64 = 1e-10;
const MIRROR_TOL: f64 = 1e-8;
const KAHLER_TOL: f64 = 1e-10;
const FIBER_TOL: f64 = 1e-12;
const HARMONIC_TOL: f64 = 1e-8;
/// Grid-estimated tolerances are compared with this multiple of the estimate.
const STENCIL_FACTOR: f64 = 10.0;

pub(crate) fn dispatch(cmd: Command, ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    match cmd {
        Command::CyValidate => cy_validate(ctx, value, report),
        Command::FamilyScan => family_scan(ctx, value, report, out),
        Command::Embed => embed(ctx, value, report, out),
        Command::Legendre => legendre(ctx, value, report, out),
        Command::MaSolve => ma_solve(ctx, value, report, out),
        Command::PartialLegendre => partial(ctx, value, report, out),
        Command::Semiflat => semiflat(ctx, value, report, out),
        Command::Gh => gh(ctx, value, report, out),
    }
}

/// Optional key of a configuration object.
fn field<T: DeserializeOwned>(value: &Value, key: &str) -> Result<Option<T>> {
    match value.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| Error::Input(format!("{key}: {e}"))),
    }
}

fn required<T: DeserializeOwned>(value: &Value, key: &str) -> Result<T> {
    field(value, key)?.ok_or_else(|| Error::Input(format!("configuration is missing {key:?}")))
}

#[derive(Debug, Deserialize)]
struct BoxSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
}

fn cy_validate(ctx: &Context, value: &Value, report: &mut Report) -> Result<()> {
    let spec = value.get("model").unwrap_or(value);
    let model = model_from_value(spec, ctx.base())?;
    report.inputs = json!({ "model": ModelSpec::from_model(&model) });
    let tol = ctx.tol_or(AXIOM_TOL);
    let axioms = validate_axioms(&model, tol)?;
    for c in &axioms.checks {
        let residual = c.residual.unwrap_or(0.0);
        report.check(
            &c.name,
            Check {
                residual,
                tolerance: tol,
                pass: c.pass,
            },
        );
    }
    report.result("axioms", &axioms);
    Ok(())
}

fn load_family(ctx: &Context, value: &Value) -> Result<AffineSLagFamily> {
    match value.get("family") {
        Some(f) => family_from_value(f, ctx.base()),
        None => family_from_value(value, ctx.base()),
    }
}

fn moduli_grid(value: &Value, m: usize) -> Result<BoxGrid> {
    match field::<BoxSpec>(value, "moduli")? {
        Some(b) => BoxGrid::new(b.lower, b.upper, b.resolution),
        None => BoxGrid::cube(m, -0.5, 0.5, 5),
    }
}

/// Up to five moduli points: the listed samples, or nodes spread over the grid.
fn sample_points(value: &Value, grid: &BoxGrid) -> Result<Vec<Vec<f64>>> {
    if let Some(s) = field::<Vec<Vec<f64>>>(value, "samples")? {
        return Ok(s);
    }
    let n = grid.node_count();
    let mut nodes = vec![0, n / 4, n / 2, 3 * n / 4, n - 1];
    nodes.dedup();
    Ok(nodes.into_iter().map(|i| grid.coordinates(i)).collect())
}

/// Rectangles through the lower and upper corners for every axis pair; a
/// back-and-forth segment in one dimension.
fn loops(grid: &BoxGrid) -> Vec<Vec<Vec<f64>>> {
    let m = grid.dim();
    if m == 1 {
        return vec![vec![grid.lower().to_vec(), grid.upper().to_vec(), grid.lower().to_vec()]];
    }
    let center: Vec<f64> = (0..m).map(|a| 0.5 * (grid.lower()[a] + grid.upper()[a])).collect();
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            out.push(rectangle_loop(grid.lower(), grid.upper(), i, j));
            out.push(rectangle_loop(&center, grid.upper(), i, j));
            out.push(rectangle_loop(grid.lower(), &center, i, j));
        }
    }
    out
}

fn family_scan(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let fam = load_family(ctx, value)?;
    let grid = moduli_grid(value, fam.m())?;
    let fres: usize = field(value, "fiber_resolution")?.unwrap_or(16);
    report.inputs = json!({
        "family": FamilySpec::from_family(&fam),
        "moduli": grid,
        "fiber_resolution": fres,
    });
    let samples = sample_points(value, &grid)?;
    let fiber = fam.fiber_grid(fres)?;
    let (mut mclean, mut metric, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
    for t in &samples {
        for j in 0..fam.m() {
            mclean = mclean.max(mclean_check(&fam, t, j, &fiber)?.max_residual());
        }
        metric = metric.max(mclean_metric(&fam, t, fres)?.residual);
        pairing = pairing.max(lagrangian_residual(&period_matrices(&fam, t, fres)?));
    }
    report.claim("mclean", Check::below(mclean, ctx.tol_or(MCLEAN_TOL)));
    report.claim("prop2", Check::below(metric, ctx.tol_or(METRIC_TOL)));
    report.claim("thm3", Check::below(pairing, ctx.tol_or(PAIRING_TOL)));

    let src = FamilyPeriods::new(&fam)?;
    let mut loop_residual: f64 = 0.0;
    for lp in loops(&grid) {
        loop_residual = loop_residual
            .max(closedness_loop_residual(&src, &lp)?)
            .max(closedness_loop_residual_mu(&src, &lp)?);
    }
    report.claim("prop1", Check::below(loop_residual, ctx.tol_or(LOOP_TOL)));

    let scan = specialness_scan(&fam, &grid, fres)?;
    let variation = scan.variation_h1.max(scan.variation_hn1).max(scan.variation_fiber);
    report.claim("prop3", Check::below(variation, ctx.tol_or(SPECIAL_TOL)));
    scan.write_csv(out.create("scan.csv")?)?;
    let periods = exact_period_matrices(&fam, &samples[0])?;
    report.result(
        "periods",
        &json!({
            "lambda": rows(&periods.lambda),
            "mu": rows(&periods.mu),
            "pairing": rows(&periods.pairing()),
        }),
    );
    report.result(
        "variation",
        &json!({
            "vol_H1": scan.variation_h1,
            "vol_Hn1": scan.variation_hn1,
            "vol_fiber": scan.variation_fiber,
        }),
    );
    Ok(())
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

fn embed(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let fam = load_family(ctx, value)?;
    let grid = moduli_grid(value, fam.m())?;
    let basepoint: Vec<f64> = field(value, "basepoint")?
        .unwrap_or_else(|| (0..grid.dim()).map(|a| 0.5 * (grid.lower()[a] + grid.upper()[a])).collect());
    report.inputs = json!({
        "family": FamilySpec::from_family(&fam),
        "moduli": grid,
        "basepoint": basepoint,
    });
    let src = FamilyPeriods::new(&fam)?;
    let tol = ctx.tol_or(LOOP_TOL);
    let chart = match moduli_coordinates(&src, &grid, &basepoint, tol) {
        Ok(c) => c,
        Err(Error::PathDependence { residual, tol }) => {
            report.claim("prop1", Check::failed(residual, tol));
            return Err(Error::PathDependence { residual, tol });
        }
        Err(e) => return Err(e),
    };
    let mut loop_residual: f64 = 0.0;
    for lp in loops(&grid) {
        loop_residual = loop_residual
            .max(closedness_loop_residual(&src, &lp)?)
            .max(closedness_loop_residual_mu(&src, &lp)?);
    }
    report.claim("prop1", Check::below(loop_residual, tol));
    report.claim(
        "thm3",
        Check::below(lagrangian_residual(src.periods()), ctx.tol_or(PAIRING_TOL)),
    );
    let emb = embed_F(&chart);
    report.check(
        "injective",
        Check {
            residual: emb.min_separation,
            tolerance: 1e-12,
            pass: emb.injective,
        },
    );
    let twice = chart.mirror_swap()?.mirror_swap()?;
    report.check("mirror_involution", Check::below(twice.distance(&chart), MIRROR_TOL));

    let m = grid.dim();
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    for i in 0..m {
        cols.push((format!("t_{}", i + 1), (0..grid.node_count()).map(|n| emb.t[n][i]).collect()));
    }
    for i in 0..m {
        cols.push((format!("u_{}", i + 1), chart.u_component(i)));
    }
    for i in 0..m {
        cols.push((format!("v_{}", i + 1), chart.v_component(i)));
    }
    let mut w = csv::Writer::from_writer(out.create("chart.csv")?);
    let mut header = vec!["node".to_string()];
    header.extend(cols.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    for node in 0..grid.node_count() {
        let mut row = vec![node.to_string()];
        row.extend(cols.iter().map(|(_, v)| format!("{:e}", v[node])));
        w.write_record(&row)?;
    }
    w.flush()?;
    report.result("min_separation", &emb.min_separation);
    Ok(())
}

fn load_potential(ctx: &Context, value: &Value, key: &str) -> Result<HessianPotential> {
    let spec: PotentialSpec = required(value, key)?;
    let pot = spec.load(ctx.base())?;
    Ok(match field::<f64>(value, "c")? {
        Some(c) => pot.with_c(Some(c)),
        None => pot,
    })
}

fn det_sampled(pot: &HessianPotential) -> Result<Sampled> {
    Ok(Sampled {
        grid: pot.grid().clone(),
        values: det_hessian(pot)?,
    })
}

/// `max |det Hess - c|` and its stencil tolerance; `c` defaults to the mean determinant.
fn ma_check(pot: &HessianPotential, c: Option<f64>) -> Result<(f64, Check)> {
    let det = det_hessian(pot)?;
    let c = c.unwrap_or_else(|| det.iter().sum::<f64>() / det.len() as f64);
    let residual = det.iter().fold(0.0f64, |m, d| m.max((d - c).abs()));
    let tol = STENCIL_FACTOR * stencil_tolerance(pot, det_sampled)?;
    Ok((c, Check::below(residual, tol)))
}

fn legendre(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let pot = load_potential(ctx, value, "potential")?;
    report.inputs = json!({ "potential": value.get("potential"), "c": pot.c() });
    let pair = legendre_transform(&pot)?;
    let (c, primal) = ma_check(&pot, pot.c())?;
    let (_, dual) = ma_check(&pair.dual, Some(1.0 / c))?;
    report.check("primal_ma", primal);
    report.claim("prop3", dual);
    let fenchel_tol = STENCIL_FACTOR * interpolation_tolerance(pair.dual.grid(), pair.dual.values())?;
    report.check("fenchel", Check::below(pair.fenchel_residual, fenchel_tol));
    let twice = pair.mirror_swap()?.mirror_swap()?;
    let drift = twice
        .primal
        .values()
        .iter()
        .zip(pair.primal.values())
        .chain(twice.dual.values().iter().zip(pair.dual.values()))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    report.check("mirror_involution", Check::below(drift, MIRROR_TOL));
    write_potential_csv(&pair.dual, out.create("dual.csv")?)?;
    report.result("c", &c);
    report.result("dual_grid", pair.dual.grid());
    Ok(())
}

fn ma_solve(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let file: SolverFile = serde_json::from_value(value.clone()).map_err(|e| Error::Input(format!("solver config: {e}")))?;
    let spec = file
        .boundary
        .clone()
        .ok_or_else(|| Error::Input("solver config is missing \"boundary\"".into()))?;
    let boundary = spec.load(ctx.base())?;
    report.inputs = serde_json::to_value(&file)?;
    let grid = boundary.grid().clone();
    match solve_ma_dirichlet(&grid, boundary.values(), &file.config) {
        Ok(sol) => {
            let last = *sol.report.residual_history.last().unwrap_or(&f64::NAN);
            // a solve that stalls at round-off stops above a tighter requested tolerance
            let tol = file.config.tol.max(roundoff_level(&grid, sol.potential.values()));
            report.claim("prop3", Check::below(last, tol));
            let reference = sol
                .potential
                .values()
                .iter()
                .zip(boundary.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            report.result("solve", &sol.report);
            report.result("difference_from_boundary_potential", &reference);
            write_potential_csv(&sol.potential, out.create("solution.csv")?)?;
            Ok(())
        }
        Err(Error::Convergence { iterations, history }) => {
            let last = *history.last().unwrap_or(&f64::NAN);
            report.claim("prop3", Check::failed(last, file.config.tol));
            Err(Error::Convergence { iterations, history })
        }
        Err(e) => Err(e),
    }
}

fn partial(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let pot = load_potential(ctx, value, "potential")?;
    report.inputs = json!({ "potential": value.get("potential"), "c": pot.c() });
    let pl = partial_legendre_2d(&pot)?;
    let tol = STENCIL_FACTOR * pl.stencil_tolerance()?;
    report.claim("prop3", Check::below(pl.residual, tol));
    write_field_csv(
        &pl.grid,
        &[("h", &pl.h), ("u_1_of_s", &pl.u1), ("laplacian", &pl.laplacian)],
        out.create("partial_legendre.csv")?,
    )?;
    Ok(())
}

fn semiflat(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let pot = load_potential(ctx, value, "potential")?;
    report.inputs = json!({ "potential": value.get("potential"), "c": pot.c() });
    let sf = build_semiflat(&pot)?;
    let rep = semiflat_report(&sf, ctx.oracle)?;
    let nij = hessian_chart_nijenhuis(&sf)?;
    report.claim("prop4", Check::below(nij.residual, STENCIL_FACTOR * nij.tolerance));
    report.claim("prop5", Check::below(rep.norm_variation, STENCIL_FACTOR * rep.norm_tolerance));
    report.check("kahler_closed", Check::below(rep.kahler_residual, ctx.tol_or(KAHLER_TOL)));
    report.check("hermitian", Check::below(rep.hermitian_residual, FIBER_TOL));
    report.check("monge_ampere", Check::below(rep.ma_residual_max, STENCIL_FACTOR * rep.ma_tolerance));
    report.check("ricci_flat", Check::below(rep.ricci_max, STENCIL_FACTOR * rep.ricci_tolerance));
    report.check(
        "fiber_special_lagrangian",
        Check {
            residual: rep.fiber.omega.max(rep.fiber.real_part),
            tolerance: FIBER_TOL,
            pass: rep.fiber.omega.max(rep.fiber.real_part) < FIBER_TOL && rep.fiber.imaginary_min > 0.0,
        },
    );
    if let Some(o) = &rep.oracle {
        report.check("ricci_oracle", Check::below(o.discrepancy, STENCIL_FACTOR * o.tolerance));
    }
    report.result("ma_residual_max", &rep.ma_residual_max);
    report.result("norm_variation", &rep.norm_variation);
    report.result("ricci_max", &rep.ricci_max);
    report.result("kahler_residual", &rep.kahler_residual);
    report.result("semiflat", &rep);
    report.result("nijenhuis", &nij);

    let det = det_hessian(&pot)?;
    let norm = crate::semiflat::holomorphic_norm_field(&sf);
    write_field_csv(
        pot.grid(),
        &[("det_hess", &det), ("holomorphic_norm", &norm.values)],
        out.create("semiflat_fields.csv")?,
    )?;
    let ricci = ricci_form(&sf)?;
    let m = pot.dim();
    let mut names = Vec::new();
    let mut comps = Vec::new();
    for j in 0..m {
        for k in j..m {
            names.push(format!("R_{}{}", j + 1, k + 1));
            comps.push(ricci.values.iter().map(|r| r[(j, k)]).collect::<Vec<f64>>());
        }
    }
    let cols: Vec<(&str, &[f64])> = names.iter().map(String::as_str).zip(comps.iter().map(Vec::as_slice)).collect();
    write_field_csv(&ricci.grid, &cols, out.create("ricci.csv")?)?;
    Ok(())
}

fn gh(ctx: &Context, value: &Value, report: &mut Report, out: &mut Output) -> Result<()> {
    let v = load_potential(ctx, value, "V")?;
    report.inputs = json!({ "V": value.get("V") });
    let tol = ctx.tol_or(HARMONIC_TOL);
    let rep = gh_check(v.grid(), v.values(), tol)?;
    report.check("gh_ricci", Check::below(rep.ricci_max, STENCIL_FACTOR * rep.tolerance));
    report.result("gh", &rep);
    let metric = gh_metric(v.grid(), v.values(), tol)?;
    write_field_csv(
        v.grid(),
        &[("V", &metric.potential), ("a", &metric.connection)],
        out.create("gh.csv")?,
    )?;
    Ok(())
}
