use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::hessian::{solve_ma_dirichlet_fn, HessianPotential, SolverConfig};
use slag_moduli::semiflat::{build_semiflat, hessian_chart_nijenhuis, semiflat_report, SemiflatReport};

fn show(name: &str, r: &SemiflatReport) {
    println!(
        "{name:<8} norm variation {:.2e} (10 tol {:.1e})  max|Ricci| {:.2e} (10 tol {:.1e})  Calabi-Yau: {}",
        r.norm_variation,
        10.0 * r.norm_tolerance,
        r.ricci_max,
        10.0 * r.ricci_tolerance,
        r.norm_pass() && r.ricci_pass()
    );
    if let Some(o) = &r.oracle {
        println!("         Christoffel route agrees to {:.1e} (10 tol {:.1e})", o.discrepancy, 10.0 * o.tolerance);
    }
}

fn main() -> slag_moduli::Result<()> {
    let grid = BoxGrid::new(vec![-0.5, 1.0], vec![0.5, 2.0], vec![65, 65])?;
    let cfg = SolverConfig {
        tol: 1e-12,
        ..Default::default()
    };
    let sol = solve_ma_dirichlet_fn(&grid, |u| u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0, &cfg)?;
    let sf = build_semiflat(&sol.potential)?;
    show("MA", &semiflat_report(&sf, true)?);
    let nij = hessian_chart_nijenhuis(&sf)?;
    println!("         Nijenhuis {:.1e} (tol {:.1e})", nij.residual, nij.tolerance);

    let quartic = HessianPotential::from_fn(
        BoxGrid::cube(2, -0.5, 0.5, 65)?,
        |u| u[0].powi(4) / 12.0 + u[0] * u[0] / 2.0 + u[1] * u[1] / 2.0,
        None,
    )?;
    show("quartic", &semiflat_report(&build_semiflat(&quartic)?, true)?);

    // one modulus: every metric is Ricci-flat, but the norm is not constant
    let exp = HessianPotential::from_fn(BoxGrid::cube(1, 0.0, 1.0, 65)?, |u| u[0].exp(), None)?;
    show("exp", &semiflat_report(&build_semiflat(&exp)?, false)?);
    Ok(())
}
