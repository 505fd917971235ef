use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::slag::{
    exact_period_matrices, lagrangian_residual, mclean_check, mclean_metric, period_matrices, specialness_scan,
    AffineSLagFamily,
};

fn main() -> slag_moduli::Result<()> {
    for k in 1..=3 {
        let fam = AffineSLagFamily::tilt(k)?;
        let t = [0.2];
        let grid = fam.fiber_grid(64)?;
        let mc = mclean_check(&fam, &t, 0, &grid)?;
        let pm = period_matrices(&fam, &t, 32)?;
        let exact = exact_period_matrices(&fam, &t)?;
        let metric = mclean_metric(&fam, &t, 32)?;
        println!(
            "TILT(1,{k}): phase {:.4}, lambda {:.6} (exact {:.6}), mu {:.6}, McLean metric {:.8}, harmonic {:.1e}",
            fam.phase(),
            pm.lambda[(0, 0)],
            exact.lambda[(0, 0)],
            pm.mu[(0, 0)],
            metric.metric[(0, 0)],
            mc.max_residual()
        );
    }

    let fam = AffineSLagFamily::standard(3)?;
    let pm = period_matrices(&fam, &[0.1, -0.2, 0.3], 16)?;
    println!("STD(3): lambda^T mu - mu^T lambda = {:.1e}", lagrangian_residual(&pm));
    let scan = specialness_scan(&fam, &BoxGrid::cube(3, -0.5, 0.5, 3)?, 16)?;
    println!(
        "STD(3) over 27 moduli points: volume variations {:.1e} {:.1e} {:.1e}",
        scan.variation_h1, scan.variation_hn1, scan.variation_fiber
    );
    Ok(())
}
