use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::hessian::{solve_ma_dirichlet_fn, SolverConfig};

fn exact(u: &[f64]) -> f64 {
    u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0
}

fn main() -> slag_moduli::Result<()> {
    let cfg = SolverConfig {
        tol: 1e-11,
        ..Default::default()
    };
    for n in [17, 33, 65] {
        let grid = BoxGrid::new(vec![-0.5, 1.0], vec![0.5, 2.0], vec![n, n])?;
        let sol = solve_ma_dirichlet_fn(&grid, exact, &cfg)?;
        let err = (0..grid.node_count())
            .map(|i| (sol.potential.values()[i] - exact(&grid.coordinates(i))).abs())
            .fold(0.0, f64::max);
        println!(
            "{n:>3}^2: {} Newton steps, residuals {:?}, max error vs closed form {err:.2e}",
            sol.report.iterations,
            sol.report
                .residual_history
                .iter()
                .map(|r| format!("{r:.1e}"))
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}
