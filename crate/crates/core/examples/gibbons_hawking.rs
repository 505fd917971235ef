use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::semiflat::{gh_check, gh_metric};

fn main() -> slag_moduli::Result<()> {
    let grid = BoxGrid::cube(2, -0.5, 0.5, 33)?;
    let v = grid.sample(|y| 2.0 + y[0]);
    let m = gh_metric(&grid, &v, 1e-8)?;
    println!("center metric (y1, y2, y3, tau):\n{}", m.metric[grid.node_count() / 2]);
    let r = gh_check(&grid, &v, 1e-8)?;
    println!("V = 2 + y1: max|Ricci| {:.2e}, tolerance {:.2e}, pass {}", r.ricci_max, r.tolerance, r.pass());

    match gh_check(&grid, &grid.sample(|y| 2.0 + y[0] * y[0]), 1e-8) {
        Ok(r) => println!("V = 2 + y1^2 accepted?! {r:?}"),
        Err(e) => println!("V = 2 + y1^2 rejected: {e}"),
    }
    Ok(())
}
