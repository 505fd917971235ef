use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::hessian::{det_hessian, legendre_transform, HessianPotential};

fn main() -> slag_moduli::Result<()> {
    // det Hess = 1 on u2 > 0
    let grid = BoxGrid::new(vec![-0.5, 1.0], vec![0.5, 2.0], vec![33, 33])?;
    let phi = HessianPotential::from_fn(grid, |u| u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0, Some(1.0))?;
    let pair = legendre_transform(&phi)?;
    let dual_det = det_hessian(&pair.dual)?;
    let spread = dual_det.iter().fold((f64::MAX, f64::MIN), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
    let g = pair.dual.grid();
    println!("dual box {:?} .. {:?}", g.lower(), g.upper());
    println!("det Hess psi in [{:.8}, {:.8}]", spread.0, spread.1);
    println!("Fenchel residual {:.2e}", pair.fenchel_residual);
    let (u, v) = &pair.pairs[g.node_count() / 2];
    println!("center of dual grid: v = {v:?} is the gradient at u = {u:?}");
    Ok(())
}
