use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::hessian::{legendre_transform, HessianPotential, MirrorSwap};
use slag_moduli::slag::{moduli_coordinates, AffineSLagFamily, FamilyPeriods};

fn main() -> slag_moduli::Result<()> {
    let fam = AffineSLagFamily::tilt(2)?;
    let src = FamilyPeriods::new(&fam)?;
    let chart = moduli_coordinates(&src, &BoxGrid::cube(1, -0.5, 0.5, 5)?, &[0.0], 1e-8)?;
    let mirror = chart.mirror_swap()?;
    println!("TILT(1,2) u(t_max) = {:.6}, mirror u(t_max) = {:.6}", chart.u[4][0], mirror.u[4][0]);
    println!("double swap moves the chart by {:.1e}", mirror.mirror_swap()?.distance(&chart));

    let pot = HessianPotential::from_fn(BoxGrid::cube(2, -1.0, 1.0, 17)?, |u| u[0] * u[0] + 0.25 * u[1] * u[1], None)?;
    let pair = legendre_transform(&pot)?;
    let swapped = pair.mirror_swap()?;
    println!(
        "swapped pair: primal box {:?}..{:?}, Fenchel residual {:.1e}",
        swapped.primal.grid().lower(),
        swapped.primal.grid().upper(),
        swapped.fenchel_residual
    );
    Ok(())
}
