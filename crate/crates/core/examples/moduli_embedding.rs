use nalgebra::DMatrix;
use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::slag::{
    closedness_loop_residual, embed_F, moduli_coordinates, rectangle_loop, AffineSLagFamily, FamilyPeriods,
    SyntheticPeriods,
};
use slag_moduli::Error;

fn main() -> slag_moduli::Result<()> {
    let fam = AffineSLagFamily::standard(2)?;
    let src = FamilyPeriods::new(&fam)?;
    let grid = BoxGrid::cube(2, -0.5, 0.5, 5)?;
    let chart = moduli_coordinates(&src, &grid, &[0.0, 0.0], 1e-8)?;
    let emb = embed_F(&chart);
    println!("STD(2): F injective = {}, min separation {:.3}", emb.injective, emb.min_separation);
    for node in [0, 12, 24] {
        println!("  t = {:?} -> u = {:?}, v = {:?}", emb.t[node], emb.u[node], emb.v[node]);
    }

    // lambda_12 = t_1 is not a Jacobian, so the periods are path dependent
    let skew = SyntheticPeriods::new(
        2,
        |t: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, t[0], 0.0, 1.0]),
        |_: &[f64]| DMatrix::identity(2, 2),
    );
    let loop_residual = closedness_loop_residual(&skew, &rectangle_loop(&[0.0, 0.0], &[0.5, 0.5], 0, 1))?;
    println!("manufactured chart: loop residual {loop_residual:.4}");
    match moduli_coordinates(&skew, &grid, &[0.0, 0.0], 1e-8) {
        Err(Error::PathDependence { residual, .. }) => println!("  chart refused, residual {residual:.3}"),
        other => println!("  unexpected: {other:?}"),
    }
    Ok(())
}
