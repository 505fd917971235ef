use std::f64::consts::TAU;

use nalgebra::DMatrix;
use slag_moduli::forms::{
    exterior_derivative, harmonicity_residual, hodge_star, l2_inner, wedge, FormField, GridTorus, MetricField,
};

fn main() -> slag_moduli::Result<()> {
    let torus = GridTorus::new(vec![32, 32], vec![1.0, 1.0])?;
    let f = FormField::scalar(torus.clone(), |x| (TAU * x[0]).sin() * (TAU * x[1]).cos());
    let df = exterior_derivative(&f)?;
    let ddf = exterior_derivative(&df)?;
    println!("|d d f|_inf = {:.2e}", ddf.norm_inf());

    // a skewed flat metric: constant forms stay harmonic, exact ones do not
    let g = MetricField::uniform(torus.clone(), DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]))?;
    let theta = FormField::constant(torus.clone(), 1, &[1.0, -0.3])?;
    let (closed, coclosed) = harmonicity_residual(&theta, &g)?;
    println!("constant 1-form: |d theta| = {closed:.1e}, |d* theta| = {coclosed:.1e}");
    let (closed, coclosed) = harmonicity_residual(&df, &g)?;
    println!("exact 1-form:    |d df| = {closed:.1e}, |d* df| = {coclosed:.3}");

    let star = hodge_star(&theta, &g)?;
    let vol = wedge(&theta, &star)?.integrate_top()?;
    println!("int theta ^ *theta = {vol:.12} = <theta, theta> = {:.12}", l2_inner(&theta, &theta, &g)?);
    Ok(())
}
