#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::cy::FlatCalabiYauModel;
use slag_moduli::hessian::{solve_ma_dirichlet_fn, HessianPotential, MaSolution, SolverConfig};
use slag_moduli::slag::{AffineSLagFamily, Phase};

/// Convex potential with `det Hess = 1` on `u2 > 0`.
pub fn ma_closed_form(u: &[f64]) -> f64 {
    u[0] * u[0] / (2.0 * u[1]) + u[1].powi(3) / 6.0
}

/// `det Hess = 1 + u1^2`, so not a Monge-Ampere solution.
pub fn quartic(u: &[f64]) -> f64 {
    u[0].powi(4) / 12.0 + u[0] * u[0] / 2.0 + u[1] * u[1] / 2.0
}

pub fn ma_grid(n: usize) -> BoxGrid {
    BoxGrid::new(vec![-0.5, 1.0], vec![0.5, 2.0], vec![n, n]).unwrap()
}

/// Solver output for the closed-form Dirichlet data on `ma_grid(n)`.
pub fn ma_solution(n: usize) -> MaSolution {
    let cfg = SolverConfig {
        tol: 1e-12,
        ..Default::default()
    };
    solve_ma_dirichlet_fn(&ma_grid(n), ma_closed_form, &cfg).unwrap()
}

pub fn quartic_potential(n: usize) -> HessianPotential {
    HessianPotential::from_fn(BoxGrid::cube(2, -0.5, 0.5, n).unwrap(), quartic, None).unwrap()
}

/// STD(1..3), TILT(1, 1..3) and STD(2) with moduli frame scaled by diag(2, 3).
pub fn builtin_families() -> Vec<(String, AffineSLagFamily)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push((format!("STD({n})"), AffineSLagFamily::standard(n).unwrap()));
    }
    for k in 1..=3 {
        out.push((format!("TILT(1,{k})"), AffineSLagFamily::tilt(k).unwrap()));
    }
    let std2 = AffineSLagFamily::standard(2).unwrap();
    let q = std2.moduli_frame() * DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]));
    out.push(("scaled STD(2)".into(), std2.with_moduli_frame(q).unwrap()));
    out
}

/// A random affine special Lagrangian family in STD(2).
///
/// The fiber frame `[A; K A]` with integer `A` and integer symmetric `K` is a
/// Lagrangian lattice plane; moduli directions are `J` of it times a random
/// invertible matrix, and the phase is fitted.
pub fn random_family<R: Rng>(rng: &mut R) -> AffineSLagFamily {
    loop {
        let a = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-2i32..=2) as f64);
        if a.determinant().abs() < 0.5 {
            continue;
        }
        let k12 = rng.random_range(-1i32..=1) as f64;
        let k = DMatrix::from_row_slice(2, 2, &[rng.random_range(-1i32..=1) as f64, k12, k12, rng.random_range(-1i32..=1) as f64]);
        let ka = &k * &a;
        let mut p = DMatrix::zeros(4, 2);
        p.view_mut((0, 0), (2, 2)).copy_from(&a);
        p.view_mut((2, 0), (2, 2)).copy_from(&ka);
        let mut jp = DMatrix::zeros(4, 2);
        jp.view_mut((0, 0), (2, 2)).copy_from(&(-&ka));
        jp.view_mut((2, 0), (2, 2)).copy_from(&a);
        let b = DMatrix::from_fn(2, 2, |r, c| if r == c { 1.0 } else { 0.0 } + rng.random_range(-0.4..0.4));
        let r = DVector::from_fn(4, |_, _| rng.random_range(-0.5..0.5));
        let model = FlatCalabiYauModel::standard(2).unwrap();
        if let Ok(fam) = AffineSLagFamily::new(model, p, jp * b, r, Phase::Auto) {
            return fam;
        }
    }
}
