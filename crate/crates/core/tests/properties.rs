mod common;

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slag_moduli::boxgrid::BoxGrid;
use slag_moduli::cy::{validate_axioms, FlatCalabiYauModel};
use slag_moduli::forms::{exterior_derivative, hodge_star, wedge, FormField, GridTorus, MetricField};
use slag_moduli::hessian::{det_hessian, legendre_transform, HessianPotential, MirrorSwap};
use slag_moduli::semiflat::{almost_complex_structure, build_semiflat, holomorphic_norm_field, ricci_form};
use slag_moduli::slag::{
    lagrangian_residual, mclean_metric, period_matrices, specialness_scan, FamilyPeriods, PeriodSource,
};

fn n_choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A form whose coefficients are low trigonometric modes with the given seeds.
fn trig_form(base: &GridTorus, degree: usize, seeds: &[f64]) -> FormField {
    let d = base.dim();
    let ncomp = n_choose(d, degree);
    let seeds = seeds.to_vec();
    FormField::from_fn(base.clone(), degree, move |x| {
        (0..ncomp)
            .map(|c| {
                let s = seeds[c % seeds.len()] + c as f64;
                let phase: f64 = x.iter().enumerate().map(|(a, xa)| ((a + c) % 3 + 1) as f64 * xa).sum();
                s.sin() * (TAU * phase + s).cos() + 0.5 * s.cos() * (TAU * x[c % d] * 2.0).sin()
            })
            .collect()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn d_squared_vanishes(seeds in prop::collection::vec(-3.0f64..3.0, 3), degree in 0usize..2) {
        let base = GridTorus::new(vec![16, 16, 16], vec![1.0, 1.0, 1.0]).unwrap();
        let a = trig_form(&base, degree, &seeds);
        let dda = exterior_derivative(&exterior_derivative(&a).unwrap()).unwrap();
        prop_assert!(dda.norm_inf() < 1e-9, "{}", dda.norm_inf());
    }

    #[test]
    fn star_star_is_signed_identity(seeds in prop::collection::vec(-3.0f64..3.0, 3), degree in 0usize..4) {
        let base = GridTorus::new(vec![8, 8, 8], vec![1.0, 1.0, 1.0]).unwrap();
        let g = MetricField::uniform(
            base.clone(),
            DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]),
        )
        .unwrap();
        let a = trig_form(&base, degree, &seeds);
        let ss = hodge_star(&hodge_star(&a, &g).unwrap(), &g).unwrap();
        let sign = if degree * (3 - degree) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ss.sub(&a.scaled(sign)).unwrap().norm_inf() < 1e-10);
    }

    #[test]
    fn wedge_is_graded_commutative(s1 in prop::collection::vec(-3.0f64..3.0, 3), s2 in prop::collection::vec(-3.0f64..3.0, 3)) {
        let base = GridTorus::new(vec![8, 8, 8], vec![1.0, 1.0, 1.0]).unwrap();
        let a = trig_form(&base, 1, &s1);
        let b = trig_form(&base, 1, &s2);
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.axpy(1.0, &ba).unwrap().norm_inf() < 1e-14);
    }

    #[test]
    fn axioms_survive_linear_frame_changes(entries in prop::collection::vec(-0.4f64..0.4, 4)) {
        let frame = DMatrix::from_fn(4, 4, |r, c| if r == c { 1.0 } else { 0.0 })
            + DMatrix::from_fn(4, 4, |r, c| if r < 2 && c < 2 { entries[2 * r + c] } else { 0.0 });
        let model = FlatCalabiYauModel::standard(2).unwrap().change_frame(&frame).unwrap();
        let r = validate_axioms(&model, 1e-9).unwrap();
        prop_assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn random_families_satisfy_period_identities(seed in 0u64..10_000) {
        let fam = common::random_family(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = [0.1, -0.2];
        let pm = period_matrices(&fam, &t, 16).unwrap();
        prop_assert!(lagrangian_residual(&pm) < 1e-10);
        prop_assert!(mclean_metric(&fam, &t, 16).unwrap().residual < 1e-8);
        let scan = specialness_scan(&fam, &BoxGrid::cube(2, -0.5, 0.5, 3).unwrap(), 16).unwrap();
        prop_assert!(scan.variation_fiber < 1e-10);
        prop_assert!(scan.variation_h1 < 1e-10);
    }

    #[test]
    fn unimodular_cycle_change_transforms_lambda(seed in 0u64..10_000, k in -3i32..=3) {
        let fam = common::random_family(&mut ChaCha8Rng::seed_from_u64(seed));
        let z = DMatrix::from_row_slice(2, 2, &[1.0, k as f64, 0.0, 1.0]);
        let changed = fam.with_cycle_change(&z).unwrap();
        let a = FamilyPeriods::new(&fam).unwrap();
        let b = FamilyPeriods::new(&changed).unwrap();
        let t = [0.0, 0.0];
        prop_assert!((b.lambda(&t) - &z * a.lambda(&t)).amax() < 1e-10);
        prop_assert!((lagrangian_residual(b.periods()) - lagrangian_residual(a.periods())).abs() < 1e-10);
        let ga = mclean_metric(&fam, &t, 16).unwrap().metric;
        let gb = mclean_metric(&changed, &t, 16).unwrap().metric;
        prop_assert!((ga - gb).amax() < 1e-10);
    }

    #[test]
    fn quadratic_hessian_and_dual(a11 in 0.5f64..3.0, a22 in 0.5f64..3.0, skew in -0.5f64..0.5) {
        let a12 = skew * (a11 * a22).sqrt();
        let det = a11 * a22 - a12 * a12;
        let pot = HessianPotential::from_fn(
            BoxGrid::cube(2, -1.0, 1.0, 17).unwrap(),
            |u| 0.5 * (a11 * u[0] * u[0] + 2.0 * a12 * u[0] * u[1] + a22 * u[1] * u[1]),
            None,
        )
        .unwrap();
        for d in det_hessian(&pot).unwrap() {
            prop_assert!((d - det).abs() < 1e-9 * det.max(1.0));
        }
        let pair = legendre_transform(&pot).unwrap();
        let g = pair.dual.grid();
        for node in 0..g.node_count() {
            let v = g.coordinates(node);
            let exact = 0.5 * (a22 * v[0] * v[0] - 2.0 * a12 * v[0] * v[1] + a11 * v[1] * v[1]) / det;
            prop_assert!((pair.dual.values()[node] - exact).abs() < 1e-9);
        }
        let twice = pair.mirror_swap().unwrap().mirror_swap().unwrap();
        prop_assert_eq!(twice.dual.values(), pair.dual.values());
    }

    #[test]
    fn quadratic_semiflat_is_flat(a11 in 0.5f64..3.0, a22 in 0.5f64..3.0, skew in -0.5f64..0.5) {
        let a12 = skew * (a11 * a22).sqrt();
        let pot = HessianPotential::from_fn(
            BoxGrid::cube(2, -0.5, 0.5, 21).unwrap(),
            |u| 0.5 * (a11 * u[0] * u[0] + 2.0 * a12 * u[0] * u[1] + a22 * u[1] * u[1]),
            None,
        )
        .unwrap();
        let sf = build_semiflat(&pot).unwrap();
        prop_assert!(ricci_form(&sf).unwrap().max_abs() < 1e-8);
        prop_assert!(holomorphic_norm_field(&sf).variation < 1e-10);
        prop_assert!(sf.hermitian_residual() < 1e-12);
        prop_assert!(sf.kahler_residual() < 1e-10);
    }

    #[test]
    fn complex_structure_squares_to_minus_one(entries in prop::collection::vec(-1.0f64..1.0, 4)) {
        let l = DMatrix::from_row_slice(2, 2, &entries) + DMatrix::identity(2, 2) * 2.5;
        let i = almost_complex_structure(&l).unwrap();
        prop_assert!((&i * &i + DMatrix::identity(4, 4)).amax() < 1e-12);
    }
}
