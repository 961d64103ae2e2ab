mod common;

use std::f64::consts::PI;

use common::{bergman_quadrature, random_scalar_field};
use fracbb_core::disk::{mixed_boundary_norm, random_series};
use fracbb_core::norms::sobolev_norm;
use fracbb_core::{analytic_projection, inverse_transform, l1_norm, Complex64, PowerSeries, Tolerance};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bergman_equals_pi_times_boundary_norm(order in 0usize..=40, decay in 0.5f64..2.0, seed: u64, r in 0.05f64..=1.0) {
        let f = random_series(order, decay, seed, 0);
        let b = f.dilate(r).unwrap().bergman_norm();
        let h = f.hminus_half_boundary_norm(r).unwrap();
        prop_assert!((b * b - PI * h * h).abs() <= 1e-12 * b * b);
    }

    #[test]
    fn dilations_compose(order in 0usize..=20, seed: u64, r1 in 0.05f64..=1.0, r2 in 0.05f64..=1.0) {
        let f = random_series(order, 1.0, seed, 1);
        let a = f.dilate(r1).unwrap().dilate(r2).unwrap();
        let b = f.dilate(r1 * r2).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-14);
        }
    }

    #[test]
    fn analytic_projection_energy(band in 1usize..=16, seed: u64) {
        let u = random_scalar_field(1, band, seed, true);
        let (plus, minus) = analytic_projection(&u).unwrap();
        let lhs = plus.bergman_norm().powi(2) + minus.bergman_norm().powi(2);
        let rhs: f64 = u.iter().map(|(m, c)| {
            let n = m.as_slice()[0].unsigned_abs() as f64;
            PI * n / (n + 1.0) * c.norm_sqr()
        }).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        // Each half is dominated by the Ḣ^{1/2} energy of u.
        let half = sobolev_norm(&u, 0.5, true).unwrap();
        prop_assert!(lhs <= PI * half * half * (1.0 + 1e-12));
    }
}

#[test]
fn bergman_formula_matches_quadrature() {
    for id in 0..4 {
        let f = random_series(12, 1.0, 5, id);
        for r in [0.5, 0.9, 1.0] {
            let fr = f.dilate(r).unwrap();
            let q = bergman_quadrature(&fr, 400, 32);
            assert!(
                (q - fr.bergman_norm()).abs() <= 1e-6 * q,
                "{q} vs {}",
                fr.bergman_norm()
            );
        }
    }
}

#[test]
fn boundary_mixed_norm_respects_both_bounds() {
    for id in 0..6 {
        let f = random_series(16, [0.75, 1.0, 1.5][id as usize % 3], 8, id);
        for r in [0.9, 0.999] {
            let tol = 1e-8;
            let split = mixed_boundary_norm(&f, r, Tolerance::Absolute(tol)).unwrap();
            let trace = f.boundary_trace(r).unwrap();
            let l1 = l1_norm(&inverse_transform(&trace, 4 * trace.band()).unwrap());
            assert!(split.value <= l1 + tol);
            assert!(split.value <= f.hminus_half_boundary_norm(r).unwrap() + tol);
        }
    }
}

#[test]
fn constant_series_examples() {
    let one = PowerSeries::from_real(&[1.0]);
    assert_eq!(one.bergman_norm(), PI.sqrt());
    assert_eq!(one.hminus_half_boundary_norm(1.0).unwrap(), 1.0);
    let z = PowerSeries::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)]);
    assert!((z.evaluate(Complex64::new(0.5, 0.0)) - Complex64::new(0.0, 1.0)).norm() < 1e-16);
}
