mod common;

use common::model;
use proptest::prelude::*;
use warpspec::closedform::{
    beta2, constants_3d, constants_nd, f_cot, f_warp, invariant_lattice, mu_profile, residuals, xi_profile,
};
use warpspec::SpectralParams;

#[test]
fn lattice_residuals_below_threshold() {
    let start = std::time::Instant::now();
    for (n, p) in invariant_lattice() {
        let r = residuals(n, &p).unwrap();
        assert!(r.max() < 1e-12, "n={n} {p:?}: {r:?}");
        if n == 3 {
            let a = constants_nd(3, &p).unwrap();
            let b = constants_3d(&p).unwrap();
            for (x, y) in [(a.a, b.a), (a.b, b.b), (a.a1, b.a1), (a.beta2, b.beta2), (a.lambda_exp, b.lambda_exp)] {
                assert!((x - y).abs() < 1e-14, "{p:?}: {x} vs {y}");
            }
            assert!((a.alpha.unwrap() - b.alpha.unwrap()).abs() < 1e-14);
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn lattice_covers_all_combinations() {
    assert_eq!(invariant_lattice().len(), 6 * 6 * 4);
}

#[test]
fn round_limit_has_unit_constants() {
    for n in 3..=8 {
        let c = constants_nd(n, &SpectralParams::new(0.0, (n * (n - 1)) as f64).unwrap()).unwrap();
        assert!((c.a - 1.0).abs() < 1e-15 && (c.b - 1.0).abs() < 1e-15, "n={n}");
    }
}

#[test]
fn kappa_domain_boundaries() {
    assert!(SpectralParams::new(3.9, 1.0).is_ok());
    assert!(SpectralParams::new(4.0, 1.0).is_err());
    assert!(SpectralParams::new(-0.1, 1.0).is_err());
    assert!(SpectralParams::new(1.0, 0.0).is_err());
    assert!(SpectralParams::new(1.0, f64::NAN).is_err());
}

#[test]
fn f_from_warp_matches_cotangent_form() {
    for n in 3..=8 {
        for kappa in [0.1, 1.0, 3.9] {
            let (g, _, c) = model(n, kappa, 6.0);
            let grid = g.interior_grid(199);
            let f = f_warp(&g, kappa, &grid).unwrap();
            for (&t, v) in grid.iter().zip(f.values()) {
                let exact = f_cot(t, &c);
                assert!((v - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n} t={t}");
            }
        }
    }
}

#[test]
fn mu_is_constant_target_on_model() {
    for n in 3..=8 {
        for kappa in [0.5, 1.0, 2.0, 3.9] {
            let lambda = (n * (n - 1)) as f64 / 2.0;
            let (g, _, _) = model(n, kappa, lambda);
            let mu = mu_profile(&g, kappa, &g.interior_grid(401)).unwrap();
            assert!(mu.log_concavity_violation.is_none());
            for v in mu.profile.values() {
                assert!((v - lambda).abs() < 1e-8 * lambda, "n={n} kappa={kappa}: {v}");
            }
        }
    }
}

#[test]
fn mu_is_symmetric_for_symmetric_warp() {
    let g = common::squashed_sphere(4001);
    let grid = g.interior_grid(301);
    let mu = mu_profile(&g, 1.0, &grid).unwrap();
    let v = mu.profile.values();
    for i in 0..v.len() {
        assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-6 * v[i].abs().max(1.0), "{i}");
    }
}

#[test]
fn xi_matches_relation_one() {
    for kappa in [0.0, 0.5, 1.0, 2.0, 3.0, 3.9] {
        let (g, _, _) = model(3, kappa, 6.0);
        let grid = g.interior_grid(157);
        let xi = xi_profile(&g, kappa, &grid).unwrap();
        for (&t, v) in grid.iter().zip(xi.values()) {
            let f = -2.0 * (6.0 - kappa) / (3.0 * (4.0 - kappa)) * g.log_slope(t);
            assert!((v - f).abs() <= 1e-12 * f.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn constants_positive_and_consistent(n in 3usize..=10, kappa in 0.0f64..3.99, lambda in 0.05f64..100.0) {
        let p = SpectralParams::new(kappa, lambda).unwrap();
        let c = constants_nd(n, &p).unwrap();
        prop_assert!(c.a > 0.0 && c.b > 0.0 && c.a1 > 0.0 && c.beta2 > 0.0);
        prop_assert!((c.beta2 - beta2(n, kappa)).abs() < 1e-14 * c.beta2);
        prop_assert!((c.lambda_exp - 2.0 / (4.0 - kappa)).abs() < 1e-15);
        prop_assert!(residuals(n, &p).unwrap().max() < 1e-12 * lambda.max(1.0) * (n * n) as f64);
    }

    #[test]
    fn target_rescales_lengths(n in 3usize..=8, kappa in 0.05f64..3.95, lambda in 0.1f64..50.0, s in 0.1f64..10.0) {
        // Λ ↦ sΛ is the homothety g ↦ g/s: a ↦ a/√s, b ↦ √s b
        let c = constants_nd(n, &SpectralParams::new(kappa, lambda).unwrap()).unwrap();
        let d = constants_nd(n, &SpectralParams::new(kappa, s * lambda).unwrap()).unwrap();
        prop_assert!((d.a * s.sqrt() - c.a).abs() < 1e-13 * c.a);
        prop_assert!((d.b / s.sqrt() - c.b).abs() < 1e-13 * c.b);
        prop_assert!((d.beta2 - c.beta2).abs() < 1e-15 * c.beta2);
    }
}
