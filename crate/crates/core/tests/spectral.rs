mod common;

use common::{model, squashed_sphere, uniform};
use proptest::prelude::*;
use warpspec::spectral::{
    assemble, first_eigen, first_eigen_with, lambda_c, rayleigh_quotient, scalar_inf, verify_eigen_mu,
    DerivativePath, Schedule, SolverOptions,
};
use warpspec::{Error, ProfileLabel, RadialProfile, SpectralParams, WarpedMetric};

fn schedule() -> Schedule {
    Schedule {
        n_nodes: vec![512, 1024, 2048],
        eps_fractions: vec![1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0],
    }
}

#[test]
fn model_constant_is_reproduced() {
    for (n, kappa, lambda) in [(3, 1.0, 6.0), (4, 1.0, 1.0), (6, 1.0, 1.0), (8, 1.0, 1.0), (5, 3.9, 20.0)] {
        let (g, p, _) = model(n, kappa, lambda);
        let sol = lambda_c(&g, &p, None, &schedule()).unwrap();
        let d = sol.diagnostics.as_ref().unwrap();
        assert!((d.extrapolated - lambda).abs() < 1e-3 * lambda, "n={n}: {}", d.extrapolated);
        let order = d.observed_order.unwrap();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
        assert!(d.sector_one > sol.eigenvalue);
        assert_eq!(sol.sign_changes, 0);
    }
}

#[test]
fn eigenvector_matches_closed_form() {
    let (g, p, c) = model(3, 1.0, 6.0);
    let d = assemble(&g, &p, None, 0, 2048, g.length() / 200.0).unwrap();
    let s = first_eigen(&d).unwrap();
    let exact: Vec<f64> = d.nodes.iter().map(|&t| (c.b * t).sin().powf(c.lambda_exp)).collect();
    let norm = |v: &[f64]| v.iter().zip(&d.mass).map(|(x, m)| x * x * m).sum::<f64>().sqrt();
    let scale = norm(&s.eigenvector) / norm(&exact);
    let diff: Vec<f64> = s.eigenvector.iter().zip(&exact).map(|(u, e)| u - scale * e).collect();
    assert!(norm(&diff) / norm(&s.eigenvector) < 1e-3);
    assert!(s.residual < 1e-10 * s.matrix_norm);
}

#[test]
fn eigenfunction_quotient_equals_target() {
    for (n, kappa, lambda) in [(3, 1.0, 6.0), (5, 2.0, 3.0)] {
        let (g, p, c) = model(n, kappa, lambda);
        let len = g.length();
        let grid = uniform(len * 1e-4, len * (1.0 - 1e-4), 20001);
        let lam = c.lambda_exp;
        let u = RadialProfile::from_jet(ProfileLabel::U, &grid, |t| {
            let (s, co) = (c.b * t).sin_cos();
            let v = s.powf(lam);
            [v, lam * c.b * co / s * v, 0.0]
        })
        .unwrap();
        let q = rayleigh_quotient(&g, &p, None, &u).unwrap();
        assert!((q - lambda).abs() < 1e-6 * lambda, "n={n}: {q}");
    }
}

#[test]
fn quotient_is_scale_invariant_and_minimal() {
    let (g, p, c) = model(3, 1.0, 6.0);
    let len = g.length();
    let grid = uniform(len * 1e-3, len * (1.0 - 1e-3), 4001);
    let lam = c.lambda_exp;
    let ground = |t: f64| (c.b * t).sin().powf(lam);
    let u = RadialProfile::new(ProfileLabel::U, grid.clone(), grid.iter().map(|&t| ground(t)).collect(), None, None)
        .unwrap();
    let u2 = RadialProfile::new(ProfileLabel::U, grid.clone(), u.values().iter().map(|v| 2.0 * v).collect(), None, None)
        .unwrap();
    let q = rayleigh_quotient(&g, &p, None, &u).unwrap();
    assert_eq!(q, rayleigh_quotient(&g, &p, None, &u2).unwrap());
    // antisymmetric about the midpoint, hence orthogonal to the symmetric ground state
    let bumped = RadialProfile::new(
        ProfileLabel::U,
        grid.clone(),
        grid.iter().map(|&t| ground(t) * (1.0 + 0.3 * (c.b * t).cos())).collect(),
        None,
        None,
    )
    .unwrap();
    assert!(rayleigh_quotient(&g, &p, None, &bumped).unwrap() > 6.0 + 1e-3);
}

#[test]
fn zero_trial_function_rejected() {
    let (g, p, _) = model(3, 1.0, 6.0);
    let grid = g.interior_grid(101);
    let z = RadialProfile::constant(ProfileLabel::U, &grid, 0.0).unwrap();
    assert!(matches!(rayleigh_quotient(&g, &p, None, &z), Err(Error::InvalidInput(_))));
}

#[test]
fn dirichlet_values_do_not_increase_with_domain() {
    let (g, p, _) = model(3, 1.0, 6.0);
    let len = g.length();
    // shared mesh width h = T/M so that each smaller domain is a principal subproblem
    let m = 2000usize;
    let h = len / m as f64;
    let mut last = f64::INFINITY;
    for k in [100usize, 50, 20, 10, 5] {
        let d = assemble(&g, &p, None, 0, m - 2 * k - 1, k as f64 * h).unwrap();
        let v = first_eigen(&d).unwrap().eigenvalue;
        assert!(v <= last + 1e-9, "eps = {k}h: {v} > {last}");
        last = v;
    }
}

#[test]
fn forced_non_convergence_is_reported() {
    let (g, p, _) = model(3, 1.0, 6.0);
    let d = assemble(&g, &p, None, 0, 256, g.length() / 50.0).unwrap();
    let opts = SolverOptions { max_iter: 0, ..SolverOptions::default() };
    assert!(matches!(first_eigen_with(&d, &opts), Err(Error::NonConvergence(_))));
}

#[test]
fn pointwise_mode_not_assembled() {
    let g = WarpedMetric::round(3).unwrap();
    let p = SpectralParams::new(0.0, 6.0).unwrap();
    assert!(matches!(assemble(&g, &p, None, 0, 64, 0.1), Err(Error::InvalidInput(_))));
    assert!(lambda_c(&g, &p, None, &schedule()).is_err());
}

#[test]
fn lemma_identity_on_models() {
    for n in 3..=6 {
        for kappa in [0.5, 1.0, 2.0] {
            let (g, _, _) = model(n, kappa, 6.0);
            let r = verify_eigen_mu(&g, kappa, &g.interior_grid(1001), DerivativePath::Analytic).unwrap();
            assert!(r < 1e-8, "n={n} kappa={kappa}: {r}");
        }
    }
}

#[test]
fn lemma_identity_second_order_on_custom_warp() {
    let g = squashed_sphere(20001);
    let len = g.length();
    let grid = uniform(0.1 * len, 0.9 * len, 401);
    let steps = [0.04, 0.02, 0.01];
    let r: Vec<f64> = steps
        .iter()
        .map(|&h| verify_eigen_mu(&g, 1.0, &grid, DerivativePath::FiniteDifference { step: h }).unwrap())
        .collect();
    for w in r.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.2, "{r:?}");
    }
}

#[test]
fn scalar_inf_values_and_scaling() {
    for n in 3..=8 {
        assert_eq!(scalar_inf(&WarpedMetric::round(n).unwrap()), (n * (n - 1)) as f64);
    }
    let (g, _, _) = model(3, 1.0, 6.0);
    assert!((scalar_inf(&g) - 192.0 / 35.0).abs() < 1e-10);
    for lambda in [0.5, 2.0, 3.0] {
        let s = scalar_inf(&g.homothety(lambda).unwrap());
        assert!((s - scalar_inf(&g) / (lambda * lambda)).abs() < 1e-12);
    }
}

#[test]
fn custom_warp_reproduces_model() {
    let (g, p, _) = model(3, 1.0, 6.0);
    let custom = WarpedMetric::custom(3, g.to_table(4097)).unwrap();
    let a = lambda_c(&g, &p, None, &schedule()).unwrap().diagnostics.unwrap().extrapolated;
    let b = lambda_c(&custom, &p, None, &schedule()).unwrap().diagnostics.unwrap().extrapolated;
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn shifted_problem_vanishes_on_model() {
    let (g, p, _) = model(4, 0.5, 12.0);
    let grid = uniform(0.0, g.length(), 2001);
    let mu = RadialProfile::constant(ProfileLabel::Mu, &grid, 12.0).unwrap();
    let d = lambda_c(&g, &p, Some(&mu), &schedule()).unwrap().diagnostics.unwrap();
    assert!(d.extrapolated.abs() < 1e-3);
}

#[test]
fn angular_enlargement_lowers_constant() {
    let (g, p, _) = model(3, 1.0, 6.0);
    let d = lambda_c(&g.scaled(1.05).unwrap(), &p, None, &schedule()).unwrap().diagnostics.unwrap();
    assert!(6.0 - d.extrapolated > 3.0 * d.error_bar);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_quotient_bounds_eigenvalue(seed in proptest::collection::vec(-1.0f64..1.0, 8), n in 3usize..=6, kappa in 0.2f64..3.8) {
        let (g, p, _) = model(n, kappa, 6.0);
        let d = assemble(&g, &p, None, 0, 128, g.length() / 40.0).unwrap();
        let e = first_eigen(&d).unwrap().eigenvalue;
        let u: Vec<f64> = d.nodes.iter().map(|&t| {
            seed.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * t / g.length()).sin()).sum::<f64>()
        }).collect();
        prop_assume!(u.iter().any(|v| v.abs() > 1e-6));
        prop_assert!(d.rayleigh(&u) >= e - 1e-9 * e.abs().max(1.0));
    }

    #[test]
    fn higher_sector_lies_above(n in 3usize..=8, kappa in 0.2f64..3.8, lambda in 1.0f64..60.0) {
        let (g, p, _) = model(n, kappa, lambda);
        let eps = g.length() / 60.0;
        let e0 = first_eigen(&assemble(&g, &p, None, 0, 200, eps).unwrap()).unwrap().eigenvalue;
        let e1 = first_eigen(&assemble(&g, &p, None, 1, 200, eps).unwrap()).unwrap().eigenvalue;
        prop_assert!(e1 > e0);
    }
}
