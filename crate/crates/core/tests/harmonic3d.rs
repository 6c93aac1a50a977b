mod common;

use common::{model, squashed_sphere};
use warpspec::closedform::mu_profile;
use warpspec::harmonic3d::{check_model_relations, check_model_relations_with_tol, harmonic_profile, Target};

const DERIVED: [&str; 3] = ["item4_gradient_root", "item5_eigen_equation", "item6_power_profile"];
const BASE: [&str; 3] = ["item1_f", "item2_spacetime_harmonic", "item3_mu_relation"];

#[test]
fn model_relation_suite() {
    for kappa in [0.5, 1.0, 2.0] {
        let (g, _, _) = model(3, kappa, 6.0);
        let r = check_model_relations(&g, kappa, Target::Constant(6.0), &g.interior_grid(1001)).unwrap();
        assert_eq!(r.checks.len(), 10);
        for c in &r.checks {
            assert!(c.pass && c.residual < 1e-8, "kappa={kappa}: {c:?}");
        }
        assert!(!r.item3_verbatim.pass && r.item3_verbatim.residual > 0.1);
    }
}

#[test]
fn verbatim_item3_is_singular_at_three() {
    let (g, _, _) = model(3, 3.0, 6.0);
    let r = check_model_relations(&g, 3.0, Target::Constant(6.0), &g.interior_grid(101)).unwrap();
    assert!(r.all_pass());
    assert_eq!(r.item3_verbatim.residual, 1.0);
}

#[test]
fn later_items_follow_from_first_three() {
    for kappa in [0.3, 1.0, 2.5, 3.5] {
        let (g, _, _) = model(3, kappa, 2.0);
        let grid = g.interior_grid(501);
        let probe = check_model_relations(&g, kappa, Target::Constant(2.0), &grid).unwrap();
        let tau = BASE.iter().map(|n| probe.get(n).unwrap().residual).fold(1e-15, f64::max);
        let r = check_model_relations_with_tol(&g, kappa, Target::Constant(2.0), &grid, 100.0 * tau).unwrap();
        for n in DERIVED {
            assert!(r.get(n).unwrap().pass, "kappa={kappa} {n}");
        }
    }
}

#[test]
fn relations_hold_with_sampled_mu_on_custom_warp() {
    let g = squashed_sphere(20001);
    let grid = g.interior_grid(401);
    let mu = mu_profile(&g, 1.0, &grid).unwrap();
    let r = check_model_relations_with_tol(&g, 1.0, Target::Profile(&mu.profile), &grid, 1e-6).unwrap();
    assert!(r.all_pass(), "{:?}", r.checks);
}

#[test]
fn midpoint_quantities_vanish() {
    let (g, _, _) = model(3, 1.0, 6.0);
    let mid = g.length() / 2.0;
    let hp = harmonic_profile(&g, 1.0, &[mid]).unwrap();
    assert!(hp.hess[0].abs() < 1e-14);
    assert!(g.mean_curvature(mid).abs() < 1e-14);
}

#[test]
fn gradient_is_power_of_warp() {
    for kappa in [0.5, 1.0, 2.0, 3.0] {
        let (g, _, _) = model(3, kappa, 6.0);
        let grid = g.interior_grid(999);
        let hp = harmonic_profile(&g, kappa, &grid).unwrap();
        // least-squares slope of log u' against log φ
        let pts: Vec<(f64, f64)> = grid.iter().zip(&hp.grad).map(|(&t, d)| (g.phi(t).ln(), d.ln())).collect();
        let m = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
        let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx).powi(2), b + (x - mx) * (y - my)));
        assert!((sxy / sxx - 4.0 / (4.0 - kappa)).abs() < 1e-6);
        for (&t, d) in grid.iter().zip(&hp.grad) {
            assert!((d - hp.amplitude * g.phi(t).powf(hp.exponent)).abs() < 1e-10 * d.max(1.0));
        }
    }
}

#[test]
fn mean_curvature_chain() {
    for kappa in [0.5, 1.0, 2.0] {
        let (g, _, _) = model(3, kappa, 6.0);
        let grid = g.interior_grid(301);
        let xi = warpspec::closedform::xi_profile(&g, kappa, &grid).unwrap();
        for (&t, f) in grid.iter().zip(xi.values()) {
            let h = 2.0 * g.log_slope(t);
            assert!(((3.0 * kappa - 12.0) / (6.0 - kappa) * f - h).abs() < 1e-10 * h.abs().max(1.0));
        }
    }
}

#[test]
fn profile_normalization_and_symmetry() {
    let (g, _, c) = model(3, 1.0, 6.0);
    let grid = g.interior_grid(4001);
    let hp = harmonic_profile(&g, 1.0, &grid).unwrap();
    let m = grid.len();
    assert!(hp.u[0] > -1.0 && hp.u[0] < -0.999);
    assert!(hp.u[m - 1] < 1.0 && hp.u[m - 1] > 0.999);
    for i in 0..m {
        assert!((hp.u[i] + hp.u[m - 1 - i]).abs() < 1e-9);
    }
    assert!(hp.grad.iter().all(|&d| d > 0.0));
    let q = std::f64::consts::PI / (4.0 * c.b);
    let pair = harmonic_profile(&g, 1.0, &[q, 2.0 * q]).unwrap();
    assert!((pair.grad[1] / pair.grad[0] - 1.587401).abs() < 1e-6);
}
