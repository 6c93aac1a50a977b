//! Closed-form constants of the model family `φ(t) = a sin(bt)` and the
//! ODE/algebraic identities that certify them.
//!
//! Constants are evaluated in double-double arithmetic and rounded once, so
//! two algebraically equal routes agree to the last bit or two and residuals
//! of the defining relations sit far below `1e-12`.
//!
//! Sign conventions for the auxiliary function `f`:
//! * [`f_cot`] and [`f_warp`] use `f = [(4n-(n-1)κ)/(n(4-κ))] φ'/φ`, positive
//!   near `t = 0`. On the model this is `(2a₁/n) cot(bt)`.
//! * [`xi_profile`] (and the 3-dimensional relations in `harmonic3d`) use
//!   `ξ = -[2(6-κ)/(3(4-κ))] φ'/φ`, negative near `t = 0`.
//!
//! At `n = 3` the two differ by the factor `-1` only.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{invalid, Result};
use crate::geometry::WarpedMetric;
use crate::profile::{check_grid, ProfileLabel, RadialProfile};
use crate::residual::max_balance;

/// Coupling `κ = 1/c` and spectral target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    kappa: f64,
    lambda: f64,
}

impl SpectralParams {
    /// `0 <= kappa < 4`, `lambda > 0`. With `kappa == 0`, `lambda` is the
    /// rescaled target `Λ̃` of the pointwise mode.
    pub fn new(kappa: f64, lambda: f64) -> Result<Self> {
        if !kappa.is_finite() || !(0.0..4.0).contains(&kappa) {
            return invalid(format!("kappa must lie in [0, 4), got {kappa}"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("lambda must be positive and finite, got {lambda}"));
        }
        Ok(SpectralParams { kappa, lambda })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `c = 1/κ`, absent in the pointwise mode.
    pub fn coupling(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| 1.0 / self.kappa)
    }

    /// `Λ̃ = κΛ`, or `Λ` itself when `κ = 0`.
    pub fn scaled_target(&self) -> f64 {
        if self.kappa > 0.0 {
            self.kappa * self.lambda
        } else {
            self.lambda
        }
    }

    /// Exponent `λ = 2/(4-κ)` of the model ground state `sin^λ(bt)`.
    pub fn eigen_exponent(&self) -> f64 {
        2.0 / (4.0 - self.kappa)
    }

    fn scaled_target_dd(&self) -> TwoFloat {
        if self.kappa > 0.0 {
            TwoFloat::from(self.kappa) * self.lambda
        } else {
            TwoFloat::from(self.lambda)
        }
    }
}

/// Constants of the model metric `dt² + a² sin²(bt) g_{S^{n-1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub beta2: f64,
    /// Ground-state exponent `λ = 2/(4-κ)`.
    pub lambda_exp: f64,
    /// Auxiliary constant of the 3-dimensional construction; `n = 3` only.
    pub alpha: Option<f64>,
}

impl ModelConstants {
    /// Length `π/b` of the model interval.
    pub fn length(&self) -> f64 {
        std::f64::consts::PI / self.b
    }
}

struct ConstantsDd {
    a: TwoFloat,
    b: TwoFloat,
    a1: TwoFloat,
    beta2: TwoFloat,
    lambda_exp: TwoFloat,
    alpha: Option<TwoFloat>,
}

impl ConstantsDd {
    fn round(&self, dim: usize) -> ModelConstants {
        ModelConstants {
            dim,
            a: self.a.into(),
            b: self.b.into(),
            a1: self.a1.into(),
            beta2: self.beta2.into(),
            lambda_exp: self.lambda_exp.into(),
            alpha: self.alpha.map(Into::into),
        }
    }
}

// `TwoFloat / TwoFloat` in twofloat 0.8 is only accurate to about one ulp of
// f64; two correction steps restore full double-double accuracy.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 3 {
        return invalid(format!("dimension must be at least 3, got {dim}"));
    }
    Ok(())
}

// Every formula is written with Λ̃ = κΛ so that κ = 0 is a regular point.
fn constants_nd_dd(dim: usize, params: &SpectralParams) -> ConstantsDd {
    let n = TwoFloat::from(dim as f64);
    let one = TwoFloat::from(1.0);
    let two = TwoFloat::from(2.0);
    let four = TwoFloat::from(4.0);
    let k = TwoFloat::from(params.kappa);
    let lt = params.scaled_target_dd();
    let p_n = four * n - (n - one) * k; // 4n - (n-1)κ
    let p_n1 = four * (n - one) - (n - two) * k; // 4(n-1) - (n-2)κ
    let p_n2 = four * (n - two) - (n - TwoFloat::from(3.0)) * k; // 4(n-2) - (n-3)κ
    let four_minus_k = four - k;
    let a2 = dd_div((n - one) * (n - two) * p_n, lt * p_n2);
    let b2 = dd_div(lt * four_minus_k * four_minus_k, p_n * p_n1);
    let a1_2 = dd_div(lt * p_n, four * p_n1);
    let beta2 = dd_div(n * p_n1, (n - one) * p_n);
    let alpha = (dim == 3).then(|| {
        let six = TwoFloat::from(6.0);
        let eight = TwoFloat::from(8.0);
        dd_div(lt * (six - k), two * (eight - k)).sqrt()
    });
    ConstantsDd {
        a: a2.sqrt(),
        b: b2.sqrt(),
        a1: a1_2.sqrt(),
        beta2,
        lambda_exp: dd_div(two, four_minus_k),
        alpha,
    }
}

/// Model constants for dimension `n ≥ 3`.
pub fn constants_nd(dim: usize, params: &SpectralParams) -> Result<ModelConstants> {
    check_dim(dim)?;
    let n = dim as f64;
    // 4(n-2) - (n-3)κ > 4(n-2) - 4(n-3) = 4 for κ < 4
    debug_assert!(4.0 * (n - 2.0) - (n - 3.0) * params.kappa > 0.0);
    Ok(constants_nd_dd(dim, params).round(dim))
}

/// The 3-dimensional constants evaluated literally in terms of `c = 1/κ`.
/// Requires `κ > 0`.
pub fn constants_3d(params: &SpectralParams) -> Result<ModelConstants> {
    if params.kappa <= 0.0 {
        return invalid("the 3-dimensional constants need c = 1/kappa, so kappa > 0");
    }
    let one = TwoFloat::from(1.0);
    let two = TwoFloat::from(2.0);
    let four = TwoFloat::from(4.0);
    let six = TwoFloat::from(6.0);
    let eight = TwoFloat::from(8.0);
    let k = TwoFloat::from(params.kappa);
    let c = dd_div(one, k);
    let lam = TwoFloat::from(params.lambda);
    let alpha = dd_div(lam * (six - k), two * c * (eight - k)).sqrt();
    let a = dd_div(six * c - one, lam).sqrt();
    let b = dd_div(lam.sqrt() * (four - k), (two * c * (six - k) * (eight - k)).sqrt());
    // a₁ and β₂ from their general-n expressions at n = 3
    let a1 = TwoFloat::from(0.5) * dd_div(lam * (TwoFloat::from(12.0) - two * k), eight * c - one).sqrt();
    let beta2 = TwoFloat::from(1.5) * dd_div(eight - k, TwoFloat::from(12.0) - two * k);
    Ok(ConstantsDd {
        a,
        b,
        a1,
        beta2,
        lambda_exp: dd_div(two, four - k),
        alpha: Some(alpha),
    }
    .round(3))
}

/// Absolute residuals of the defining relations, evaluated in double-double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormResiduals {
    /// `β₂a₁² - β₂a₁b - n(n-2)/(4a²)`.
    pub beta2_relation: f64,
    /// `κ(λ+n-1)λb² + n(n-1)b² - κΛ`.
    pub eigen_balance: f64,
    /// `-κ(λ+n-2)λb² + (n-1)(n-2)(a⁻² - b²)`.
    pub singular_balance: f64,
}

impl ClosedFormResiduals {
    pub fn max(&self) -> f64 {
        self.beta2_relation.max(self.eigen_balance).max(self.singular_balance)
    }
}

pub fn residuals(dim: usize, params: &SpectralParams) -> Result<ClosedFormResiduals> {
    check_dim(dim)?;
    let c = constants_nd_dd(dim, params);
    let n = TwoFloat::from(dim as f64);
    let one = TwoFloat::from(1.0);
    let two = TwoFloat::from(2.0);
    let k = TwoFloat::from(params.kappa);
    let lam = c.lambda_exp;
    let b2 = c.b * c.b;
    let a2 = c.a * c.a;
    let r0 = c.beta2 * c.a1 * c.a1 - c.beta2 * c.a1 * c.b - dd_div(n * (n - two), TwoFloat::from(4.0) * a2);
    let r1 = k * (lam + n - one) * lam * b2 + n * (n - one) * b2 - params.scaled_target_dd();
    let r2 = -(k * (lam + n - two) * lam * b2) + (n - one) * (n - two) * (dd_div(one, a2) - b2);
    Ok(ClosedFormResiduals {
        beta2_relation: f64::from(r0).abs(),
        eigen_balance: f64::from(r1).abs(),
        singular_balance: f64::from(r2).abs(),
    })
}

/// Parameter lattice on which the closed-form invariants are checked.
pub fn invariant_lattice() -> Vec<(usize, SpectralParams)> {
    let mut out = Vec::new();
    for dim in 3..=8 {
        for kappa in [0.1, 0.5, 1.0, 2.0, 3.0, 3.9] {
            for lambda in [0.5, 1.0, 6.0, (dim * (dim - 1)) as f64] {
                out.push((dim, SpectralParams { kappa, lambda }));
            }
        }
    }
    out
}

/// `f(t) = (2a₁/n) cot(bt)` for `t ∈ (0, π/b)`.
pub fn f_cot(t: f64, consts: &ModelConstants) -> f64 {
    let (s, c) = (consts.b * t).sin_cos();
    2.0 * consts.a1 / consts.dim as f64 * c / s
}

fn f_cot_slope(t: f64, consts: &ModelConstants) -> f64 {
    let s = (consts.b * t).sin();
    -2.0 * consts.a1 * consts.b / (consts.dim as f64 * s * s)
}

fn check_model_grid(consts: &ModelConstants, grid: &[f64]) -> Result<()> {
    check_grid(grid)?;
    let len = consts.length();
    if grid.iter().any(|&t| !(t > 0.0 && t < len)) {
        return invalid(format!("grid must lie inside (0, {len})"));
    }
    Ok(())
}

/// Largest relative residual over `grid` of
/// `κΛ/4 + [n(n-1)/4]β₂f² + [(n-1)/2]β₂f' - [(n-2)(n-1)/4] / (a² sin²(bt)) = 0`
/// for `f = f_cot`.
pub fn check_f_ode(consts: &ModelConstants, params: &SpectralParams, grid: &[f64]) -> Result<f64> {
    check_model_grid(consts, grid)?;
    let n = consts.dim as f64;
    let lt = params.scaled_target();
    Ok(max_balance(grid.iter().map(|&t| {
        let f = f_cot(t, consts);
        let s = (consts.b * t).sin();
        [
            lt / 4.0,
            n * (n - 1.0) / 4.0 * consts.beta2 * f * f,
            (n - 1.0) / 2.0 * consts.beta2 * f_cot_slope(t, consts),
            -(n - 2.0) * (n - 1.0) / (4.0 * consts.a * consts.a * s * s),
        ]
    })))
}

/// `β₂ = [n/(n-1)] [4(n-1)-(n-2)κ] / [4n-(n-1)κ]`.
pub fn beta2(dim: usize, kappa: f64) -> f64 {
    let n = dim as f64;
    n / (n - 1.0) * (4.0 * (n - 1.0) - (n - 2.0) * kappa) / (4.0 * n - (n - 1.0) * kappa)
}

/// Coefficient of `φ'/φ` in [`f_warp`].
pub fn f_warp_coefficient(dim: usize, kappa: f64) -> f64 {
    let n = dim as f64;
    (4.0 * n - (n - 1.0) * kappa) / (n * (4.0 - kappa))
}

fn check_kappa(kappa: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..4.0).contains(&kappa)
    } else {
        kappa > 0.0 && kappa < 4.0
    };
    if !ok {
        let range = if allow_zero { "[0, 4)" } else { "(0, 4)" };
        return invalid(format!("kappa must lie in {range}, got {kappa}"));
    }
    Ok(())
}

fn check_metric_grid(metric: &WarpedMetric, grid: &[f64]) -> Result<()> {
    check_grid(grid)?;
    grid.iter().try_for_each(|&t| metric.check_interior(t))
}

/// `f = [(4n-(n-1)κ)/(n(4-κ))] φ'/φ` with its first derivative.
pub fn f_warp(metric: &WarpedMetric, kappa: f64, grid: &[f64]) -> Result<RadialProfile> {
    check_kappa(kappa, true)?;
    check_metric_grid(metric, grid)?;
    let coef = f_warp_coefficient(metric.dim(), kappa);
    RadialProfile::new(
        ProfileLabel::F,
        grid.to_vec(),
        grid.iter().map(|&t| coef * metric.log_slope(t)).collect(),
        Some(grid.iter().map(|&t| coef * metric.log_curvature(t)).collect()),
        None,
    )
}

/// `μ` samples together with the first point where `(log φ)'' < 0` fails, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuProfile {
    pub profile: RadialProfile,
    pub log_concavity_violation: Option<f64>,
}

/// Solves `κμ/4 + [n(n-1)/4]β₂f² + [(n-1)/2]β₂f' - [(n-2)(n-1)/4]φ⁻² = 0` for `μ`.
pub fn mu_profile(metric: &WarpedMetric, kappa: f64, grid: &[f64]) -> Result<MuProfile> {
    check_kappa(kappa, false)?;
    let f = f_warp(metric, kappa, grid)?;
    let n = metric.dim() as f64;
    let b2 = beta2(metric.dim(), kappa);
    let df = f.first_derivative().expect("f_warp provides a slope");
    let values = grid
        .iter()
        .zip(f.values().iter().zip(df))
        .map(|(&t, (&fv, &dfv))| {
            let phi = metric.phi(t);
            4.0 / kappa
                * (-(n * (n - 1.0) / 4.0) * b2 * fv * fv - (n - 1.0) / 2.0 * b2 * dfv
                    + (n - 2.0) * (n - 1.0) / (4.0 * phi * phi))
        })
        .collect();
    let log_concavity_violation = grid.iter().copied().find(|&t| metric.log_curvature(t) >= 0.0);
    Ok(MuProfile {
        profile: RadialProfile::new(ProfileLabel::Mu, grid.to_vec(), values, None, None)?,
        log_concavity_violation,
    })
}

fn check_three(metric: &WarpedMetric) -> Result<()> {
    if metric.dim() != 3 {
        return invalid(format!("this construction is 3-dimensional, got n = {}", metric.dim()));
    }
    Ok(())
}

/// Coefficient of `φ'/φ` in `ξ`: `2(6-κ)/(3(κ-4))`.
pub fn xi_coefficient(kappa: f64) -> f64 {
    2.0 * (6.0 - kappa) / (3.0 * (kappa - 4.0))
}

/// `ξ = [2(6-κ)/(3(κ-4))] φ'/φ` with its first derivative (`n = 3`).
pub fn xi_profile(metric: &WarpedMetric, kappa: f64, grid: &[f64]) -> Result<RadialProfile> {
    check_three(metric)?;
    check_kappa(kappa, true)?;
    check_metric_grid(metric, grid)?;
    let coef = xi_coefficient(kappa);
    RadialProfile::new(
        ProfileLabel::Xi,
        grid.to_vec(),
        grid.iter().map(|&t| coef * metric.log_slope(t)).collect(),
        Some(grid.iter().map(|&t| coef * metric.log_curvature(t)).collect()),
        None,
    )
}

/// Largest relative residual of `1 + (9/4α²)ξ² - (3/2α²)ξ' = 2cΛ⁻¹φ⁻²`.
pub fn check_xi_ode(metric: &WarpedMetric, params: &SpectralParams, grid: &[f64]) -> Result<f64> {
    let xi = xi_profile(metric, params.kappa, grid)?;
    let alpha = constants_nd(3, params)?.alpha.expect("n = 3 has alpha");
    let a2 = alpha * alpha;
    let lt = params.scaled_target();
    let dxi = xi.first_derivative().expect("xi has a slope");
    Ok(max_balance(grid.iter().enumerate().map(|(i, &t)| {
        let x = xi.values()[i];
        let phi = metric.phi(t);
        [1.0, 9.0 / (4.0 * a2) * x * x, -1.5 / a2 * dxi[i], -2.0 / (lt * phi * phi)]
    })))
}

/// Pointwise relative residual of the f-ODE at a single point, exposed for
/// term-by-term inspection.
pub fn f_ode_terms(t: f64, consts: &ModelConstants, params: &SpectralParams) -> [f64; 4] {
    let n = consts.dim as f64;
    let f = f_cot(t, consts);
    let s = (consts.b * t).sin();
    [
        params.scaled_target() / 4.0,
        n * (n - 1.0) / 4.0 * consts.beta2 * f * f,
        (n - 1.0) / 2.0 * consts.beta2 * f_cot_slope(t, consts),
        -(n - 2.0) * (n - 1.0) / (4.0 * consts.a * consts.a * s * s),
    ]
}
