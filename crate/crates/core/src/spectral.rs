//! First eigenvalue of `-Δ + cR - μ` restricted to radial functions (and to
//! angular sectors `ℓ ≥ 1` for the ordering check).
//!
//! The problem is posed on `[ε, T-ε]` with Dirichlet ends and discretized by
//! second-order finite differences in flux form,
//!
//! ```text
//! -(φ^{n-1} u')' + (cR - μ + ℓ(ℓ+n-2)/φ²) φ^{n-1} u = Λ φ^{n-1} u,
//! ```
//!
//! which yields a symmetric tridiagonal pencil with a lumped (diagonal) mass.
//! `Λ_c` is then estimated by Richardson extrapolation in the mesh width at
//! each truncation and an observed-order extrapolation in `ε`.

use serde::{Deserialize, Serialize};

use crate::closedform::{mu_profile, SpectralParams};
use crate::error::{invalid, Error, Result};
use crate::extrapolate::{extrapolate_fixed_order, extrapolate_observed_order};
use crate::geometry::{Warp, WarpedMetric};
use crate::pencil::Pencil;
use crate::profile::{check_grid, RadialProfile};

/// Symmetric tridiagonal pencil for one sector on one truncated grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub dim: usize,
    pub ell: usize,
    pub eps: f64,
    pub h: f64,
    /// Interior nodes `ε + i h`, `i = 1..=N`.
    pub nodes: Vec<f64>,
    /// Lumped mass `φ^{n-1}` at the nodes.
    pub mass: Vec<f64>,
    /// `φ^{n-1}` at the `N + 1` cell midpoints.
    pub flux: Vec<f64>,
    /// `(cR - μ + ℓ(ℓ+n-2)/φ²) φ^{n-1}` at the nodes.
    pub potential: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn pencil(&self) -> Pencil<'_> {
        Pencil {
            diag: &self.diag,
            off: &self.off,
            mass: &self.mass,
        }
    }

    /// Discrete Rayleigh quotient `uᵀAu / uᵀMu` of a nodal vector.
    pub fn rayleigh(&self, u: &[f64]) -> f64 {
        self.pencil().rayleigh(u)
    }

    /// Number of pencil eigenvalues below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.pencil().count_below(sigma)
    }
}

/// Smallest admissible number of interior nodes.
pub const MIN_NODES: usize = 16;

pub fn assemble(
    metric: &WarpedMetric,
    params: &SpectralParams,
    mu: Option<&RadialProfile>,
    ell: usize,
    n_nodes: usize,
    eps: f64,
) -> Result<Discretization> {
    let c = params
        .coupling()
        .ok_or_else(|| Error::InvalidInput("kappa = 0 is the pointwise mode; use scalar_inf".into()))?;
    let len = metric.length();
    if !(eps > 0.0 && eps < len / 4.0) {
        return invalid(format!("truncation eps = {eps} must lie in (0, T/4) with T = {len}"));
    }
    if n_nodes < MIN_NODES {
        return invalid(format!("need at least {MIN_NODES} interior nodes, got {n_nodes}"));
    }
    let n = metric.dim() as f64;
    let h = (len - 2.0 * eps) / (n_nodes as f64 + 1.0);
    let nodes: Vec<f64> = (1..=n_nodes).map(|i| eps + i as f64 * h).collect();
    let mids: Vec<f64> = (0..=n_nodes).map(|i| eps + (i as f64 + 0.5) * h).collect();
    for &t in nodes.iter().chain(&mids) {
        metric.check_interior(t)?;
    }
    let shift = match mu {
        Some(profile) => profile.interpolate(&nodes)?,
        None => vec![0.0; n_nodes],
    };
    let angular = (ell * (ell + metric.dim() - 2)) as f64;
    let mut mass = Vec::with_capacity(n_nodes);
    let mut potential = Vec::with_capacity(n_nodes);
    for (i, &t) in nodes.iter().enumerate() {
        let phi = metric.phi(t);
        let m = phi.powf(n - 1.0);
        let v = (c * metric.scalar_curvature(t) - shift[i] + angular / (phi * phi)) * m;
        if !v.is_finite() || !m.is_finite() || m <= 0.0 {
            return invalid(format!("non-finite potential at t = {t}; eps is too small for sector {ell}"));
        }
        mass.push(m);
        potential.push(v);
    }
    let flux: Vec<f64> = mids.iter().map(|&t| metric.phi(t).powf(n - 1.0)).collect();
    let h2 = h * h;
    let diag: Vec<f64> = (0..n_nodes).map(|i| (flux[i] + flux[i + 1]) / h2 + potential[i]).collect();
    let off: Vec<f64> = (1..n_nodes).map(|i| -flux[i] / h2).collect();
    Ok(Discretization {
        dim: metric.dim(),
        ell,
        eps,
        h,
        nodes,
        mass,
        flux,
        potential,
        diag,
        off,
    })
}

/// Tolerances of the pencil eigensolver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative width of the final bisection bracket.
    pub bisection_tol: f64,
    /// Inverse iteration stops at `‖Au - λMu‖ ≤ residual_tol·‖A‖`.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            bisection_tol: 1e-12,
            residual_tol: 1e-10,
            max_iter: 50,
        }
    }
}

/// Per-truncation results of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub eps: f64,
    /// Eigenvalue for each entry of the node schedule.
    pub values: Vec<f64>,
    pub observed_order: Option<f64>,
    /// Order-2 Richardson value from the two finest grids.
    pub extrapolated: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n_nodes: Vec<usize>,
    pub eps: Vec<f64>,
    pub levels: Vec<LevelResult>,
    /// Median over truncation levels of the observed mesh order.
    pub observed_order: Option<f64>,
    /// Observed order of the `ε → 0` bias.
    pub eps_order: Option<f64>,
    pub extrapolated: f64,
    pub error_bar: f64,
    /// First eigenvalue of the `ℓ = 1` sector on the finest grid.
    pub sector_one: f64,
    pub sector_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub eigenvalue: f64,
    pub nodes: Vec<f64>,
    /// Normalized so that `h Σ u² φ^{n-1} = 1`, positive.
    pub eigenvector: Vec<f64>,
    /// `‖Au - λMu‖` for the unit-norm eigenvector.
    pub residual: f64,
    /// `‖A‖_∞` of the pencil.
    pub matrix_norm: f64,
    /// Interior sign changes of the eigenvector (zero for a ground state).
    pub sign_changes: usize,
    pub iterations: usize,
    pub diagnostics: Option<Diagnostics>,
}

pub fn first_eigen(disc: &Discretization) -> Result<EigenSolution> {
    first_eigen_with(disc, &SolverOptions::default())
}

pub fn first_eigen_with(disc: &Discretization, opts: &SolverOptions) -> Result<EigenSolution> {
    let pair = disc.pencil().smallest(opts.bisection_tol, opts.residual_tol, opts.max_iter)?;
    let norm: f64 = pair
        .vector
        .iter()
        .zip(&disc.mass)
        .map(|(u, m)| u * u * m)
        .sum::<f64>()
        * disc.h;
    let scale = 1.0 / norm.sqrt();
    let eigenvector: Vec<f64> = pair.vector.iter().map(|u| u * scale).collect();
    Ok(EigenSolution {
        eigenvalue: pair.value,
        nodes: disc.nodes.clone(),
        sign_changes: sign_changes(&eigenvector),
        eigenvector,
        residual: pair.residual,
        matrix_norm: pair.matrix_norm,
        iterations: pair.iterations,
        diagnostics: None,
    })
}

fn sign_changes(u: &[f64]) -> usize {
    let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * peak;
    let signs: Vec<bool> = u.iter().filter(|v| v.abs() > floor).map(|&v| v > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Grid levels for [`lambda_c`]: node counts (increasing) and truncations
/// `ε = fraction·T` (decreasing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n_nodes: Vec<usize>,
    pub eps_fractions: Vec<f64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            n_nodes: vec![512, 1024, 2048],
            eps_fractions: vec![1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0],
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes.len() < 3 {
            return invalid("schedule needs at least 3 grid levels");
        }
        if self.n_nodes.windows(2).any(|w| w[1] <= w[0]) || self.n_nodes[0] < MIN_NODES {
            return invalid(format!("node counts must increase strictly and start at >= {MIN_NODES}"));
        }
        if self.eps_fractions.is_empty()
            || self.eps_fractions.iter().any(|&e| !(e > 0.0 && e < 0.25))
            || self.eps_fractions.windows(2).any(|w| w[1] >= w[0])
        {
            return invalid("eps fractions must lie in (0, 1/4) and decrease strictly");
        }
        Ok(())
    }
}

/// Radial first eigenvalue of `-Δ + cR - μ` extrapolated over `schedule`.
///
/// The returned solution holds the finest-grid eigenpair; its
/// `diagnostics.extrapolated` is the `Λ_c` estimate with `error_bar`. The
/// finest-grid eigenvalue is a Dirichlet eigenvalue of a subdomain and hence
/// bounds `Λ_c` from above up to the `O(h²)` mesh error.
pub fn lambda_c(
    metric: &WarpedMetric,
    params: &SpectralParams,
    mu: Option<&RadialProfile>,
    schedule: &Schedule,
) -> Result<EigenSolution> {
    lambda_c_with(metric, params, mu, schedule, &SolverOptions::default())
}

pub fn lambda_c_with(
    metric: &WarpedMetric,
    params: &SpectralParams,
    mu: Option<&RadialProfile>,
    schedule: &Schedule,
    opts: &SolverOptions,
) -> Result<EigenSolution> {
    schedule.validate()?;
    let len = metric.length();
    let mut levels = Vec::with_capacity(schedule.eps_fractions.len());
    let mut finest = None;
    for &frac in &schedule.eps_fractions {
        let eps = frac * len;
        let mut hs = Vec::new();
        let mut values = Vec::new();
        for &n in &schedule.n_nodes {
            let disc = assemble(metric, params, mu, 0, n, eps)?;
            let sol = first_eigen_with(&disc, opts)?;
            hs.push(disc.h);
            values.push(sol.eigenvalue);
            finest = Some(sol);
        }
        let ex = extrapolate_fixed_order(&hs, &values, 2.0);
        levels.push(LevelResult {
            eps,
            values,
            observed_order: ex.observed_order,
            extrapolated: ex.value,
            error: ex.error,
        });
    }
    let mut sol = finest.expect("schedule is non-empty");
    let eps_values: Vec<f64> = levels.iter().map(|l| l.eps).collect();
    let level_values: Vec<f64> = levels.iter().map(|l| l.extrapolated).collect();
    let mesh_error = levels.iter().fold(0.0f64, |m, l| m.max(l.error));
    // shrinking the truncation enlarges the domain: Dirichlet values must not increase
    let slack = 10.0 * mesh_error + 1e-10 * level_values[0].abs().max(1.0);
    if let Some(w) = level_values.windows(2).find(|w| w[1] > w[0] + slack) {
        return Err(Error::NonConvergence(format!(
            "eigenvalue increased from {} to {} as the truncation shrank",
            w[0], w[1]
        )));
    }
    let ex = extrapolate_observed_order(&eps_values, &level_values);
    let finest_error = levels.last().map_or(0.0, |l| l.error);
    let mut orders: Vec<f64> = levels.iter().filter_map(|l| l.observed_order).collect();
    orders.sort_by(f64::total_cmp);
    let observed_order = (!orders.is_empty()).then(|| orders[orders.len() / 2]);

    let n_fine = *schedule.n_nodes.last().expect("validated");
    let eps_fine = *eps_values.last().expect("validated");
    let sector = first_eigen_with(&assemble(metric, params, mu, 1, n_fine, eps_fine)?, opts)?;

    sol.diagnostics = Some(Diagnostics {
        n_nodes: schedule.n_nodes.clone(),
        eps: eps_values,
        observed_order,
        eps_order: ex.observed_order,
        extrapolated: ex.value,
        error_bar: ex.error + finest_error,
        sector_one: sector.eigenvalue,
        sector_gap: sector.eigenvalue - sol.eigenvalue,
        levels,
    });
    Ok(sol)
}

/// `∫(u'² + cRu² - μu²) φ^{n-1} / ∫u² φ^{n-1}` by quadrature on the grid of `u`
/// (Simpson on uniform odd-sized grids, trapezoid otherwise).
pub fn rayleigh_quotient(
    metric: &WarpedMetric,
    params: &SpectralParams,
    mu: Option<&RadialProfile>,
    u: &RadialProfile,
) -> Result<f64> {
    let c = params
        .coupling()
        .ok_or_else(|| Error::InvalidInput("kappa = 0 has no spectral quotient".into()))?;
    let t = u.grid();
    for &x in t {
        metric.check_interior(x)?;
    }
    let shift = match mu {
        Some(p) => p.interpolate(t)?,
        None => vec![0.0; t.len()],
    };
    let n1 = metric.dim() as f64 - 1.0;
    let du = u.slope();
    let mut num = Vec::with_capacity(t.len());
    let mut den = Vec::with_capacity(t.len());
    for (i, &x) in t.iter().enumerate() {
        let w = metric.phi(x).powf(n1);
        let v = u.values()[i];
        num.push((du[i] * du[i] + (c * metric.scalar_curvature(x) - shift[i]) * v * v) * w);
        den.push(v * v * w);
    }
    let d = integrate(t, &den);
    if !(d > 0.0) {
        return invalid("trial function has zero norm");
    }
    Ok(integrate(t, &num) / d)
}

fn integrate(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len();
    if n < 2 {
        return 0.0;
    }
    let h = (t[n - 1] - t[0]) / (n - 1) as f64;
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if uniform && n % 2 == 1 && n >= 3 {
        let mut s = y[0] + y[n - 1];
        for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * h / 3.0
    } else {
        t.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
    }
}

/// How derivatives of `v = φ^{2/(4-κ)}` are obtained in [`verify_eigen_mu`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DerivativePath {
    /// Chain rule through `φ, φ', φ''`.
    Analytic,
    /// Centered three-point differences of `v` with the given step.
    FiniteDifference { step: f64 },
}

/// `max |-Δv + cRv - μv| / max |μv|` over `grid` for `v = φ^{2/(4-κ)}`, with
/// `μ` from [`mu_profile`].
pub fn verify_eigen_mu(metric: &WarpedMetric, kappa: f64, grid: &[f64], path: DerivativePath) -> Result<f64> {
    let mu = mu_profile(metric, kappa, grid)?;
    let c = 1.0 / kappa;
    let lam = 2.0 / (4.0 - kappa);
    let n1 = metric.dim() as f64 - 1.0;
    let v = |t: f64| metric.phi(t).powf(lam);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let [p, d1, d2] = metric.jet(t);
        let ls = d1 / p;
        let vt = v(t);
        let (dv, ddv) = match path {
            DerivativePath::Analytic => (lam * ls * vt, lam * ((lam - 1.0) * ls * ls + d2 / p) * vt),
            DerivativePath::FiniteDifference { step } => {
                if !(step > 0.0) || t - step <= 0.0 || t + step >= metric.length() {
                    return invalid(format!("finite-difference stencil at t = {t} leaves (0, T)"));
                }
                let (vm, vp) = (v(t - step), v(t + step));
                ((vp - vm) / (2.0 * step), (vp - 2.0 * vt + vm) / (step * step))
            }
        };
        let lap = ddv + n1 * ls * dv;
        let muv = mu.profile.values()[i] * vt;
        worst = worst.max((-lap + c * metric.scalar_curvature(t) * vt - muv).abs());
        scale = scale.max(muv.abs());
    }
    if scale == 0.0 {
        return invalid("mu v vanishes on the whole grid");
    }
    Ok(worst / scale)
}

/// Essential infimum of the scalar curvature: the `κ = 0` spectral constant.
/// Returns `-∞` when the curvature is unbounded below towards an end.
pub fn scalar_inf(metric: &WarpedMetric) -> f64 {
    let n = metric.dim() as f64;
    match metric.warp() {
        Warp::Round => n * (n - 1.0),
        Warp::ModelSin { a, b } => {
            let excess = 1.0 / (a * a) - b * b;
            if excess >= 0.0 {
                // minimum of (n-1)(nb² + (n-2)(a⁻²-b²)/sin²) sits at sin = 1
                (n - 1.0) * (n * b * b + (n - 2.0) * excess)
            } else {
                f64::NEG_INFINITY
            }
        }
        Warp::Custom(_) => {
            const SAMPLES: usize = 4095;
            let grid = metric.interior_grid(SAMPLES);
            let r: Vec<f64> = grid.iter().map(|&t| metric.scalar_curvature(t)).collect();
            let interior_min = r.iter().copied().fold(f64::INFINITY, f64::min);
            // R ≈ A/d² + B near an end at distance d; A < 0 sends R to -∞
            let diverges = |d1: f64, r1: f64, d2: f64, r2: f64| {
                let a = (r1 - r2) / (1.0 / (d1 * d1) - 1.0 / (d2 * d2));
                let b = r1 - a / (d1 * d1);
                a < -1e-8 * b.abs().max(1.0)
            };
            let (d1, d2) = (grid[0], grid[1]);
            let m = grid.len();
            let len = metric.length();
            if diverges(d1, r[0], d2, r[1]) || diverges(len - grid[m - 1], r[m - 1], len - grid[m - 2], r[m - 2]) {
                f64::NEG_INFINITY
            } else {
                interior_min
            }
        }
    }
}

/// Interior grid check shared by callers building profiles for the solver.
pub fn check_profile_grid(metric: &WarpedMetric, grid: &[f64]) -> Result<()> {
    check_grid(grid)?;
    grid.iter().try_for_each(|&t| metric.check_interior(t))
}
