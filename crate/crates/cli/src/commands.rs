use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use warpspec::closedform::{
    check_f_ode, check_xi_ode, constants_3d, constants_nd, invariant_lattice, mu_profile, residuals,
};
use warpspec::geometry::{
    coordinate_dominates, drift_asymptotics, make_model_metric, metric_dominates, normalize_arclength, DOMINATION_TOL,
};
use warpspec::harmonic3d::{check_model_relations_with_tol, Target, RELATION_TOL};
use warpspec::spectral::{lambda_c_with, scalar_inf, verify_eigen_mu, DerivativePath, SolverOptions};
use warpspec::{Error, ProfileLabel, RadialProfile, Result, SpectralParams, WarpedMetric};

use crate::config::{Format, MetricSource, Perturbation, RunConfig, Suite};
use crate::report::{fmt_num, ReportBundle, Verdicts};

/// Primary output of a command plus any side file (the sweep CSV).
pub struct Outcome {
    pub text: String,
    pub pass: bool,
    pub side_file: Option<(String, String)>,
}

impl RunConfig {
    fn params(&self) -> Result<SpectralParams> {
        SpectralParams::new(self.kappa, self.lambda)
    }

    fn metric(&self) -> Result<WarpedMetric> {
        match &self.metric {
            MetricSource::Model => make_model_metric(self.n, &constants_nd(self.n, &self.params()?)?),
            MetricSource::Round => WarpedMetric::round(self.n),
            MetricSource::File(p) => WarpedMetric::from_csv_path(self.n, p),
        }
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            max_iter: self.max_iter,
            ..SolverOptions::default()
        }
    }

    fn grid(&self, metric: &WarpedMetric, default: usize) -> Vec<f64> {
        metric.interior_grid(self.points.unwrap_or(default))
    }
}

fn bundle(cfg: &RunConfig, results: Value, diagnostics: Value, verdicts: Verdicts<'_>) -> Result<ReportBundle> {
    Ok(ReportBundle {
        config: serde_json::to_value(cfg).expect("config serializes"),
        results,
        diagnostics,
        verdicts: verdicts.finish()?,
    })
}

fn emit(cfg: &RunConfig, b: ReportBundle) -> Outcome {
    let text = match cfg.format {
        Format::Json => b.to_json(),
        Format::Csv => b.verdicts_csv(),
    };
    Outcome { text, pass: b.all_pass(), side_file: None }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command.as_str() {
        "constants" => constants(cfg).map(|b| emit(cfg, b)),
        "lambda-c" => lambda_c(cfg).map(|b| emit(cfg, b)),
        "verify" => verify(cfg).map(|b| emit(cfg, b)),
        "rigidity-sweep" => rigidity_sweep(cfg),
        "mu-profile" => mu(cfg),
        "emit-model" => emit_model(cfg),
        other => Err(Error::InvalidInput(format!("unknown command '{other}'"))),
    }
}

fn constants_json(c: &warpspec::ModelConstants) -> Value {
    json!({
        "a": c.a,
        "b": c.b,
        "a1": c.a1,
        "beta2": c.beta2,
        "lambda_exp": c.lambda_exp,
        "alpha": c.alpha,
        "length": c.length(),
    })
}

fn constants(cfg: &RunConfig) -> Result<ReportBundle> {
    let p = cfg.params()?;
    let c = constants_nd(cfg.n, &p)?;
    let r = residuals(cfg.n, &p)?;
    let mut v = Verdicts::new(&cfg.tolerances);
    v.below("beta2_relation", "closed_form", r.beta2_relation, 1e-12);
    v.below("eigen_balance", "closed_form", r.eigen_balance, 1e-12);
    v.below("singular_balance", "closed_form", r.singular_balance, 1e-12);
    let mut diagnostics = json!({ "residuals": r, "scaled_target": p.scaled_target() });
    if cfg.n == 3 && cfg.kappa > 0.0 {
        let d = constants_3d(&p)?;
        let gap = [(c.a, d.a), (c.b, d.b), (c.a1, d.a1), (c.beta2, d.beta2), (c.lambda_exp, d.lambda_exp)]
            .iter()
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        v.below("three_dimensional_agreement", "agreement", gap, 1e-14);
        diagnostics["three_dimensional"] = constants_json(&d);
    }
    bundle(cfg, constants_json(&c), diagnostics, v)
}

fn lambda_c(cfg: &RunConfig) -> Result<ReportBundle> {
    let p = cfg.params()?;
    let metric = cfg.metric()?;
    let mut v = Verdicts::new(&cfg.tolerances);
    if cfg.kappa == 0.0 {
        // the pointwise mode is the infimum of the scalar curvature
        let s = scalar_inf(&metric);
        let results = json!({ "mode": "scalar_inf", "lambda_c": s, "unbounded_below": s == f64::NEG_INFINITY });
        return bundle(cfg, results, json!({}), v);
    }
    let sol = lambda_c_with(&metric, &p, None, &cfg.schedule.to_schedule(), &cfg.solver())?;
    let d = sol.diagnostics.as_ref().expect("lambda_c fills diagnostics");
    if let Some(order) = d.observed_order {
        v.below("observed_order_deviation", "observed_order", (order - 2.0).abs(), 0.3);
    } else {
        v.below("observed_order_deviation", "observed_order", f64::NAN, 0.3);
    }
    v.above("sector_gap", "sector_gap", d.sector_gap, 0.0);
    v.below("sign_changes", "sign_changes", sol.sign_changes as f64, 0.5);
    v.below("relative_residual", "residual", sol.residual / sol.matrix_norm, 1e-10);
    if cfg.metric == MetricSource::Model {
        v.below("target_reproduction", "reproduction", (d.extrapolated - cfg.lambda).abs() / cfg.lambda, 1e-3);
    }
    let results = json!({
        "lambda_c": d.extrapolated,
        "error_bar": d.error_bar,
        "finest_eigenvalue": sol.eigenvalue,
        "sector_one": d.sector_one,
        "sector_gap": d.sector_gap,
        "target": cfg.lambda,
        "gap": cfg.lambda - d.extrapolated,
    });
    let diagnostics = json!({
        "grid_sizes": d.n_nodes,
        "eps": d.eps,
        "levels": d.levels,
        "observed_order": d.observed_order,
        "eps_order": d.eps_order,
        "residual": sol.residual,
        "matrix_norm": sol.matrix_norm,
        "iterations": sol.iterations,
    });
    bundle(cfg, results, diagnostics, v)
}

fn verify(cfg: &RunConfig) -> Result<ReportBundle> {
    let suite = cfg
        .suite
        .ok_or_else(|| Error::InvalidInput("verify needs --suite".into()))?;
    let mut v = Verdicts::new(&cfg.tolerances);
    let (results, diagnostics) = match suite {
        Suite::ClosedForm => {
            let mut worst = 0.0f64;
            let mut agreement = 0.0f64;
            let start = std::time::Instant::now();
            for (n, p) in invariant_lattice() {
                worst = worst.max(residuals(n, &p)?.max());
                if n == 3 {
                    let (a, b) = (constants_nd(3, &p)?, constants_3d(&p)?);
                    for (x, y) in [(a.a, b.a), (a.b, b.b), (a.a1, b.a1), (a.beta2, b.beta2)] {
                        agreement = agreement.max((x - y).abs());
                    }
                }
            }
            let own = residuals(cfg.n, &cfg.params()?)?;
            v.below("lattice_residual", "closed_form", worst, 1e-12);
            v.below("lattice_three_dimensional_agreement", "agreement", agreement, 1e-14);
            v.below("residual", "closed_form", own.max(), 1e-12);
            let runtime = start.elapsed().as_secs_f64();
            (
                json!({ "lattice_max_residual": worst, "lattice_max_agreement": agreement, "residuals": own }),
                json!({ "lattice_points": invariant_lattice().len(), "lattice_seconds_below_one": runtime < 1.0 }),
            )
        }
        Suite::FOde => {
            let p = cfg.params()?;
            let c = constants_nd(cfg.n, &p)?;
            let metric = make_model_metric(cfg.n, &c)?;
            let r = check_f_ode(&c, &p, &cfg.grid(&metric, 1001))?;
            v.below("f_ode_residual", "f_ode", r, 1e-12);
            (json!({ "f_ode_residual": r }), json!({}))
        }
        Suite::XiOde => {
            let p = cfg.params()?;
            let metric = cfg.metric()?;
            let r = check_xi_ode(&metric, &p, &cfg.grid(&metric, 1001))?;
            v.below("xi_ode_residual", "xi_ode", r, 1e-12);
            (json!({ "xi_ode_residual": r }), json!({}))
        }
        Suite::Mu => {
            let metric = cfg.metric()?;
            let grid = cfg.grid(&metric, 1001);
            let mu = mu_profile(&metric, cfg.kappa, &grid)?;
            let spread = mu.profile.values().iter().map(|x| (x - cfg.lambda).abs()).fold(0.0, f64::max) / cfg.lambda;
            if cfg.metric == MetricSource::Model {
                v.below("mu_equals_target", "mu", spread, 1e-8);
            }
            v.below(
                "log_concavity_violations",
                "log_concavity",
                mu.log_concavity_violation.map_or(0.0, |_| 1.0),
                0.5,
            );
            (
                json!({ "max_relative_deviation_from_target": spread, "first_log_concavity_violation": mu.log_concavity_violation }),
                json!({ "points": grid.len() }),
            )
        }
        Suite::ModelRelations => {
            let metric = cfg.metric()?;
            let grid = cfg.grid(&metric, 1001);
            let tol = v.threshold("relations", RELATION_TOL);
            let r = check_model_relations_with_tol(&metric, cfg.kappa, Target::Constant(cfg.lambda), &grid, tol)?;
            for c in &r.checks {
                v.below(&c.name, "relations", c.residual, RELATION_TOL);
            }
            // the printed 2(3-κ) denominator must be visibly inconsistent
            v.above("item3_verbatim_discrepancy", "verbatim_discrepancy", r.item3_verbatim.residual, 0.1);
            (json!({ "checks": r.checks, "item3_verbatim": r.item3_verbatim }), json!({ "points": grid.len() }))
        }
        Suite::Eigenfunction => {
            let metric = cfg.metric()?;
            let grid = cfg.grid(&metric, 1001);
            let r = verify_eigen_mu(&metric, cfg.kappa, &grid, DerivativePath::Analytic)?;
            v.below("eigen_residual", "eigen", r, 1e-8);
            (json!({ "eigen_residual": r }), json!({ "points": grid.len(), "path": "analytic" }))
        }
        Suite::Drift => {
            let metric = cfg.metric()?;
            let d = drift_asymptotics(&metric, cfg.kappa)?;
            let expected = 4.0 / (4.0 - cfg.kappa);
            v.below("c1_relative_error", "drift", (d.c1 - expected).abs() / expected, 0.01);
            v.below("c2_relative_error", "drift", (d.c2 - expected).abs() / expected, 0.01);
            (json!({ "c1": d.c1, "c2": d.c2, "expected": expected }), serde_json::to_value(&d).expect("serializes"))
        }
    };
    bundle(cfg, results, diagnostics, v)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    epsilon: f64,
    dominates: &'static str,
    lambda_c: f64,
    gap: f64,
    err: f64,
    observed_order: Option<f64>,
}

fn sweep_row(cfg: &RunConfig, base: &WarpedMetric, p: &SpectralParams, eps: f64) -> Result<SweepRow> {
    let (metric, verdict) = match cfg.perturbation {
        Perturbation::AngularScale => {
            let g = base.scaled(1.0 + eps)?;
            let d = metric_dominates(&g, base)?;
            (g, d)
        }
        Perturbation::Stretch => {
            let samples = cfg.points.unwrap_or(4097);
            let t: Vec<f64> = (0..samples)
                .map(|i| if i + 1 == samples { base.length() } else { base.length() * i as f64 / (samples - 1) as f64 })
                .collect();
            let phi = RadialProfile::from_jet(ProfileLabel::Warp, &t, |x| {
                let j = base.jet(x);
                // closed ends are exact zeros of the analytic warp
                if x == 0.0 || x == base.length() {
                    [0.0, j[1], j[2]]
                } else {
                    j
                }
            })?;
            let w = RadialProfile::constant(ProfileLabel::Weight, &t, 1.0 + eps)?;
            let d = coordinate_dominates(&w, &phi, base, DOMINATION_TOL)?;
            (normalize_arclength(cfg.n, &w, &phi)?, d)
        }
    };
    let sol = lambda_c_with(&metric, p, None, &cfg.schedule.to_schedule(), &cfg.solver())?;
    let d = sol.diagnostics.expect("lambda_c fills diagnostics");
    Ok(SweepRow {
        epsilon: eps,
        dominates: verdict.name(),
        lambda_c: d.extrapolated,
        gap: cfg.lambda - d.extrapolated,
        err: d.error_bar,
        observed_order: d.observed_order,
    })
}

fn rigidity_sweep(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.kappa == 0.0 {
        return Err(Error::InvalidInput("rigidity-sweep needs kappa > 0".into()));
    }
    let p = cfg.params()?;
    let base = cfg.metric()?;
    let rows: Vec<SweepRow> = cfg
        .amplitudes
        .par_iter()
        .map(|&e| sweep_row(cfg, &base, &p, e))
        .collect::<Result<_>>()?;

    let mut v = Verdicts::new(&cfg.tolerances);
    let factor = v.threshold("gap_factor", 3.0);
    let zero_tol = v.threshold("zero_gap", 1e-3);
    for r in &rows {
        let tag = format!("eps={}", r.epsilon);
        if r.epsilon == 0.0 {
            v.below(&format!("zero_gap[{tag}]"), "zero_gap", r.gap.abs(), zero_tol);
        } else {
            v.above(&format!("strict_gap[{tag}]"), "gap_factor", r.gap / r.err.max(f64::MIN_POSITIVE), factor);
            v.above(&format!("domination[{tag}]"), "domination", if r.dominates == "true_strict" { 1.0 } else { 0.0 }, 0.5);
        }
    }
    let mut ordered = rows.clone();
    ordered.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let increase = ordered
        .windows(2)
        .filter(|w| w[1].epsilon > w[0].epsilon)
        .map(|w| w[1].lambda_c - w[0].lambda_c)
        .fold(f64::NEG_INFINITY, f64::max);
    if ordered.len() > 1 {
        v.below("lambda_c_decreasing", "monotone", increase, 0.0);
    }

    let mut csv = String::from("epsilon,dominates,lambda_c,gap,err\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_num(r.epsilon),
            r.dominates,
            fmt_num(r.lambda_c),
            fmt_num(r.gap),
            fmt_num(r.err)
        ));
    }
    let results = json!({ "rows": rows, "perturbation": cfg.perturbation });
    let diagnostics = json!({ "grid_sizes": cfg.schedule.n_nodes, "eps_fractions": cfg.schedule.eps_fractions });
    let b = bundle(cfg, results, diagnostics, v)?;
    let pass = b.all_pass();
    let text = match cfg.format {
        Format::Json => b.to_json(),
        Format::Csv => csv.clone(),
    };
    Ok(Outcome {
        text,
        pass,
        side_file: cfg.csv.clone().map(|path| (path, csv)),
    })
}

fn mu(cfg: &RunConfig) -> Result<Outcome> {
    let metric = cfg.metric()?;
    let grid = cfg.grid(&metric, 401);
    let m = mu_profile(&metric, cfg.kappa, &grid)?;
    let mut v = Verdicts::new(&cfg.tolerances);
    v.below(
        "log_concavity_violations",
        "log_concavity",
        m.log_concavity_violation.map_or(0.0, |_| 1.0),
        0.5,
    );
    if cfg.format == Format::Csv {
        let mut s = String::from("t,mu\n");
        for (t, x) in grid.iter().zip(m.profile.values()) {
            s.push_str(&format!("{},{}\n", fmt_num(*t), fmt_num(*x)));
        }
        return Ok(Outcome { text: s, pass: v.finish().map(|vs| vs.values().all(|x| x.pass))?, side_file: None });
    }
    let results = json!({ "t": grid, "mu": m.profile.values(), "first_log_concavity_violation": m.log_concavity_violation });
    Ok(emit(cfg, bundle(cfg, results, json!({ "points": grid.len() }), v)?))
}

fn emit_model(cfg: &RunConfig) -> Result<Outcome> {
    let table = cfg.metric()?.to_table(cfg.points.unwrap_or(4097));
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    Ok(Outcome {
        text: String::from_utf8(buf).expect("csv output is utf-8"),
        pass: true,
        side_file: None,
    })
}
