//! Rotationally symmetric metrics `g = dt² + φ(t)² g_{S^{n-1}}` on `[0, T]`.
//!
//! The radial coordinate is named `t` everywhere (the literature also writes
//! it `θ` or `s`); it is arclength from the first closed end.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::closedform::ModelConstants;
use crate::error::{invalid, Error, Result};
use crate::interp::{CubicSpline, Jet, QuinticHermite};
use crate::profile::{check_grid, ProfileLabel, RadialProfile};

/// Number of uniform samples used when an analytic warp has to be compared
/// against sampled data.
const ANALYTIC_SAMPLES: usize = 4097;

/// Sampled warp table as read from or written to a warp CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpTable {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Option<Vec<f64>>,
    pub phi_second: Option<Vec<f64>>,
}

impl WarpTable {
    /// Reads a table with header `t,phi[,phi_prime[,phi_second]]`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
            .iter()
            .map(str::to_owned)
            .collect();
        const NAMES: [&str; 4] = ["t", "phi", "phi_prime", "phi_second"];
        if header.len() < 2 || header.len() > 4 || header.iter().zip(NAMES).any(|(h, n)| h != n) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header t,phi[,phi_prime[,phi_second]], found {}", header.join(",")),
            });
        }
        let cols = header.len();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); cols];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.len() != cols {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {cols} fields, found {}", rec.len()),
                });
            }
            for (col, field) in columns.iter_mut().zip(rec.iter()) {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("not a decimal number: {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse { line, msg: "non-finite value".into() });
                }
                col.push(v);
            }
        }
        let mut it = columns.into_iter();
        Ok(WarpTable {
            t: it.next().unwrap_or_default(),
            phi: it.next().unwrap_or_default(),
            phi_prime: it.next(),
            phi_second: it.next(),
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        let mut header = vec!["t", "phi"];
        if self.phi_prime.is_some() {
            header.push("phi_prime");
            if self.phi_second.is_some() {
                header.push("phi_second");
            }
        }
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.t.len() {
            let mut row = vec![cell(self.t[i]), cell(self.phi[i])];
            if let Some(d1) = &self.phi_prime {
                row.push(cell(d1[i]));
                if let Some(d2) = &self.phi_second {
                    row.push(cell(d2[i]));
                }
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text; exponent form for very small or large magnitudes.
fn cell(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// A warp given by samples, interpolated to second order smoothness.
#[derive(Debug, Clone)]
pub struct CustomWarp {
    table: WarpTable,
    interp: Interpolant,
}

#[derive(Debug, Clone)]
enum Interpolant {
    Spline(CubicSpline),
    Hermite(QuinticHermite),
}

impl CustomWarp {
    fn new(mut table: WarpTable) -> Result<Self> {
        let n = table.t.len();
        if n < 4 {
            return invalid("custom warp needs at least 4 samples");
        }
        if table.phi.len() != n
            || table.phi_prime.as_ref().is_some_and(|d| d.len() != n)
            || table.phi_second.as_ref().is_some_and(|d| d.len() != n)
        {
            return invalid("custom warp columns differ in length");
        }
        if table.phi_second.is_some() && table.phi_prime.is_none() {
            return invalid("phi_second requires phi_prime");
        }
        check_grid(&table.t)?;
        let span = table.t[n - 1] - table.t[0];
        if table.t[0].abs() > 1e-12 * span {
            return invalid(format!("custom warp must start at t = 0, found {}", table.t[0]));
        }
        table.t[0] = 0.0;
        for i in 1..n - 1 {
            if table.phi[i] <= 0.0 {
                return Err(Error::NonPositiveWarp { t: table.t[i], phi: table.phi[i] });
            }
        }
        let interp = match (&table.phi_prime, &table.phi_second) {
            (Some(d1), Some(d2)) => Interpolant::Hermite(QuinticHermite::new(&table.t, &table.phi, d1, d2)),
            (Some(d1), None) => {
                let slope = CubicSpline::natural(&table.t, d1);
                let d2: Vec<f64> = table.t.iter().map(|&x| slope.eval(x).d1).collect();
                Interpolant::Hermite(QuinticHermite::new(&table.t, &table.phi, d1, &d2))
            }
            _ => Interpolant::Spline(CubicSpline::natural(&table.t, &table.phi)),
        };
        Ok(CustomWarp { table, interp })
    }

    pub fn table(&self) -> &WarpTable {
        &self.table
    }

    fn eval(&self, t: f64) -> Jet {
        match &self.interp {
            Interpolant::Spline(s) => s.eval(t),
            Interpolant::Hermite(h) => h.eval(t),
        }
    }
}

/// Shape of the warp `φ`.
#[derive(Debug, Clone)]
pub enum Warp {
    /// `φ(t) = a sin(b t)` on `[0, π/b]`.
    ModelSin { a: f64, b: f64 },
    /// Unit round sphere, `φ(t) = sin t` on `[0, π]`.
    Round,
    Custom(CustomWarp),
}

/// Rotationally symmetric metric in arclength gauge. Immutable after construction.
#[derive(Debug, Clone)]
pub struct WarpedMetric {
    dim: usize,
    warp: Warp,
    length: f64,
}

impl WarpedMetric {
    pub fn round(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(WarpedMetric {
            dim,
            warp: Warp::Round,
            length: std::f64::consts::PI,
        })
    }

    pub fn model_sin(dim: usize, a: f64, b: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return invalid(format!("model warp needs a > 0 and b > 0, got a = {a}, b = {b}"));
        }
        Ok(WarpedMetric {
            dim,
            warp: Warp::ModelSin { a, b },
            length: std::f64::consts::PI / b,
        })
    }

    pub fn custom(dim: usize, table: WarpTable) -> Result<Self> {
        check_dim(dim)?;
        let warp = CustomWarp::new(table)?;
        let length = *warp.table.t.last().expect("validated non-empty");
        Ok(WarpedMetric {
            dim,
            warp: Warp::Custom(warp),
            length,
        })
    }

    pub fn from_csv_path(dim: usize, path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidInput(format!("cannot open warp table {}: {e}", path.display())))?;
        Self::custom(dim, WarpTable::read_csv(file)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    /// Length `T` of the radial interval.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.warp, Warp::Custom(_))
    }

    /// `[φ, φ', φ'']` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        match &self.warp {
            Warp::ModelSin { a, b } => {
                let (s, c) = (b * t).sin_cos();
                [a * s, a * b * c, -a * b * b * s]
            }
            Warp::Round => {
                let (s, c) = t.sin_cos();
                [s, c, -s]
            }
            Warp::Custom(w) => {
                let j = w.eval(t);
                [j.value, j.d1, j.d2]
            }
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.jet(t)[0]
    }

    /// `φ'/φ`.
    pub fn log_slope(&self, t: f64) -> f64 {
        match &self.warp {
            Warp::ModelSin { b, .. } => {
                let (s, c) = (b * t).sin_cos();
                b * c / s
            }
            Warp::Round => {
                let (s, c) = t.sin_cos();
                c / s
            }
            Warp::Custom(_) => {
                let [p, d1, _] = self.jet(t);
                d1 / p
            }
        }
    }

    /// `(log φ)'' = φ''/φ - (φ'/φ)²`.
    pub fn log_curvature(&self, t: f64) -> f64 {
        match &self.warp {
            Warp::ModelSin { b, .. } => {
                let s = (b * t).sin();
                -b * b / (s * s)
            }
            Warp::Round => {
                let s = t.sin();
                -1.0 / (s * s)
            }
            Warp::Custom(_) => {
                let [p, d1, d2] = self.jet(t);
                d2 / p - (d1 / p) * (d1 / p)
            }
        }
    }

    /// Scalar curvature at an interior point. Analytic warps use their closed
    /// forms; sampled warps use [`scalar_curvature_from_jet`].
    pub fn scalar_curvature(&self, t: f64) -> f64 {
        let n = self.dim as f64;
        match &self.warp {
            Warp::Round => n * (n - 1.0),
            Warp::ModelSin { a, b } => {
                let s = (b * t).sin();
                (n - 1.0) * (n * b * b + (n - 2.0) * (1.0 / (a * a) - b * b) / (s * s))
            }
            Warp::Custom(_) => scalar_curvature_from_jet(self.dim, self.jet(t)),
        }
    }

    /// Mean curvature `(n-1) φ'/φ` of the level set `{t}` with respect to `∂_t`.
    pub fn mean_curvature(&self, t: f64) -> f64 {
        (self.dim as f64 - 1.0) * self.log_slope(t)
    }

    /// Uniform grid of `count` points strictly inside `(0, T)`.
    pub fn interior_grid(&self, count: usize) -> Vec<f64> {
        let h = self.length / (count as f64 + 1.0);
        (1..=count).map(|i| i as f64 * h).collect()
    }

    /// Angular scaling `φ ↦ factor·φ` keeping the radial length.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return invalid("scale factor must be positive");
        }
        match &self.warp {
            Warp::ModelSin { a, b } => Self::model_sin(self.dim, a * factor, *b),
            Warp::Round => Self::model_sin(self.dim, factor, 1.0),
            Warp::Custom(w) => {
                let t = &w.table;
                let mul = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect::<Vec<_>>();
                Self::custom(
                    self.dim,
                    WarpTable {
                        t: t.t.clone(),
                        phi: mul(&t.phi),
                        phi_prime: t.phi_prime.as_ref().map(mul),
                        phi_second: t.phi_second.as_ref().map(mul),
                    },
                )
            }
        }
    }

    /// The metric `λ² g`: radial length and warp both scale by `λ`.
    pub fn homothety(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid("homothety factor must be positive");
        }
        match &self.warp {
            Warp::ModelSin { a, b } => Self::model_sin(self.dim, a * lambda, b / lambda),
            Warp::Round => Self::model_sin(self.dim, lambda, 1.0 / lambda),
            Warp::Custom(w) => {
                let t = &w.table;
                Self::custom(
                    self.dim,
                    WarpTable {
                        t: t.t.iter().map(|x| x * lambda).collect(),
                        phi: t.phi.iter().map(|x| x * lambda).collect(),
                        phi_prime: t.phi_prime.clone(),
                        phi_second: t.phi_second.as_ref().map(|v| v.iter().map(|x| x / lambda).collect()),
                    },
                )
            }
        }
    }

    /// Samples the warp with all derivative columns on `count` uniform points of `[0, T]`.
    pub fn to_table(&self, count: usize) -> WarpTable {
        let count = count.max(4);
        let h = self.length / (count as f64 - 1.0);
        let t: Vec<f64> = (0..count).map(|i| if i + 1 == count { self.length } else { i as f64 * h }).collect();
        let jets: Vec<[f64; 3]> = t.iter().map(|&x| self.jet(x)).collect();
        let mut phi: Vec<f64> = jets.iter().map(|j| j[0]).collect();
        if self.is_analytic() {
            // closed analytic warps vanish exactly at both ends
            phi[0] = 0.0;
            phi[count - 1] = 0.0;
        }
        WarpTable {
            t,
            phi,
            phi_prime: Some(jets.iter().map(|j| j[1]).collect()),
            phi_second: Some(jets.iter().map(|j| j[2]).collect()),
        }
    }

    fn native_grid(&self) -> Vec<f64> {
        match &self.warp {
            Warp::Custom(w) => w.table.t.clone(),
            _ => {
                let h = self.length / (ANALYTIC_SAMPLES - 1) as f64;
                (0..ANALYTIC_SAMPLES).map(|i| i as f64 * h).collect()
            }
        }
    }

    /// Whether `φ` vanishes at both ends to within `rel_tol·max φ`.
    pub fn closes_at_ends(&self, rel_tol: f64) -> bool {
        match &self.warp {
            Warp::Custom(w) => {
                let scale = w.table.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let ends = [w.table.phi[0], *w.table.phi.last().expect("non-empty")];
                ends.iter().all(|v| v.abs() <= rel_tol * scale)
            }
            _ => true,
        }
    }

    pub(crate) fn check_interior(&self, t: f64) -> Result<()> {
        if !(t > 0.0 && t < self.length) {
            return invalid(format!("t = {t} is not inside (0, {})", self.length));
        }
        let phi = self.phi(t);
        if phi <= 0.0 || !phi.is_finite() {
            return Err(Error::NonPositiveWarp { t, phi });
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 3 {
        return invalid(format!("dimension must be at least 3, got {dim}"));
    }
    Ok(())
}

/// `R = (n-1) φ⁻² [(n-2)(1 - φ'²) - 2 φ φ'']` for a warp jet `[φ, φ', φ'']`.
pub fn scalar_curvature_from_jet(dim: usize, jet: [f64; 3]) -> f64 {
    let n = dim as f64;
    let [p, d1, d2] = jet;
    (n - 1.0) / (p * p) * ((n - 2.0) * (1.0 - d1 * d1) - 2.0 * d2 * p)
}

/// The model metric `dt² + a² sin²(bt) g_{S^{n-1}}` for the given constants.
pub fn make_model_metric(dim: usize, consts: &ModelConstants) -> Result<WarpedMetric> {
    if consts.dim != dim {
        return invalid(format!("constants were computed for n = {}, not n = {dim}", consts.dim));
    }
    WarpedMetric::model_sin(dim, consts.a, consts.b)
}

/// Scalar and mean curvature samples on an interior grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub t: Vec<f64>,
    pub scalar: Vec<f64>,
    /// Sum of principal curvatures of the level sets, `(n-1) φ'/φ`.
    pub mean: Vec<f64>,
    /// Gauss curvature of the fiber; the round fiber has `K = 1`.
    pub fiber_curvature: f64,
}

pub fn scalar_curvature_profile(metric: &WarpedMetric, grid: &[f64]) -> Result<CurvatureReport> {
    check_grid(grid)?;
    for &t in grid {
        metric.check_interior(t)?;
    }
    Ok(CurvatureReport {
        t: grid.to_vec(),
        scalar: grid.iter().map(|&t| metric.scalar_curvature(t)).collect(),
        mean: grid.iter().map(|&t| metric.mean_curvature(t)).collect(),
        fiber_curvature: 1.0,
    })
}

/// `Δu = u'' + (n-1)(φ'/φ) u'` for a radial function. Uses the derivative
/// samples of `u` when present, finite differences otherwise.
pub fn radial_laplacian(metric: &WarpedMetric, u: &RadialProfile) -> Result<RadialProfile> {
    for &t in u.grid() {
        metric.check_interior(t)?;
    }
    let n1 = metric.dim() as f64 - 1.0;
    let slope = u.slope();
    let curv = u.curvature();
    let values = u
        .grid()
        .iter()
        .zip(slope.iter().zip(&curv))
        .map(|(&t, (&d1, &d2))| {
            if d1 == 0.0 {
                d2
            } else {
                d2 + n1 * metric.log_slope(t) * d1
            }
        })
        .collect();
    RadialProfile::new(ProfileLabel::Laplacian, u.grid().to_vec(), values, None, None)
}

/// Brings `g = w(t)² dt² + φ̃(t)² g_{S^{n-1}}` to arclength gauge through
/// `s(t) = ∫₀ᵗ w`. Both profiles share one grid starting at `t = 0`.
pub fn normalize_arclength(dim: usize, w: &RadialProfile, phi: &RadialProfile) -> Result<WarpedMetric> {
    if w.grid() != phi.grid() {
        return invalid("w and phi must be sampled on the same grid");
    }
    let t = w.grid();
    if t.len() < 4 {
        return invalid("arclength normalization needs at least 4 samples");
    }
    if t[0].abs() > 1e-12 * t[t.len() - 1].abs() {
        return invalid("profiles must start at t = 0");
    }
    if let Some((i, v)) = w.values().iter().enumerate().find(|(_, v)| **v < 1.0) {
        return invalid(format!("w must be >= 1, found w({}) = {v}", t[i]));
    }
    let spline = CubicSpline::natural(t, w.values());
    let w_slope: Vec<f64> = match w.first_derivative() {
        Some(d) => d.to_vec(),
        None => t.iter().map(|&x| spline.eval(x).d1).collect(),
    };
    let pieces: Vec<f64> = match w.first_derivative() {
        // Hermite-corrected trapezoid, exact for cubics
        Some(d) => (0..t.len() - 1)
            .map(|i| {
                let h = t[i + 1] - t[i];
                0.5 * h * (w.values()[i] + w.values()[i + 1]) + h * h / 12.0 * (d[i] - d[i + 1])
            })
            .collect(),
        None => spline.segment_integrals(),
    };
    let mut s = Vec::with_capacity(t.len());
    s.push(0.0);
    for p in pieces {
        s.push(s.last().copied().unwrap_or(0.0) + p);
    }
    let wv = w.values();
    let phi_prime = phi
        .first_derivative()
        .map(|d| d.iter().zip(wv).map(|(d, w)| d / w).collect::<Vec<_>>());
    let phi_second = match (phi.first_derivative(), phi.second_derivative()) {
        (Some(d1), Some(d2)) => Some(
            (0..t.len())
                .map(|i| (d2[i] - d1[i] * w_slope[i] / wv[i]) / (wv[i] * wv[i]))
                .collect::<Vec<_>>(),
        ),
        _ => None,
    };
    WarpedMetric::custom(
        dim,
        WarpTable {
            t: s,
            phi: phi.values().to_vec(),
            phi_second: phi_prime.as_ref().and(phi_second),
            phi_prime,
        },
    )
}

/// Outcome of comparing two radial metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Domination {
    /// Dominates and differs somewhere; `witness` is where the excess is largest.
    TrueStrict { witness: f64, margin: f64 },
    TrueEqual,
    /// Fails somewhere; `witness` is where the deficit is largest.
    False { witness: f64, deficit: f64 },
}

impl Domination {
    /// 2 for strict, 1 for equal, 0 for a violation.
    pub fn strength(&self) -> u8 {
        match self {
            Domination::TrueStrict { .. } => 2,
            Domination::TrueEqual => 1,
            Domination::False { .. } => 0,
        }
    }

    pub fn holds(&self) -> bool {
        self.strength() > 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domination::TrueStrict { .. } => "true_strict",
            Domination::TrueEqual => "true_equal",
            Domination::False { .. } => "false",
        }
    }
}

/// Default relative tolerance for pointwise warp comparisons.
pub const DOMINATION_TOL: f64 = 1e-10;

/// Does `g ≥ g0` under the same-arclength identification?
pub fn metric_dominates(g: &WarpedMetric, g0: &WarpedMetric) -> Result<Domination> {
    metric_dominates_with_tol(g, g0, DOMINATION_TOL)
}

pub fn metric_dominates_with_tol(g: &WarpedMetric, g0: &WarpedMetric, rel_tol: f64) -> Result<Domination> {
    if g.dim() != g0.dim() {
        return invalid(format!("dimensions differ: {} vs {}", g.dim(), g0.dim()));
    }
    let (len, len0) = (g.length(), g0.length());
    if len < len0 * (1.0 - 1e-12) {
        return Err(Error::IncomparableDomains { candidate: len, reference: len0 });
    }
    let (ga, gb) = (g.native_grid(), g0.native_grid());
    let grid = if max_spacing(&ga) <= max_spacing(&gb) { ga } else { gb };
    let points: Vec<f64> = grid.into_iter().filter(|&t| t > 0.0 && t < len0).collect();
    let scale = points.iter().fold(0.0f64, |m, &t| m.max(g0.phi(t).abs())).max(f64::MIN_POSITIVE);
    let tol = rel_tol * scale;
    let mut worst = (f64::INFINITY, 0.0);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in &points {
        let d = g.phi(t) - g0.phi(t);
        if d < worst.0 {
            worst = (d, t);
        }
        if d > best.0 {
            best = (d, t);
        }
    }
    if worst.0 < -tol {
        return Ok(Domination::False { witness: worst.1, deficit: -worst.0 });
    }
    if best.0 > tol {
        return Ok(Domination::TrueStrict { witness: best.1, margin: best.0 });
    }
    if len > len0 * (1.0 + 1e-12) {
        return Ok(Domination::TrueStrict { witness: len0, margin: len - len0 });
    }
    Ok(Domination::TrueEqual)
}

/// Compares `w² dt² + φ̃² g_{S^{n-1}}` against `g0` under the identity map in
/// the original coordinate: dominates iff `w ≥ 1` and `φ̃ ≥ φ₀`.
pub fn coordinate_dominates(
    w: &RadialProfile,
    phi: &RadialProfile,
    g0: &WarpedMetric,
    rel_tol: f64,
) -> Result<Domination> {
    if w.grid() != phi.grid() {
        return invalid("w and phi must be sampled on the same grid");
    }
    let t = w.grid();
    if t[0] < -1e-12 || *t.last().expect("non-empty") > g0.length() * (1.0 + 1e-12) {
        return Err(Error::IncomparableDomains {
            candidate: *t.last().expect("non-empty"),
            reference: g0.length(),
        });
    }
    let scale = t.iter().fold(0.0f64, |m, &x| m.max(g0.phi(x).abs())).max(f64::MIN_POSITIVE);
    let mut worst = (f64::INFINITY, 0.0);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for (i, &x) in t.iter().enumerate() {
        // both excesses in relative units
        let dw = w.values()[i] - 1.0;
        let dphi = (phi.values()[i] - g0.phi(x)) / scale;
        let lo = dw.min(dphi);
        let hi = dw.max(dphi);
        if lo < worst.0 {
            worst = (lo, x);
        }
        if hi > best.0 {
            best = (hi, x);
        }
    }
    if worst.0 < -rel_tol {
        Ok(Domination::False { witness: worst.1, deficit: -worst.0 })
    } else if best.0 > rel_tol {
        Ok(Domination::TrueStrict { witness: best.1, margin: best.0 })
    } else {
        Ok(Domination::TrueEqual)
    }
}

fn max_spacing(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Near-end behaviour of `Δt - [2(6-κ)/(4-κ)] φ'/φ` on a closed 3-dimensional warp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// Coefficient of `-1/t` near `t = 0`.
    pub c1: f64,
    /// Coefficient of `1/(T - t)` near `t = T`.
    pub c2: f64,
    /// Relative RMS misfit of the two fits.
    pub residual_start: f64,
    pub residual_end: f64,
    /// Fit window as distances from the respective end.
    pub window: [f64; 2],
    pub samples: usize,
}

/// Relative RMS misfit above which a drift fit is declared non-convergent.
pub const DRIFT_FIT_THRESHOLD: f64 = 1e-2;
const DRIFT_SAMPLES: usize = 256;

pub fn drift_asymptotics(metric: &WarpedMetric, kappa: f64) -> Result<DriftReport> {
    if metric.dim() != 3 {
        return invalid("drift asymptotics are defined for n = 3");
    }
    if !(0.0..4.0).contains(&kappa) {
        return invalid(format!("kappa must lie in [0, 4), got {kappa}"));
    }
    if !metric.closes_at_ends(1e-8) {
        return invalid("drift asymptotics need a warp vanishing at both ends");
    }
    let len = metric.length();
    let coef = 2.0 * (6.0 - kappa) / (4.0 - kappa);
    let n1 = metric.dim() as f64 - 1.0;
    // Δt = (n-1) φ'/φ in arclength gauge
    let drift = |t: f64| (n1 - coef) * metric.log_slope(t);
    let (lo, hi) = (len / 200.0, len / 20.0);
    let dist: Vec<f64> = (0..DRIFT_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (DRIFT_SAMPLES - 1) as f64)
        .collect();
    let start: Vec<(f64, f64)> = dist.iter().map(|&d| (-1.0 / d, drift(d))).collect();
    let end: Vec<(f64, f64)> = dist.iter().map(|&d| (1.0 / d, drift(len - d))).collect();
    let (c1, residual_start) = fit_inverse_distance(&start);
    let (c2, residual_end) = fit_inverse_distance(&end);
    let report = DriftReport {
        c1,
        c2,
        residual_start,
        residual_end,
        window: [lo, hi],
        samples: DRIFT_SAMPLES,
    };
    if !(c1.is_finite() && c2.is_finite())
        || residual_start > DRIFT_FIT_THRESHOLD
        || residual_end > DRIFT_FIT_THRESHOLD
    {
        return Err(Error::NonConvergence(format!(
            "drift fit misfit {residual_start:.3e} / {residual_end:.3e} exceeds {DRIFT_FIT_THRESHOLD:.0e}"
        )));
    }
    Ok(report)
}

// Least squares y ≈ c x + d; returns (c, relative RMS misfit).
fn fit_inverse_distance(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (x - mx), b + (x - mx) * (y - my)));
    let c = sxy / sxx;
    let d = my - c * mx;
    let (ss_res, ss_y) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let r = y - (c * x + d);
        (a + r * r, b + y * y)
    });
    let rel = if ss_y == 0.0 { 0.0 } else { (ss_res / ss_y).sqrt() };
    (c, rel)
}
