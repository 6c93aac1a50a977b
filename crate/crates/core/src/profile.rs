use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interp::CubicSpline;

/// What a sampled radial function represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileLabel {
    Mu,
    F,
    Xi,
    ScalarCurvature,
    U,
    GradU,
    MeanCurvature,
    Laplacian,
    Warp,
    Weight,
    Other,
}

/// A function of the radial coordinate sampled on a strictly increasing grid,
/// with optional first and second derivative samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub label: ProfileLabel,
    t: Vec<f64>,
    values: Vec<f64>,
    d1: Option<Vec<f64>>,
    d2: Option<Vec<f64>>,
}

impl RadialProfile {
    pub fn new(
        label: ProfileLabel,
        t: Vec<f64>,
        values: Vec<f64>,
        d1: Option<Vec<f64>>,
        d2: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_grid(&t)?;
        if values.len() != t.len() {
            return invalid("profile values and grid differ in length");
        }
        for d in [&d1, &d2].into_iter().flatten() {
            if d.len() != t.len() {
                return invalid("profile derivative samples and grid differ in length");
            }
        }
        if values.iter().chain(d1.iter().flatten()).chain(d2.iter().flatten()).any(|v| !v.is_finite()) {
            return invalid("profile samples must be finite");
        }
        Ok(RadialProfile { label, t, values, d1, d2 })
    }

    /// Samples `f` (value, first, second derivative) on `grid`.
    pub fn from_jet(label: ProfileLabel, grid: &[f64], f: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let jets: Vec<[f64; 3]> = grid.iter().map(|&t| f(t)).collect();
        Self::new(
            label,
            grid.to_vec(),
            jets.iter().map(|j| j[0]).collect(),
            Some(jets.iter().map(|j| j[1]).collect()),
            Some(jets.iter().map(|j| j[2]).collect()),
        )
    }

    pub fn constant(label: ProfileLabel, grid: &[f64], value: f64) -> Result<Self> {
        Self::from_jet(label, grid, |_| [value, 0.0, 0.0])
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_derivative(&self) -> Option<&[f64]> {
        self.d1.as_deref()
    }

    pub fn second_derivative(&self) -> Option<&[f64]> {
        self.d2.as_deref()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// First derivative samples, falling back to centered differences on the
    /// (possibly non-uniform) grid. One-sided second-order stencils at the ends.
    pub fn slope(&self) -> Vec<f64> {
        match &self.d1 {
            Some(d) => d.clone(),
            None => finite_difference_slope(&self.t, &self.values),
        }
    }

    /// Second derivative samples, falling back to three-point differences.
    pub fn curvature(&self) -> Vec<f64> {
        match &self.d2 {
            Some(d) => d.clone(),
            None => finite_difference_second(&self.t, &self.values),
        }
    }

    /// Natural cubic spline evaluation inside the grid range.
    pub fn interpolate(&self, at: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) = (self.t[0], self.t[self.t.len() - 1]);
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        if at.iter().any(|&x| x < lo - tol || x > hi + tol) {
            return invalid(format!("interpolation point outside profile range [{lo}, {hi}]"));
        }
        if self.t.len() == 1 {
            return Ok(vec![self.values[0]; at.len()]);
        }
        let spline = CubicSpline::natural(&self.t, &self.values);
        Ok(at.iter().map(|&x| spline.eval(x).value).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return invalid("empty grid");
    }
    if t.iter().any(|v| !v.is_finite()) {
        return invalid("grid contains non-finite abscissae");
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("grid abscissae must be strictly increasing");
    }
    Ok(())
}

fn finite_difference_slope(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    if n == 2 {
        let s = (y[1] - y[0]) / (t[1] - t[0]);
        return vec![s, s];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        out[i] = (h0 * h0 * (y[i + 1] - y[i]) + h1 * h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1));
    }
    out[0] = three_point_end_slope(t[0], t[1], t[2], y[0], y[1], y[2]);
    out[n - 1] = three_point_end_slope(t[n - 1], t[n - 2], t[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    out
}

// Derivative at x0 of the quadratic through three points.
fn three_point_end_slope(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> f64 {
    let (a, b) = (x1 - x0, x2 - x0);
    ((y1 - y0) * b * b - (y2 - y0) * a * a) / (a * b * (b - a))
}

fn finite_difference_second(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        out[i] = 2.0 * (h0 * (y[i + 1] - y[i]) - h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1));
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}
