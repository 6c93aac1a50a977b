//! Twice-differentiable interpolation of sampled radial data.

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Natural cubic spline through `(x, y)`.
#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    /// `x` must be strictly increasing with at least two knots.
    pub fn natural(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        debug_assert!(n >= 2 && y.len() == n);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn eval(&self, t: f64) -> Jet {
        let i = segment(&self.x, t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        Jet { value, d1, d2 }
    }

    /// Exact integral of the spline over each knot interval.
    pub fn segment_integrals(&self) -> Vec<f64> {
        self.x
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let h = w[1] - w[0];
                0.5 * h * (self.y[i] + self.y[i + 1]) - h * h * h / 24.0 * (self.m[i] + self.m[i + 1])
            })
            .collect()
    }
}

/// Piecewise quintic Hermite interpolant matching value, slope and
/// curvature at every knot. C² across knots.
#[derive(Debug, Clone)]
pub(crate) struct QuinticHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl QuinticHermite {
    pub fn new(x: &[f64], y: &[f64], d1: &[f64], d2: &[f64]) -> Self {
        QuinticHermite {
            x: x.to_vec(),
            y: y.to_vec(),
            d1: d1.to_vec(),
            d2: d2.to_vec(),
        }
    }

    pub fn eval(&self, t: f64) -> Jet {
        let i = segment(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, p0, q0) = (self.y[i], h * self.d1[i], h * h * self.d2[i]);
        let (y1, p1, q1) = (self.y[i + 1], h * self.d1[i + 1], h * h * self.d2[i + 1]);
        let r0 = y1 - (y0 + p0 + 0.5 * q0);
        let r1 = p1 - (p0 + q0);
        let r2 = q1 - q0;
        let c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
        let c4 = -15.0 * r0 + 7.0 * r1 - r2;
        let c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
        let value = y0 + s * (p0 + s * (0.5 * q0 + s * (c3 + s * (c4 + s * c5))));
        let ds = p0 + s * (q0 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
        let dss = q0 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
        Jet {
            value,
            d1: ds / h,
            d2: dss / (h * h),
        }
    }
}

/// Index `i` of the knot interval `[x[i], x[i+1]]` holding `t`; clamps to
/// the first or last interval outside the knot range.
fn segment(x: &[f64], t: f64) -> usize {
    let i = x.partition_point(|&xi| xi <= t);
    i.saturating_sub(1).min(x.len() - 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_linear_data() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 1.0).collect();
        let s = CubicSpline::natural(&x, &y);
        for t in [0.0, 0.15, 1.37, 2.9, 3.0] {
            let j = s.eval(t);
            assert!((j.value - (2.0 * t - 1.0)).abs() < 1e-13);
            assert!((j.d1 - 2.0).abs() < 1e-12);
            assert!(j.d2.abs() < 1e-12);
        }
    }

    #[test]
    fn spline_integral_of_sine() {
        let x: Vec<f64> = (0..=400).map(|i| i as f64 * std::f64::consts::PI / 400.0).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let total: f64 = CubicSpline::natural(&x, &y).segment_integrals().iter().sum();
        assert!((total - 2.0).abs() < 1e-9);
    }

    #[test]
    fn quintic_hermite_exact_on_quintics() {
        let p = |t: f64| 1.0 + t - 2.0 * t.powi(3) + 0.5 * t.powi(5);
        let dp = |t: f64| 1.0 - 6.0 * t * t + 2.5 * t.powi(4);
        let ddp = |t: f64| -12.0 * t + 10.0 * t.powi(3);
        let x = [0.0, 0.7, 1.1, 2.0];
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let d1: Vec<f64> = x.iter().map(|&t| dp(t)).collect();
        let d2: Vec<f64> = x.iter().map(|&t| ddp(t)).collect();
        let q = QuinticHermite::new(&x, &y, &d1, &d2);
        for t in [0.1, 0.69, 0.9, 1.5, 1.99] {
            let j = q.eval(t);
            assert!((j.value - p(t)).abs() < 1e-12);
            assert!((j.d1 - dp(t)).abs() < 1e-11);
            assert!((j.d2 - ddp(t)).abs() < 1e-10);
        }
    }
}
