//! Richardson extrapolation and observed convergence order on sequences of
//! approximations indexed by a mesh parameter.

use serde::{Deserialize, Serialize};

/// Result of extrapolating a sequence `v(h)` to `h → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: f64,
    /// `|value - finest|`, used as the error bar of the extrapolation.
    pub error: f64,
    /// Observed order from the three finest levels, when available and well defined.
    pub observed_order: Option<f64>,
}

/// One Richardson step assuming `v(h) = v* + C h^order`.
pub fn richardson(h_coarse: f64, v_coarse: f64, h_fine: f64, v_fine: f64, order: f64) -> f64 {
    let r = (h_coarse / h_fine).powf(order);
    v_fine + (v_fine - v_coarse) / (r - 1.0)
}

/// Order `p` such that `(v1 - v2)/(v2 - v3) = (h1^p - h2^p)/(h2^p - h3^p)`,
/// for `h1 > h2 > h3`. `None` when the differences do not shrink
/// monotonically or sit at round-off level.
pub fn observed_order(h: [f64; 3], v: [f64; 3]) -> Option<f64> {
    let d12 = v[0] - v[1];
    let d23 = v[1] - v[2];
    let noise = 64.0 * f64::EPSILON * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if d23.abs() <= noise || d12.abs() <= noise || d12.signum() != d23.signum() {
        return None;
    }
    let ratio = d12 / d23;
    let model = |p: f64| (h[0].powf(p) - h[1].powf(p)) / (h[1].powf(p) - h[2].powf(p));
    // model(p) is increasing in p for a decreasing mesh sequence
    let (mut lo, mut hi) = (1e-3, 16.0);
    if !(model(lo) < ratio && ratio < model(hi)) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Extrapolates a sequence ordered from coarsest to finest mesh with a
/// fixed assumed order. The observed order is reported alongside.
pub fn extrapolate_fixed_order(h: &[f64], v: &[f64], order: f64) -> Extrapolated {
    let n = v.len();
    debug_assert!(n == h.len() && n >= 1);
    if n == 1 {
        return Extrapolated {
            value: v[0],
            error: 0.0,
            observed_order: None,
        };
    }
    let value = richardson(h[n - 2], v[n - 2], h[n - 1], v[n - 1], order);
    let observed_order = (n >= 3)
        .then(|| observed_order([h[n - 3], h[n - 2], h[n - 1]], [v[n - 3], v[n - 2], v[n - 1]]))
        .flatten();
    Extrapolated {
        value,
        error: (value - v[n - 1]).abs(),
        observed_order,
    }
}

/// Extrapolates with the order estimated from the three finest levels
/// (Aitken-type). Falls back to the finest value with a conservative error
/// bar when no order can be estimated.
pub fn extrapolate_observed_order(h: &[f64], v: &[f64]) -> Extrapolated {
    let n = v.len();
    debug_assert!(n == h.len() && n >= 1);
    if n < 3 {
        let error = if n == 2 { (v[1] - v[0]).abs() } else { 0.0 };
        return Extrapolated {
            value: v[n - 1],
            error,
            observed_order: None,
        };
    }
    let hs = [h[n - 3], h[n - 2], h[n - 1]];
    let vs = [v[n - 3], v[n - 2], v[n - 1]];
    match observed_order(hs, vs) {
        Some(p) => {
            let value = richardson(hs[1], vs[1], hs[2], vs[2], p);
            Extrapolated {
                value,
                error: (value - vs[2]).abs(),
                observed_order: Some(p),
            }
        }
        None => Extrapolated {
            value: vs[2],
            error: (vs[1] - vs[2]).abs(),
            observed_order: None,
        },
    }
}
