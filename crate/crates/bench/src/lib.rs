//! Fixtures shared by the benchmarks in `benches/`.

use warpspec::closedform::constants_nd;
use warpspec::{SpectralParams, WarpedMetric};

/// Model metric and parameters for `(n, κ, Λ)`.
pub fn model(n: usize, kappa: f64, lambda: f64) -> (WarpedMetric, SpectralParams) {
    let p = SpectralParams::new(kappa, lambda).expect("valid parameters");
    let c = constants_nd(n, &p).expect("valid constants");
    (WarpedMetric::model_sin(n, c.a, c.b).expect("valid model"), p)
}
