#![allow(dead_code)]

use std::f64::consts::PI;

use warpspec::closedform::constants_nd;
use warpspec::{ModelConstants, SpectralParams, WarpTable, WarpedMetric};

pub fn model(n: usize, kappa: f64, lambda: f64) -> (WarpedMetric, SpectralParams, ModelConstants) {
    let p = SpectralParams::new(kappa, lambda).unwrap();
    let c = constants_nd(n, &p).unwrap();
    (WarpedMetric::model_sin(n, c.a, c.b).unwrap(), p, c)
}

/// `φ = sin t (1 - 0.1 sin² t)^{1/2}` on `[0, π]`, tabulated with exact
/// first and second derivative columns.
pub fn squashed_sphere(samples: usize) -> WarpedMetric {
    let t: Vec<f64> = (0..samples).map(|i| PI * i as f64 / (samples - 1) as f64).collect();
    let jet = |x: f64| {
        let (s, c) = x.sin_cos();
        let w = 1.0 - 0.1 * s * s;
        let r = w.sqrt();
        // w' = -0.2 s c, w'' = -0.2 (c² - s²)
        let dw = -0.2 * s * c;
        let ddw = -0.2 * (c * c - s * s);
        let dr = dw / (2.0 * r);
        let ddr = ddw / (2.0 * r) - dw * dw / (4.0 * r * r * r);
        [s * r, c * r + s * dr, -s * r + 2.0 * c * dr + s * ddr]
    };
    let jets: Vec<[f64; 3]> = t.iter().map(|&x| jet(x)).collect();
    let mut phi: Vec<f64> = jets.iter().map(|j| j[0]).collect();
    phi[0] = 0.0;
    phi[samples - 1] = 0.0;
    let table = WarpTable {
        t,
        phi,
        phi_prime: Some(jets.iter().map(|j| j[1]).collect()),
        phi_second: Some(jets.iter().map(|j| j[2]).collect()),
    };
    WarpedMetric::custom(3, table).unwrap()
}

pub fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
