//! Bartlett-kernel long-run variance.

use crate::stats::mean;

/// `γ₀ + 2·Σ_{k=1..lag} (1 − k/(lag+1))·γ_k` with autocovariances divided by
/// `T`. Non-negative by construction of the Bartlett weights.
pub fn bartlett_lrv(x: &[f64], lag: usize) -> f64 {
    let t = x.len();
    if t == 0 {
        return 0.0;
    }
    let m = mean(x);
    let dev: Vec<f64> = x.iter().map(|v| v - m).collect();
    let gamma = |k: usize| dev[k..].iter().zip(&dev).map(|(a, b)| a * b).sum::<f64>() / t as f64;
    let mut v = gamma(0);
    for k in 1..=lag.min(t - 1) {
        v += 2.0 * (1.0 - k as f64 / (lag + 1) as f64) * gamma(k);
    }
    v.max(0.0)
}
