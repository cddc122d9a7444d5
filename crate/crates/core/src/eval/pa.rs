//! Unconditional test of equal predictive accuracy.

use statrs::distribution::{ContinuousCDF, Normal};

use super::hac::bartlett_lrv;
use super::EvalError;
use crate::stats::mean;

pub const MIN_T: usize = 20;

/// Forecast steps implied by a horizon in days, at least one.
pub fn steps_for_horizon(h_days: u32) -> usize {
    (h_days as usize).div_ceil(91).max(1)
}

/// One-sided p-value of `√T·d̄/σ̂` with a Bartlett long-run variance of lag
/// `steps − 1`; small values favour the model over the benchmark.
pub fn pa_test(differentials: &[f64], steps: usize) -> Result<f64, EvalError> {
    let t = differentials.len();
    if t < MIN_T {
        return Err(EvalError::TooFewObservations { needed: MIN_T, found: t });
    }
    if differentials.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite);
    }
    let sd = bartlett_lrv(differentials, steps.saturating_sub(1)).sqrt();
    let magnitude = differentials.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // A constant vector leaves only rounding error in the variance.
    if !(sd > 1e-12 * magnitude) {
        return Err(EvalError::ZeroVariance);
    }
    let stat = (t as f64).sqrt() * mean(differentials) / sd;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok(1.0 - normal.cdf(stat))
}
