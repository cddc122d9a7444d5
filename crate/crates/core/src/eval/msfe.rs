//! Mean squared forecast error ratios.

use std::collections::BTreeMap;

use super::{EvalError, ForecastRecord};
use crate::calendar::Period;

pub const MIN_ALIGNED: usize = 8;

/// `MSFE(model) / MSFE(benchmark)` over paired forecast errors.
pub fn msfe_ratio_from_errors(model: &[f64], benchmark: &[f64]) -> Result<f64, EvalError> {
    if model.len() != benchmark.len() {
        return Err(EvalError::Misaligned(format!("{} model errors, {} benchmark errors", model.len(), benchmark.len())));
    }
    if model.len() < MIN_ALIGNED {
        return Err(EvalError::TooFewObservations {
            needed: MIN_ALIGNED,
            found: model.len(),
        });
    }
    let sq = |e: &[f64]| e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
    let b = sq(benchmark);
    if b == 0.0 {
        return Err(EvalError::ZeroBenchmark);
    }
    Ok(sq(model) / b)
}

/// Ratio at one horizon over the targets both models forecast.
pub fn msfe_ratio(records: &[ForecastRecord], model: &str, benchmark: &str, country: &str, horizon: u32) -> Result<f64, EvalError> {
    let errors = |name: &str| -> BTreeMap<Period, f64> {
        records
            .iter()
            .filter(|r| r.model == name && r.country == country && r.horizon == horizon)
            .filter_map(|r| r.error().map(|e| (r.target, e)))
            .collect()
    };
    let m = errors(model);
    let b = errors(benchmark);
    let (mut me, mut be) = (Vec::new(), Vec::new());
    for (t, e) in &m {
        if let Some(eb) = b.get(t) {
            me.push(*e);
            be.push(*eb);
        }
    }
    msfe_ratio_from_errors(&me, &be)
}
