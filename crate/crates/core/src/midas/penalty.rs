//! Plug-in penalty `λ = c·σ̂·√(2·log(p·n)/n)`.
//!
//! σ̂ starts at the standard deviation of `y` and is re-estimated twice from
//! the residuals of post-lasso OLS at the current λ.

use nalgebra::DMatrix;

use super::lasso::{lasso_fit, LassoOptions};
use super::ols::ols;
use crate::stats::sample_sd;

pub const DEFAULT_C: f64 = 1.1;
pub const SIGMA_ITERATIONS: usize = 2;

/// The penalty formula for a given noise level.
pub fn penalty_level(c: f64, sigma: f64, n: usize, p: usize) -> f64 {
    let n_f = n as f64;
    let pn = (p.max(1) * n) as f64;
    c * sigma * (2.0 * pn.ln() / n_f).sqrt()
}

/// Post-lasso residual standard deviation, with `n − |A| − 1` degrees of freedom.
fn residual_sigma(x: &DMatrix<f64>, y: &[f64], active: &[usize]) -> Option<f64> {
    let n = y.len();
    if active.len() + 2 >= n {
        return None;
    }
    let mut design = DMatrix::from_element(n, active.len() + 1, 1.0);
    for (k, &j) in active.iter().enumerate() {
        design.set_column(k + 1, &x.column(j));
    }
    let fit = ols(&design, y).ok()?;
    let rss: f64 = fit.residuals.iter().map(|e| e * e).sum();
    Some((rss / (n - active.len() - 1) as f64).sqrt())
}

/// Plug-in λ for standardized columns; deterministic.
pub fn plugin_penalty(x: &DMatrix<f64>, y: &[f64]) -> f64 {
    plugin_penalty_with(x, y, DEFAULT_C)
}

pub fn plugin_penalty_with(x: &DMatrix<f64>, y: &[f64], c: f64) -> f64 {
    let (n, p) = (x.nrows(), x.ncols());
    let mut sigma = sample_sd(y);
    let opts = LassoOptions::default();
    for _ in 0..SIGMA_ITERATIONS {
        let lambda = penalty_level(c, sigma, n, p);
        let Ok(fit) = lasso_fit(x, y, lambda, &opts) else { break };
        match residual_sigma(x, y, &fit.active) {
            Some(s) if s > 0.0 => sigma = s,
            _ => break,
        }
    }
    penalty_level(c, sigma, n, p)
}
