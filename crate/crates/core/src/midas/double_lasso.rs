//! Post-double-selection inference on a focal regressor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::lasso::{lasso_fit, LassoOptions};
use super::ols::ols;
use super::penalty::plugin_penalty_with;
use super::MidasError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleLassoOptions {
    /// Constant `c` in the plug-in penalty.
    pub penalty_c: f64,
}

impl Default for DoubleLassoOptions {
    fn default() -> Self {
        DoubleLassoOptions {
            penalty_c: super::penalty::DEFAULT_C,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleLassoResult {
    pub eta_hat: f64,
    pub std_err: f64,
    pub p_value: f64,
    /// Controls selected by the outcome lasso.
    pub selected_y: Vec<usize>,
    /// Controls selected by the focal-regressor lasso.
    pub selected_s: Vec<usize>,
    /// Union of both, ascending.
    pub selected: Vec<usize>,
    pub n: usize,
}

/// Columns rescaled to mean 0, population sd 1; constant columns become zero.
pub fn standardize_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for j in 0..x.ncols() {
        let mut col = out.column_mut(j);
        let m = col.mean();
        col.add_scalar_mut(-m);
        let sd = (col.norm_squared() / n).sqrt();
        if sd > 0.0 {
            col /= sd;
        }
    }
    out
}

pub fn normal_two_sided_p(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * normal.cdf(-z.abs())).clamp(0.0, 1.0)
}

/// Active set of the lasso of `target` on standardized `xs` at the plug-in
/// penalty.
pub fn select_controls(xs: &DMatrix<f64>, target: &[f64], penalty_c: f64) -> Result<Vec<usize>, MidasError> {
    if xs.ncols() == 0 {
        return Ok(Vec::new());
    }
    let lambda = plugin_penalty_with(xs, target, penalty_c);
    Ok(lasso_fit(xs, target, lambda, &LassoOptions::default())?.active)
}

/// Lasso of `y` on `X` (set A), lasso of `s` on `X` (set B), then OLS of `y`
/// on `[1, s, X_{A∪B}]` with HC1 errors and a two-sided normal p-value.
pub fn double_lasso(y: &[f64], s: &[f64], x: &DMatrix<f64>, opts: &DoubleLassoOptions) -> Result<DoubleLassoResult, MidasError> {
    let n = y.len();
    if s.len() != n || x.nrows() != n {
        return Err(MidasError::Shape(format!(
            "y has {n} rows, s {}, X {}",
            s.len(),
            x.nrows()
        )));
    }
    let xs = standardize_columns(x);
    let selected_y = select_controls(&xs, y, opts.penalty_c)?;
    let selected_s = select_controls(&xs, s, opts.penalty_c)?;
    let mut selected: Vec<usize> = selected_y.iter().chain(&selected_s).copied().collect();
    selected.sort_unstable();
    selected.dedup();
    if selected.len() + 2 >= n {
        return Err(MidasError::Saturated {
            selected: selected.len(),
            n,
        });
    }

    let mut design = DMatrix::from_element(n, selected.len() + 2, 1.0);
    design.set_column(1, &nalgebra::DVector::from_column_slice(s));
    for (k, &j) in selected.iter().enumerate() {
        design.set_column(k + 2, &xs.column(j));
    }
    let fit = ols(&design, y)?;
    let eta_hat = fit.coef[1];
    let std_err = fit.robust_se[1];
    if !(std_err > 0.0) {
        return Err(MidasError::Singular);
    }
    Ok(DoubleLassoResult {
        eta_hat,
        std_err,
        p_value: normal_two_sided_p(eta_hat / std_err),
        selected_y,
        selected_s,
        selected,
        n,
    })
}
