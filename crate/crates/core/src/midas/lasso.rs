//! Lasso by cyclic coordinate descent.
//!
//! Minimizes `(1/2n)‖y − b0 − Xβ‖² + λ‖β‖₁`. With an intercept, `y` and the
//! columns are centered first and `b0` is recovered afterwards.

use nalgebra::DMatrix;

use super::MidasError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// Stop when no coefficient moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    pub intercept: bool,
    /// Keep the objective value after every sweep.
    pub record_history: bool,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions {
            tol: 1e-8,
            max_sweeps: 100_000,
            intercept: true,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub beta: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// Indices of nonzero coefficients, ascending.
    pub active: Vec<usize>,
    pub objective: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective before the first sweep and after each sweep.
    pub history: Vec<f64>,
}

pub fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

fn check_finite(x: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<(), MidasError> {
    if x.nrows() != y.len() {
        return Err(MidasError::Shape(format!("X has {} rows, y has {}", x.nrows(), y.len())));
    }
    if y.len() < 2 {
        return Err(MidasError::Shape("lasso needs at least 2 rows".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(MidasError::NonFinite(format!("penalty {lambda}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(MidasError::NonFinite("lasso input".into()));
    }
    Ok(())
}

pub fn lasso_fit(x: &DMatrix<f64>, y: &[f64], lambda: f64, opts: &LassoOptions) -> Result<LassoFit, MidasError> {
    check_finite(x, y, lambda)?;
    let n = x.nrows();
    let p = x.ncols();
    let nf = n as f64;

    let (xc, col_means, y_mean) = if opts.intercept {
        let means: Vec<f64> = (0..p).map(|j| x.column(j).mean()).collect();
        let mut xc = x.clone();
        for (j, m) in means.iter().enumerate() {
            xc.column_mut(j).add_scalar_mut(-m);
        }
        (xc, means, y.iter().sum::<f64>() / nf)
    } else {
        (x.clone(), vec![0.0; p], 0.0)
    };
    let mut r: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let scale: Vec<f64> = (0..p).map(|j| xc.column(j).norm_squared() / nf).collect();

    let objective = |r: &[f64], beta: &[f64]| {
        r.iter().map(|v| v * v).sum::<f64>() / (2.0 * nf) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    };

    let mut beta = vec![0.0; p];
    let mut history = Vec::new();
    if opts.record_history {
        history.push(objective(&r, &beta));
    }
    let mut sweeps = 0;
    let mut converged = p == 0;
    while !converged && sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_delta = 0.0f64;
        for j in 0..p {
            if scale[j] <= 0.0 {
                continue;
            }
            let col = xc.column(j);
            let old = beta[j];
            let rho = col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / nf + scale[j] * old;
            let new = soft_threshold(rho, lambda) / scale[j];
            let delta = new - old;
            if delta != 0.0 {
                for (ri, xi) in r.iter_mut().zip(col.iter()) {
                    *ri -= xi * delta;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if opts.record_history {
            history.push(objective(&r, &beta));
        }
        converged = max_delta < opts.tol;
    }

    let intercept = if opts.intercept {
        y_mean - col_means.iter().zip(&beta).map(|(m, b)| m * b).sum::<f64>()
    } else {
        0.0
    };
    Ok(LassoFit {
        active: (0..p).filter(|&j| beta[j] != 0.0).collect(),
        objective: objective(&r, &beta),
        beta,
        intercept,
        lambda,
        sweeps,
        converged,
        history,
    })
}

/// Smallest penalty giving the empty model: `max_j |x_j'(y − ȳ)| / n`
/// (centered columns when `intercept`).
pub fn lambda_max(x: &DMatrix<f64>, y: &[f64], intercept: bool) -> f64 {
    let n = y.len() as f64;
    let ym = if intercept { y.iter().sum::<f64>() / n } else { 0.0 };
    (0..x.ncols())
        .map(|j| {
            let col = x.column(j);
            let cm = if intercept { col.mean() } else { 0.0 };
            (col.iter().zip(y).map(|(a, b)| (a - cm) * (b - ym)).sum::<f64>() / n).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest KKT violation: for active `j`, `|g_j − λ·sign(β_j)|`; for
/// inactive `j`, `max(0, |g_j| − λ)`, where `g_j = x_j'(y − b0 − Xβ)/n` on
/// centered columns.
pub fn kkt_violation(x: &DMatrix<f64>, y: &[f64], fit: &LassoFit, intercept: bool) -> f64 {
    let n = y.len();
    let nf = n as f64;
    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - fit.intercept - (0..x.ncols()).map(|j| x[(i, j)] * fit.beta[j]).sum::<f64>())
        .collect();
    (0..x.ncols())
        .map(|j| {
            let col = x.column(j);
            let cm = if intercept { col.mean() } else { 0.0 };
            let g = col.iter().zip(&resid).map(|(a, r)| (a - cm) * r).sum::<f64>() / nf;
            if fit.beta[j] != 0.0 {
                (g - fit.lambda * fit.beta[j].signum()).abs()
            } else {
                (g.abs() - fit.lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}
