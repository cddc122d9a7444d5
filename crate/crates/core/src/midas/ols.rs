//! Least squares via QR with HC1 robust covariance.

use nalgebra::{DMatrix, DVector};

use super::MidasError;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub residuals: Vec<f64>,
    /// HC1 standard errors, one per coefficient.
    pub robust_se: Vec<f64>,
}

impl OlsFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.coef.iter().zip(row).map(|(b, x)| b * x).sum()
    }
}

/// Fits `y = Xb` (include a column of ones for an intercept).
pub fn ols(x: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit, MidasError> {
    let n = x.nrows();
    let k = x.ncols();
    if n != y.len() {
        return Err(MidasError::Shape(format!("X has {n} rows, y has {}", y.len())));
    }
    if n <= k {
        return Err(MidasError::Shape(format!("OLS needs more rows ({n}) than columns ({k})")));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= 1e-10 * max_diag.max(1e-300)) {
        return Err(MidasError::Singular);
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or(MidasError::Singular)?;
    let fitted = x * &coef;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();

    // (X'X)^{-1} = R^{-1} R^{-T}
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(MidasError::Singular)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let mut meat = DMatrix::zeros(k, k);
    for i in 0..n {
        let row = x.row(i);
        let e2 = residuals[i] * residuals[i];
        for a in 0..k {
            let ra = row[a] * e2;
            for b in 0..k {
                meat[(a, b)] += ra * row[b];
            }
        }
    }
    let cov = &xtx_inv * meat * &xtx_inv * (n as f64 / (n - k) as f64);
    Ok(OlsFit {
        coef: coef.iter().copied().collect(),
        residuals,
        robust_se: (0..k).map(|i| cov[(i, i)].max(0.0).sqrt()).collect(),
    })
}
