//! Random designs shared by unit tests, integration tests and the
//! acceptance suite.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian_matrix<R: Rng>(n: usize, p: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(rng))
}

/// Gaussian columns centered and scaled to mean 0, `‖x_j‖²/n = 1`.
pub fn standardized_gaussian<R: Rng>(n: usize, p: usize, rng: &mut R) -> DMatrix<f64> {
    super::double_lasso::standardize_columns(&gaussian_matrix(n, p, rng))
}

/// Centered columns with `X'X/n = I`, from the QR factor of a centered
/// Gaussian matrix.
pub fn orthonormal_design<R: Rng>(n: usize, p: usize, rng: &mut R) -> DMatrix<f64> {
    let mut g = gaussian_matrix(n, p, rng);
    for j in 0..p {
        let m = g.column(j).mean();
        g.column_mut(j).add_scalar_mut(-m);
    }
    let q = g.qr().q();
    q.columns(0, p).into_owned() * (n as f64).sqrt()
}

/// Sparse design with five relevant controls:
/// `s = Xγ + v`, `y = η·s + Xβ + ε`, with `β`, `γ` nonzero on the first five
/// columns.
pub fn sparse_dgp<R: Rng>(n: usize, p: usize, eta: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>, DMatrix<f64>) {
    const BETA: [f64; 5] = [1.0, 0.8, 0.6, 0.4, 0.2];
    const GAMMA: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
    let x = gaussian_matrix(n, p, rng);
    let mut s = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let v: f64 = StandardNormal.sample(rng);
        let e: f64 = StandardNormal.sample(rng);
        let si = (0..5).map(|j| GAMMA[j] * x[(i, j)]).sum::<f64>() + v;
        let yi = eta * si + (0..5).map(|j| BETA[j] * x[(i, j)]).sum::<f64>() + e;
        s.push(si);
        y.push(yi);
    }
    (y, s, x)
}
