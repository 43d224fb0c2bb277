use nalgebra::{DMatrix, DVector};

use super::PanelData;
use crate::error::{Error, Result};

/// Relative size of the smallest pivot of the column-scaled design below
/// which it is treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares fit of `y1 ~ 1 + y0 + network`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Intercept, autoregressive and network coefficients, in that order.
    pub estimates: [f64; 3],
    pub std_errors: [f64; 3],
    pub residual_variance: f64,
    pub r_squared: f64,
    pub t_stats: [f64; 3],
    pub df: usize,
}

impl FitResult {
    pub fn intercept(&self) -> f64 {
        self.estimates[0]
    }

    pub fn gamma_hat(&self) -> f64 {
        self.estimates[1]
    }

    pub fn beta_hat(&self) -> f64 {
        self.estimates[2]
    }

    pub fn beta_se(&self) -> f64 {
        self.std_errors[2]
    }

    pub fn gamma_se(&self) -> f64 {
        self.std_errors[1]
    }
}

pub fn fit_ols(pd: &PanelData) -> Result<FitResult> {
    fit_design(&pd.y0, &pd.network_predictor, &pd.y1)
}

/// OLS with classical standard errors on the design `[1, y0, x]`.
pub fn fit_design(y0: &[f64], x: &[f64], y: &[f64]) -> Result<FitResult> {
    let n = y.len();
    if y0.len() != n || x.len() != n {
        return Err(Error::InvalidConfig("design columns differ in length".into()));
    }
    if n < 4 {
        return Err(Error::InvalidConfig(format!("need at least 4 observations, got {n}")));
    }
    let cols: [&[f64]; 3] = [&vec![1.0; n], y0, x];
    let scale: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    if let Some(k) = scale.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::CollinearDesign(format!("column {k} is zero or not finite")));
    }
    let design = DMatrix::from_fn(n, 3, |i, k| cols[k][i] / scale[k]);
    let qr = design.clone().qr();
    let r = qr.r();
    let pivots: Vec<f64> = (0..3).map(|k| r[(k, k)].abs()).collect();
    let top = pivots.iter().cloned().fold(0.0, f64::max);
    if pivots.iter().any(|&p| p <= RANK_TOLERANCE * top) {
        return Err(Error::CollinearDesign("design matrix is rank deficient".into()));
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let b = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::CollinearDesign("triangular solve failed".into()))?;
    let resid = &yv - &design * &b;
    let rss = resid.norm_squared();
    let df = n - 3;
    let s2 = rss / df as f64;
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| Error::CollinearDesign("triangular factor not invertible".into()))?;
    // (X'X)^-1 for the scaled design
    let cov = &r_inv * r_inv.transpose();

    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    let mut estimates = [0.0; 3];
    let mut std_errors = [0.0; 3];
    let mut t_stats = [0.0; 3];
    for k in 0..3 {
        estimates[k] = b[k] / scale[k];
        std_errors[k] = (s2 * cov[(k, k)]).sqrt() / scale[k];
        t_stats[k] = estimates[k] / std_errors[k];
    }
    Ok(FitResult {
        estimates,
        std_errors,
        residual_variance: s2,
        r_squared,
        t_stats,
        df,
    })
}
