//! Ordinary least squares via QR.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Least-squares fit of a single equation.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    /// Residual sum of squares.
    pub rss: f64,
    /// Unbiased error-variance estimate, rss / (n - k).
    pub sigma2: f64,
    /// sigma2 * (X'X)^{-1}.
    pub cov_beta: DMatrix<f64>,
    pub n: usize,
    pub k: usize,
}

/// Solves min ||y - Xb|| through the thin QR factorization; the explicit
/// normal-equations inverse is never formed.
pub fn fit_ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            what: "outcome length",
            expected: n,
            got: y.len(),
        });
    }
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }

    let qr = x.clone().qr();
    let r = qr.r();
    // |r_ii| near zero relative to the largest marks a dependent column.
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0_f64, f64::max);
    let mut bad = Vec::new();
    for i in 0..k {
        if r[(i, i)].abs() <= 1e-10 * max_diag.max(f64::MIN_POSITIVE) {
            bad.push(format!("column {i}"));
        }
    }
    if !bad.is_empty() {
        return Err(Error::RankDeficient(bad));
    }

    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(vec!["design".into()]))?;

    let fitted = x * &beta;
    let residuals = y - fitted;
    let rss = residuals.dot(&residuals);
    let sigma2 = rss / (n - k) as f64;

    // (X'X)^{-1} = R^{-1} R^{-T}
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::RankDeficient(vec!["design".into()]))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let cov_beta = xtx_inv * sigma2;

    Ok(OlsFit {
        beta,
        residuals,
        rss,
        sigma2,
        cov_beta,
        n,
        k,
    })
}
