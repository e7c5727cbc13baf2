//! Univariate probit maximum likelihood.

use super::check_binary;
use crate::numerics::{
    maximize_with_grad, norm_cdf, normal_hazard, safe_ln, OptimResult, OptimizerConfig,
};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Probit MLE result.
#[derive(Debug, Clone)]
pub struct ProbitFit {
    pub beta: DVector<f64>,
    pub loglik: f64,
    /// Inverse observed information at the optimum.
    pub cov_beta: DMatrix<f64>,
    pub aic: f64,
    pub converged: bool,
    /// Set when the fit walked toward a perfectly separating hyperplane
    /// (log-likelihood within 1e-6 of zero); `converged` is false then.
    pub separation_suspected: bool,
    pub n: usize,
    pub k: usize,
}

pub(crate) fn probit_loglik(x: &DMatrix<f64>, y: &DVector<f64>, beta: &[f64]) -> f64 {
    let eta = x * DVector::from_column_slice(beta);
    let mut ll = 0.0;
    for (i, &e) in eta.iter().enumerate() {
        ll += if y[i] == 1.0 {
            safe_ln(norm_cdf(e))
        } else {
            safe_ln(norm_cdf(-e))
        };
    }
    ll
}

pub(crate) fn probit_grad(x: &DMatrix<f64>, y: &DVector<f64>, beta: &[f64]) -> Vec<f64> {
    let eta = x * DVector::from_column_slice(beta);
    let mut g = DVector::zeros(x.ncols());
    for (i, &e) in eta.iter().enumerate() {
        // d/d eta of the log-likelihood term, via the overflow-safe hazard.
        let score = if y[i] == 1.0 {
            normal_hazard(-e)
        } else {
            -normal_hazard(e)
        };
        g.axpy(score, &x.row(i).transpose(), 1.0);
    }
    g.as_slice().to_vec()
}

// Observed information sum_i w_i x_i x_i'; both weight terms are positive,
// reflecting global concavity of the probit log-likelihood.
fn observed_information(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let eta = x * beta;
    let k = x.ncols();
    let mut info = DMatrix::zeros(k, k);
    for (i, &e) in eta.iter().enumerate() {
        let w = if y[i] == 1.0 {
            let h = normal_hazard(-e);
            h * (h + e)
        } else {
            let h = normal_hazard(e);
            h * (h - e)
        };
        let xi = x.row(i).transpose();
        info.syger(w, &xi, &xi, 1.0);
    }
    info.fill_upper_triangle_with_lower_triangle();
    info
}

/// Fits P(y=1|x) = Φ(xβ) by quasi-Newton ascent with the analytic score.
pub fn fit_probit(x: &DMatrix<f64>, y: &DVector<f64>, config: &OptimizerConfig) -> Result<ProbitFit> {
    config.validate()?;
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
    check_binary("y", y)?;

    let result: OptimResult = maximize_with_grad(
        |b| probit_loglik(x, y, b),
        |b| probit_grad(x, y, b),
        &vec![0.0; k],
        config,
    );

    let beta = DVector::from_vec(result.argmax.clone());
    let loglik = result.value;

    // A separating hyperplane drives the likelihood to its supremum of 0.
    let separation_suspected = loglik > -1e-6;
    let converged = result.converged && !separation_suspected;

    let info = observed_information(x, y, &beta);
    let cov_beta = super::invert_information(info, converged)?;

    Ok(ProbitFit {
        aic: 2.0 * k as f64 - 2.0 * loglik,
        beta,
        loglik,
        cov_beta,
        converged,
        separation_suspected,
        n,
        k,
    })
}

/// Predicted success probabilities Φ(xβ̂) for new rows.
pub fn predict_probit(fit: &ProbitFit, x: &DMatrix<f64>) -> Result<DVector<f64>> {
    if x.ncols() != fit.k {
        return Err(Error::DimensionMismatch {
            what: "regressor columns",
            expected: fit.k,
            got: x.ncols(),
        });
    }
    let eta = x * &fit.beta;
    Ok(eta.map(norm_cdf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm_quantile;
    use approx::assert_abs_diff_eq;

    fn intercept_only(n: usize, ones: usize) -> (DMatrix<f64>, DVector<f64>) {
        let x = DMatrix::from_element(n, 1, 1.0);
        let y = DVector::from_fn(n, |i, _| f64::from(i < ones));
        (x, y)
    }

    #[test]
    fn intercept_only_balanced_gives_zero() {
        let (x, y) = intercept_only(100, 50);
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.beta[0], 0.0, epsilon = 1e-7);
    }

    #[test]
    fn intercept_only_inverts_the_cdf() {
        // Mean 0.8413 puts the MLE at Phi^{-1}(0.8413), about 1.0.
        let (x, y) = intercept_only(10000, 8413);
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        let expected = norm_quantile(0.8413);
        assert_abs_diff_eq!(fit.beta[0], expected, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.beta[0], 1.0, epsilon = 1e-3);
    }

    #[test]
    fn aic_identity_holds() {
        let (x, y) = intercept_only(200, 57);
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        assert_abs_diff_eq!(fit.aic, 2.0 - 2.0 * fit.loglik, epsilon = 1e-10);
    }

    #[test]
    fn single_class_outcome_is_hard_error() {
        let (x, y) = intercept_only(50, 0);
        assert!(matches!(
            fit_probit(&x, &y, &Default::default()),
            Err(Error::SingleClassOutcome(_))
        ));
    }

    #[test]
    fn non_binary_outcome_rejected() {
        let x = DMatrix::from_element(10, 1, 1.0);
        let mut y = DVector::from_element(10, 0.0);
        y[0] = 1.0;
        y[3] = 0.5;
        assert!(fit_probit(&x, &y, &Default::default()).is_err());
    }

    #[test]
    fn perfect_separation_flagged_not_converged() {
        // y = 1 exactly when x > 0: any steep enough slope fits perfectly.
        let n = 40;
        let x = DMatrix::from_fn(n, 2, |i, j| {
            if j == 0 {
                1.0
            } else {
                i as f64 - (n as f64 - 1.0) / 2.0
            }
        });
        let y = DVector::from_fn(n, |i, _| f64::from(x[(i, 1)] > 0.0));
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        assert!(fit.separation_suspected);
        assert!(!fit.converged);
    }

    #[test]
    fn predictions_are_cdf_values() {
        let (x, y) = intercept_only(100, 50);
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        let p = predict_probit(&fit, &x).unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-6);
        }
        // A row with linear predictor 1.96 scores 0.975.
        let mut fit2 = fit;
        fit2.beta[0] = 1.96;
        let p2 = predict_probit(&fit2, &DMatrix::from_element(1, 1, 1.0)).unwrap();
        assert_abs_diff_eq!(p2[0], 0.9750021048517795, epsilon = 1e-12);
    }

    #[test]
    fn predict_checks_dimensions() {
        let (x, y) = intercept_only(60, 20);
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        let wide = DMatrix::from_element(5, 2, 1.0);
        assert!(matches!(
            predict_probit(&fit, &wide),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prediction_monotone_in_positive_coefficient_regressor() {
        let n = 200;
        let x = DMatrix::from_fn(n, 2, |i, j| {
            if j == 0 {
                1.0
            } else {
                (i as f64 / n as f64 - 0.5) * 4.0
            }
        });
        // Planted positive slope with deterministic thresholds.
        let y = DVector::from_fn(n, |i, _| {
            let p = norm_cdf(-0.2 + 0.8 * x[(i, 1)]);
            f64::from((i as f64 * 0.618034) % 1.0 < p)
        });
        let fit = fit_probit(&x, &y, &Default::default()).unwrap();
        assert!(fit.beta[1] > 0.0);
        let probs = predict_probit(&fit, &x).unwrap();
        for w in probs.as_slice().windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }
}
