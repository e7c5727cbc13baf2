//! Bivariate probit maximum likelihood.
//!
//! Two probit equations whose latent errors are jointly standard normal
//! with correlation ρ. Each observation contributes one of four quadrant
//! probabilities; with q = 2y − 1 the contribution collapses to
//! `ln Φ₂(q₁·x₁β₁, q₂·x₂β₂, q₁q₂ρ)`, which reproduces the usual sign
//! pattern (−ρ on the mixed-outcome terms). The correlation is searched
//! through its unconstrained transform athrho = atanh(ρ).

use super::{check_binary, invert_information};
use crate::numerics::{
    bvn_cdf, bvn_pdf, maximize_with_grad, norm_cdf, norm_pdf, safe_ln, OptimizerConfig, PROB_FLOOR,
};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

// Keeps the gradient finite if the search saturates tanh.
const RHO_GUARD: f64 = 1.0 - 1e-12;

/// Joint MLE of (β₁, β₂, athrho).
#[derive(Debug, Clone)]
pub struct BivariateProbitFit {
    pub beta1: DVector<f64>,
    pub beta2: DVector<f64>,
    /// Unconstrained correlation parameter; ρ = tanh(athrho).
    pub athrho: f64,
    pub rho: f64,
    pub loglik: f64,
    /// Inverse observed information over (β₁, β₂, athrho), or over the
    /// slopes only when the fit pinned athrho.
    pub cov_params: DMatrix<f64>,
    pub aic: f64,
    pub converged: bool,
    /// |ρ̂| indistinguishable from 1 — estimates sit on the boundary.
    pub boundary_rho: bool,
    /// True when athrho was held fixed rather than estimated.
    pub athrho_fixed: bool,
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
}

impl BivariateProbitFit {
    /// Number of estimated parameters (athrho counts only when free).
    pub fn n_params(&self) -> usize {
        self.k1 + self.k2 + usize::from(!self.athrho_fixed)
    }

    /// Standard error of athrho from the covariance block, when estimated.
    pub fn se_athrho(&self) -> Option<f64> {
        if self.athrho_fixed {
            return None;
        }
        let idx = self.k1 + self.k2;
        let v = self.cov_params[(idx, idx)];
        (v >= 0.0).then(|| v.sqrt())
    }

    /// Delta-method standard error of ρ: (1 − ρ²) · se(athrho).
    pub fn se_rho(&self) -> Option<f64> {
        self.se_athrho().map(|se| (1.0 - self.rho * self.rho) * se)
    }
}

struct Quadrants<'a> {
    x1: &'a DMatrix<f64>,
    y1: &'a DVector<f64>,
    x2: &'a DMatrix<f64>,
    y2: &'a DVector<f64>,
}

impl<'a> Quadrants<'a> {
    fn loglik(&self, beta1: &DVector<f64>, beta2: &DVector<f64>, rho: f64) -> f64 {
        let eta1 = self.x1 * beta1;
        let eta2 = self.x2 * beta2;
        let mut ll = 0.0;
        for i in 0..eta1.len() {
            let q1 = 2.0 * self.y1[i] - 1.0;
            let q2 = 2.0 * self.y2[i] - 1.0;
            let p = bvn_cdf(q1 * eta1[i], q2 * eta2[i], q1 * q2 * rho);
            ll += safe_ln(p);
        }
        ll
    }

    fn grad(
        &self,
        beta1: &DVector<f64>,
        beta2: &DVector<f64>,
        rho: f64,
        with_rho: bool,
    ) -> Vec<f64> {
        let (k1, k2) = (self.x1.ncols(), self.x2.ncols());
        let eta1 = self.x1 * beta1;
        let eta2 = self.x2 * beta2;
        let mut g = vec![0.0; k1 + k2 + usize::from(with_rho)];
        let sc = (1.0 - rho * rho).sqrt();
        for i in 0..eta1.len() {
            let q1 = 2.0 * self.y1[i] - 1.0;
            let q2 = 2.0 * self.y2[i] - 1.0;
            let w1 = q1 * eta1[i];
            let w2 = q2 * eta2[i];
            let r = q1 * q2 * rho;
            let p = bvn_cdf(w1, w2, r).max(PROB_FLOOR);
            // dΦ₂/dw1 = φ(w1)·Φ((w2 − r·w1)/√(1−r²)), and symmetrically.
            let s1 = q1 * norm_pdf(w1) * norm_cdf((w2 - r * w1) / sc) / p;
            let s2 = q2 * norm_pdf(w2) * norm_cdf((w1 - r * w2) / sc) / p;
            for j in 0..k1 {
                g[j] += s1 * self.x1[(i, j)];
            }
            for j in 0..k2 {
                g[k1 + j] += s2 * self.x2[(i, j)];
            }
            if with_rho {
                // dΦ₂/dρ is the bivariate density at the anchor point.
                g[k1 + k2] += q1 * q2 * bvn_pdf(w1, w2, r) / p;
            }
        }
        g
    }
}

fn split_params(params: &[f64], k1: usize, k2: usize) -> (DVector<f64>, DVector<f64>) {
    (
        DVector::from_column_slice(&params[..k1]),
        DVector::from_column_slice(&params[k1..k1 + k2]),
    )
}

fn guarded_rho(athrho: f64) -> f64 {
    athrho.tanh().clamp(-RHO_GUARD, RHO_GUARD)
}

/// Joint log-likelihood at `params = [β₁ | β₂ | athrho]`.
///
/// Exposed separately so the likelihood surface can be probed without
/// fitting. Quadrant probabilities are floored at [`PROB_FLOOR`] before
/// the log, so the value is never NaN for finite inputs.
pub fn biprobit_loglik(
    params: &[f64],
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
) -> f64 {
    let (k1, k2) = (x1.ncols(), x2.ncols());
    assert_eq!(params.len(), k1 + k2 + 1, "params must be [b1|b2|athrho]");
    let (beta1, beta2) = split_params(params, k1, k2);
    let rho = guarded_rho(params[k1 + k2]);
    Quadrants { x1, y1, x2, y2 }.loglik(&beta1, &beta2, rho)
}

/// Analytic gradient of [`biprobit_loglik`] in the same parameter order.
pub fn biprobit_loglik_grad(
    params: &[f64],
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
) -> Vec<f64> {
    let (k1, k2) = (x1.ncols(), x2.ncols());
    assert_eq!(params.len(), k1 + k2 + 1, "params must be [b1|b2|athrho]");
    let (beta1, beta2) = split_params(params, k1, k2);
    let athrho = params[k1 + k2];
    let rho = guarded_rho(athrho);
    let mut g = Quadrants { x1, y1, x2, y2 }.grad(&beta1, &beta2, rho, true);
    // Chain rule through ρ = tanh(athrho).
    let last = g.len() - 1;
    g[last] *= 1.0 - rho * rho;
    g
}

fn validate_pair(
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
) -> Result<()> {
    let n = x1.nrows();
    for (what, got) in [
        ("first outcome length", y1.len()),
        ("second design rows", x2.nrows()),
        ("second outcome length", y2.len()),
    ] {
        if got != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                got,
            });
        }
    }
    check_binary("y1", y1)?;
    check_binary("y2", y2)?;
    let k = x1.ncols() + x2.ncols() + 1;
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    Ok(())
}

// Observed information by central differences of the analytic gradient.
fn numeric_information<G: Fn(&[f64]) -> Vec<f64>>(grad: &G, theta: &[f64]) -> DMatrix<f64> {
    let k = theta.len();
    let mut h = DMatrix::zeros(k, k);
    let mut work = theta.to_vec();
    for j in 0..k {
        let step = 1e-5 * theta[j].abs().max(1.0);
        work[j] = theta[j] + step;
        let up = grad(&work);
        work[j] = theta[j] - step;
        let down = grad(&work);
        work[j] = theta[j];
        for i in 0..k {
            h[(i, j)] += (up[i] - down[i]) / (2.0 * step);
        }
    }
    // -(H + H')/2
    let sym = (&h + h.transpose()) * 0.5;
    -sym
}

/// Fits the bivariate probit by quasi-Newton ascent, warm-started from the
/// two univariate probit fits with athrho = 0.
pub fn fit_biprobit(
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
    config: &OptimizerConfig,
) -> Result<BivariateProbitFit> {
    config.validate()?;
    validate_pair(x1, y1, x2, y2)?;
    let (k1, k2) = (x1.ncols(), x2.ncols());

    let start1 = super::probit::fit_probit(x1, y1, config)?;
    let start2 = super::probit::fit_probit(x2, y2, config)?;
    let mut init: Vec<f64> = Vec::with_capacity(k1 + k2 + 1);
    init.extend(start1.beta.iter());
    init.extend(start2.beta.iter());
    init.push(0.0);

    let obj = |p: &[f64]| biprobit_loglik(p, x1, y1, x2, y2);
    let grad = |p: &[f64]| biprobit_loglik_grad(p, x1, y1, x2, y2);
    let result = maximize_with_grad(obj, grad, &init, config);

    let (beta1, beta2) = split_params(&result.argmax, k1, k2);
    let athrho = result.argmax[k1 + k2];
    let rho = athrho.tanh();

    let info = numeric_information(&grad, &result.argmax);
    let cov_params = invert_information(info, result.converged)?;

    let k_total = (k1 + k2 + 1) as f64;
    Ok(BivariateProbitFit {
        beta1,
        beta2,
        athrho,
        rho,
        loglik: result.value,
        cov_params,
        aic: 2.0 * k_total - 2.0 * result.value,
        converged: result.converged,
        boundary_rho: rho.abs() > 0.9999,
        athrho_fixed: false,
        n: x1.nrows(),
        k1,
        k2,
    })
}

/// Fits only the slope vectors with athrho pinned at a fixed value; at
/// zero this reproduces the two univariate probit fits.
pub fn fit_biprobit_fixed_athrho(
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
    athrho: f64,
    config: &OptimizerConfig,
) -> Result<BivariateProbitFit> {
    config.validate()?;
    validate_pair(x1, y1, x2, y2)?;
    if !athrho.is_finite() {
        return Err(Error::InvalidParameter("athrho must be finite".into()));
    }
    let (k1, k2) = (x1.ncols(), x2.ncols());
    let rho = guarded_rho(athrho);
    let quad = Quadrants { x1, y1, x2, y2 };

    let obj = |p: &[f64]| {
        let (b1, b2) = split_params(p, k1, k2);
        quad.loglik(&b1, &b2, rho)
    };
    let grad = |p: &[f64]| {
        let (b1, b2) = split_params(p, k1, k2);
        quad.grad(&b1, &b2, rho, false)
    };
    let result = maximize_with_grad(&obj, &grad, &vec![0.0; k1 + k2], config);

    let (beta1, beta2) = split_params(&result.argmax, k1, k2);
    let info = numeric_information(&grad, &result.argmax);
    let cov_params = invert_information(info, result.converged)?;

    let k_total = (k1 + k2) as f64;
    Ok(BivariateProbitFit {
        beta1,
        beta2,
        athrho,
        rho: athrho.tanh(),
        loglik: result.value,
        cov_params,
        aic: 2.0 * k_total - 2.0 * result.value,
        converged: result.converged,
        boundary_rho: athrho.tanh().abs() > 0.9999,
        athrho_fixed: true,
        n: x1.nrows(),
        k1,
        k2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::fit_probit;
    use crate::numerics::numeric_gradient;
    use approx::assert_abs_diff_eq;

    // Tiny deterministic design shared by several tests.
    fn hand_data() -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let x1 = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, 1.0, -1.0, 1.0, 2.0, 1.0, 0.0]);
        let y1 = DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0]);
        let x2 = DMatrix::from_row_slice(4, 2, &[1.0, -0.5, 1.0, 1.5, 1.0, 0.25, 1.0, -2.0]);
        let y2 = DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]);
        (x1, y1, x2, y2)
    }

    #[test]
    fn all_joint_successes_at_zero_params() {
        let x = DMatrix::from_element(5, 1, 1.0);
        let ones = DVector::from_element(5, 1.0);
        let params = [0.0, 0.0, 0.0];
        let ll = biprobit_loglik(&params, &x, &ones, &x, &ones);
        assert_abs_diff_eq!(ll, 5.0 * 0.25_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn zero_rho_factorizes_into_univariate_logliks() {
        let (x1, y1, x2, y2) = hand_data();
        let params = [0.3, -0.7, 0.1, 0.9, 0.0];
        let joint = biprobit_loglik(&params, &x1, &y1, &x2, &y2);
        let ll1 = super::super::probit::probit_loglik(&x1, &y1, &params[..2]);
        let ll2 = super::super::probit::probit_loglik(&x2, &y2, &params[2..4]);
        assert_abs_diff_eq!(joint, ll1 + ll2, epsilon = 1e-12);
    }

    #[test]
    fn hand_dataset_matches_term_by_term_quadrants() {
        let (x1, y1, x2, y2) = hand_data();
        let (b1, b2, rho) = ([0.2, 0.4], [-0.1, 0.3], 0.35_f64);
        let params = [b1[0], b1[1], b2[0], b2[1], rho.atanh()];
        // Direct evaluation with the printed sign pattern: +ρ on the
        // concordant terms, −ρ on the mixed ones.
        let mut expected = 0.0;
        for i in 0..4 {
            let e1 = b1[0] * x1[(i, 0)] + b1[1] * x1[(i, 1)];
            let e2 = b2[0] * x2[(i, 0)] + b2[1] * x2[(i, 1)];
            let p = match (y1[i] == 1.0, y2[i] == 1.0) {
                (true, true) => bvn_cdf(e1, e2, rho),
                (false, true) => bvn_cdf(-e1, e2, -rho),
                (true, false) => bvn_cdf(e1, -e2, -rho),
                (false, false) => bvn_cdf(-e1, -e2, rho),
            };
            expected += p.ln();
        }
        let got = biprobit_loglik(&params, &x1, &y1, &x2, &y2);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-9);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let (x1, y1, x2, y2) = hand_data();
        let obj = |p: &[f64]| biprobit_loglik(p, &x1, &y1, &x2, &y2);
        for params in [
            [0.2, 0.4, -0.1, 0.3, 0.3],
            [0.0, 0.0, 0.0, 0.0, 0.0],
            [-0.5, 1.0, 0.7, -0.2, -0.8],
        ] {
            let analytic = biprobit_loglik_grad(&params, &x1, &y1, &x2, &y2);
            let numeric = numeric_gradient(&obj, &params, 1e-6);
            for (a, n) in analytic.iter().zip(numeric.iter()) {
                assert_abs_diff_eq!(a, n, epsilon = 1e-6 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn pinned_zero_rho_reproduces_univariate_fits() {
        // Deterministic covariates, planted thresholds.
        let n = 400;
        let x1 = DMatrix::from_fn(n, 2, |i, j| {
            if j == 0 {
                1.0
            } else {
                ((i * 37 % 101) as f64 / 50.0) - 1.0
            }
        });
        let x2 = DMatrix::from_fn(n, 2, |i, j| {
            if j == 0 {
                1.0
            } else {
                ((i * 61 % 97) as f64 / 48.0) - 1.0
            }
        });
        let y1 = DVector::from_fn(n, |i, _| {
            f64::from(((i * 17 + 3) % 29) as f64 / 29.0 < norm_cdf(-0.3 + 0.9 * x1[(i, 1)]))
        });
        let y2 = DVector::from_fn(n, |i, _| {
            f64::from(((i * 23 + 11) % 31) as f64 / 31.0 < norm_cdf(0.2 - 0.6 * x2[(i, 1)]))
        });
        let cfg = OptimizerConfig {
            gradient_tolerance: 1e-9,
            ..Default::default()
        };
        let joint = fit_biprobit_fixed_athrho(&x1, &y1, &x2, &y2, 0.0, &cfg).unwrap();
        let fit1 = fit_probit(&x1, &y1, &cfg).unwrap();
        let fit2 = fit_probit(&x2, &y2, &cfg).unwrap();
        for (a, b) in joint.beta1.iter().zip(fit1.beta.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        for (a, b) in joint.beta2.iter().zip(fit2.beta.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        assert!(joint.athrho_fixed);
        assert!(joint.se_athrho().is_none());
    }

    #[test]
    fn aic_identity() {
        // Non-separable repeated patterns (outcomes are not monotone in
        // the regressor), so the joint MLE is interior and well-behaved.
        let xv1 = [-1.0, 0.5, 2.0, 3.0];
        let yv1 = [0.0, 1.0, 1.0, 0.0];
        let xv2 = [-2.0, -0.5, 0.25, 1.5];
        let yv2 = [1.0, 0.0, 1.0, 0.0];
        let reps = 30;
        let big_x1 = DMatrix::from_fn(4 * reps, 2, |i, j| if j == 0 { 1.0 } else { xv1[i % 4] });
        let big_x2 = DMatrix::from_fn(4 * reps, 2, |i, j| if j == 0 { 1.0 } else { xv2[i % 4] });
        let big_y1 = DVector::from_fn(4 * reps, |i, _| yv1[i % 4]);
        let big_y2 = DVector::from_fn(4 * reps, |i, _| yv2[i % 4]);
        let fit = fit_biprobit(&big_x1, &big_y1, &big_x2, &big_y2, &Default::default()).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.aic, 2.0 * 5.0 - 2.0 * fit.loglik, epsilon = 1e-10);
        assert_eq!(fit.rho, fit.athrho.tanh());
        assert!(fit.se_rho().unwrap() > 0.0);
    }

    #[test]
    fn dimension_and_class_validation() {
        let (x1, y1, x2, _) = hand_data();
        let short = DVector::from_vec(vec![1.0, 0.0]);
        assert!(fit_biprobit(&x1, &y1, &x2, &short, &Default::default()).is_err());
        let all_ones = DVector::from_element(4, 1.0);
        assert!(matches!(
            fit_biprobit(&x1, &y1, &x2, &all_ones, &Default::default()),
            Err(Error::SingleClassOutcome(_))
        ));
    }
}
