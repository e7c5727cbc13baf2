//! Two-equation SUR system estimated by feasible generalized least squares.
//!
//! Stage one fits each equation by OLS; the residual cross-products give
//! the 2×2 error covariance Σ̂ (denominator 1/N). Stage two solves the
//! stacked GLS normal equations exploiting the Σ̂ ⊗ I structure — the
//! 2N×2N weight matrix is never materialized, only the k×k blocks
//! sᵃᵇ·Xₐ'X_b with sᵃᵇ the entries of Σ̂⁻¹.

use super::ols::{fit_ols, OlsFit};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Default)]
pub struct SureOptions {
    /// Divide residual moments by degrees of freedom instead of N
    /// (√((N−k₁)(N−k₂)) on the cross term).
    pub dof_adjust: bool,
    /// Zero the off-diagonal of Σ̂ before stage two; the system then
    /// decouples and stage two returns the stage-one estimates exactly.
    pub force_diagonal: bool,
}

/// Feasible GLS result for the stacked two-equation system.
#[derive(Debug, Clone)]
pub struct SureFit {
    pub beta1: DVector<f64>,
    pub beta2: DVector<f64>,
    /// Estimated residual covariance [[σ₁₁, σ₁₂], [σ₁₂, σ₂₂]].
    pub sigma: [[f64; 2]; 2],
    /// Cross-equation residual correlation σ₁₂/√(σ₁₁σ₂₂).
    pub resid_corr: f64,
    pub stage1_fit1: OlsFit,
    pub stage1_fit2: OlsFit,
    /// (X'Ω⁻¹X)⁻¹ over the stacked coefficient vector.
    pub cov_beta: DMatrix<f64>,
    pub n: usize,
}

pub fn fit_sure(
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
) -> Result<SureFit> {
    fit_sure_opts(x1, y1, x2, y2, &SureOptions::default())
}

pub fn fit_sure_opts(
    x1: &DMatrix<f64>,
    y1: &DVector<f64>,
    x2: &DMatrix<f64>,
    y2: &DVector<f64>,
    options: &SureOptions,
) -> Result<SureFit> {
    let n = x1.nrows();
    if x2.nrows() != n {
        return Err(Error::DimensionMismatch {
            what: "second design rows",
            expected: n,
            got: x2.nrows(),
        });
    }
    let stage1_fit1 = fit_ols(x1, y1)?;
    let stage1_fit2 = fit_ols(x2, y2)?;
    let (k1, k2) = (x1.ncols(), x2.ncols());

    let e1 = &stage1_fit1.residuals;
    let e2 = &stage1_fit2.residuals;
    let nf = n as f64;
    let (d11, d22, d12) = if options.dof_adjust {
        let f1 = (n - k1) as f64;
        let f2 = (n - k2) as f64;
        (f1, f2, (f1 * f2).sqrt())
    } else {
        (nf, nf, nf)
    };
    let s11 = e1.dot(e1) / d11;
    let s22 = e2.dot(e2) / d22;
    let s12 = if options.force_diagonal {
        0.0
    } else {
        e1.dot(e2) / d12
    };

    if s11 <= 0.0 || s22 <= 0.0 {
        return Err(Error::SingularSigma {
            corr: if s12 == 0.0 { 0.0 } else { 1.0 },
        });
    }
    let resid_corr = s12 / (s11 * s22).sqrt();
    if resid_corr.abs() >= 1.0 - 1e-10 {
        return Err(Error::SingularSigma { corr: resid_corr });
    }
    let sigma = [[s11, s12], [s12, s22]];

    if s12 == 0.0 {
        // Block-diagonal Σ̂: GLS decouples equation by equation and the
        // scalar weights cancel, so stage two is stage one.
        let xtx_inv_1 = &stage1_fit1.cov_beta / stage1_fit1.sigma2;
        let xtx_inv_2 = &stage1_fit2.cov_beta / stage1_fit2.sigma2;
        let mut cov = DMatrix::zeros(k1 + k2, k1 + k2);
        cov.view_mut((0, 0), (k1, k1)).copy_from(&(xtx_inv_1 * s11));
        cov.view_mut((k1, k1), (k2, k2))
            .copy_from(&(xtx_inv_2 * s22));
        return Ok(SureFit {
            beta1: stage1_fit1.beta.clone(),
            beta2: stage1_fit2.beta.clone(),
            sigma,
            resid_corr,
            stage1_fit1,
            stage1_fit2,
            cov_beta: cov,
            n,
        });
    }

    // Σ̂⁻¹ entries.
    let det = s11 * s22 - s12 * s12;
    let (w11, w22, w12) = (s22 / det, s11 / det, -s12 / det);

    let mut a = DMatrix::zeros(k1 + k2, k1 + k2);
    a.view_mut((0, 0), (k1, k1))
        .copy_from(&(x1.transpose() * x1 * w11));
    a.view_mut((0, k1), (k1, k2))
        .copy_from(&(x1.transpose() * x2 * w12));
    a.view_mut((k1, 0), (k2, k1))
        .copy_from(&(x2.transpose() * x1 * w12));
    a.view_mut((k1, k1), (k2, k2))
        .copy_from(&(x2.transpose() * x2 * w22));

    let mut b = DVector::zeros(k1 + k2);
    b.rows_mut(0, k1)
        .copy_from(&(x1.transpose() * (y1 * w11 + y2 * w12)));
    b.rows_mut(k1, k2)
        .copy_from(&(x2.transpose() * (y1 * w12 + y2 * w22)));

    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient(vec!["stacked GLS system".into()]))?;
    let beta = chol.solve(&b);
    let cov_beta = chol.inverse();

    Ok(SureFit {
        beta1: beta.rows(0, k1).into_owned(),
        beta2: beta.rows(k1, k2).into_owned(),
        sigma,
        resid_corr,
        stage1_fit1,
        stage1_fit2,
        cov_beta,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Deterministic covariates and disturbances for reproducible fixtures.
    fn lcg_stream(seed: u64, n: usize) -> Vec<f64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect()
    }

    fn system(
        n: usize,
        rho: f64,
        shared_x: bool,
    ) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let z1 = lcg_stream(7, n);
        let z2 = lcg_stream(11, n);
        let u1 = lcg_stream(13, n);
        let u2 = lcg_stream(17, n);
        let x1 = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { z1[i] * 2.0 });
        let x2 = if shared_x {
            x1.clone()
        } else {
            DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { z2[i] * 2.0 })
        };
        // Correlated errors from an LCG pair (crude but deterministic).
        let e1: Vec<f64> = u1.iter().map(|v| v * 2.0).collect();
        let e2: Vec<f64> = u1
            .iter()
            .zip(u2.iter())
            .map(|(a, b)| rho * a * 2.0 + (1.0 - rho * rho).sqrt() * b * 2.0)
            .collect();
        let y1 = DVector::from_fn(n, |i, _| 1.0 + 0.5 * x1[(i, 1)] + e1[i]);
        let y2 = DVector::from_fn(n, |i, _| -0.5 + 1.5 * x2[(i, 1)] + e2[i]);
        (x1, y1, x2, y2)
    }

    #[test]
    fn identical_designs_collapse_to_ols() {
        // Kruskal's case: with X1 = X2 the GLS weighting cancels.
        let (x1, y1, x2, y2) = system(300, 0.6, true);
        let fit = fit_sure(&x1, &y1, &x2, &y2).unwrap();
        for (a, b) in fit.beta1.iter().zip(fit.stage1_fit1.beta.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        for (a, b) in fit.beta2.iter().zip(fit.stage1_fit2.beta.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn forced_diagonal_sigma_returns_stage_one_exactly() {
        let (x1, y1, x2, y2) = system(250, 0.6, false);
        let opts = SureOptions {
            force_diagonal: true,
            ..Default::default()
        };
        let fit = fit_sure_opts(&x1, &y1, &x2, &y2, &opts).unwrap();
        assert_eq!(fit.sigma[0][1], 0.0);
        assert_eq!(fit.resid_corr, 0.0);
        for (a, b) in fit.beta1.iter().zip(fit.stage1_fit1.beta.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in fit.beta2.iter().zip(fit.stage1_fit2.beta.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn residual_moment_identities() {
        let (x1, y1, x2, y2) = system(400, 0.5, false);
        let fit = fit_sure(&x1, &y1, &x2, &y2).unwrap();
        let n = fit.n as f64;
        let e1 = &fit.stage1_fit1.residuals;
        let e2 = &fit.stage1_fit2.residuals;
        assert_abs_diff_eq!(fit.sigma[0][0], e1.dot(e1) / n, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.sigma[1][1], e2.dot(e2) / n, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.sigma[0][1], e1.dot(e2) / n, epsilon = 1e-12);
        assert_abs_diff_eq!(
            fit.resid_corr,
            fit.sigma[0][1] / (fit.sigma[0][0] * fit.sigma[1][1]).sqrt(),
            epsilon = 1e-12
        );
        // Stage-one orthogonality carries over.
        let g1 = x1.transpose() * e1;
        for v in g1.iter() {
            assert!(v.abs() < 1e-8);
        }
    }

    #[test]
    fn recovers_planted_residual_correlation() {
        let (x1, y1, x2, y2) = system(4000, 0.5, false);
        let fit = fit_sure(&x1, &y1, &x2, &y2).unwrap();
        assert!((fit.resid_corr - 0.5).abs() < 0.06, "{}", fit.resid_corr);
    }

    #[test]
    fn perfectly_correlated_residuals_are_singular() {
        // Same design and same outcome on both sides gives identical
        // stage-one residuals, so the residual correlation is exactly one.
        let (x1, y1, _, _) = system(100, 0.0, true);
        let err = fit_sure(&x1, &y1, &x1, &y1).unwrap_err();
        assert!(matches!(err, Error::SingularSigma { .. }));
    }

    #[test]
    fn dof_adjustment_scales_sigma_only() {
        let (x1, y1, x2, y2) = system(120, 0.4, false);
        let plain = fit_sure(&x1, &y1, &x2, &y2).unwrap();
        let adj = fit_sure_opts(
            &x1,
            &y1,
            &x2,
            &y2,
            &SureOptions {
                dof_adjust: true,
                ..Default::default()
            },
        )
        .unwrap();
        let scale = 120.0 / 118.0;
        assert_abs_diff_eq!(
            adj.sigma[0][0],
            plain.sigma[0][0] * scale,
            epsilon = 1e-12
        );
        // Correlation is invariant to the common rescaling.
        assert_abs_diff_eq!(adj.resid_corr, plain.resid_corr, epsilon = 1e-12);
    }
}
