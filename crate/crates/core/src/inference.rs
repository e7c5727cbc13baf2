//! Standard errors, t-tests, AIC comparison, the Breusch-Pagan
//! independence test, and ROC AUC.

use crate::estimators::{BivariateProbitFit, ProbitFit, SureFit};
use crate::numerics::norm_cdf;
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Reference distribution a test statistic was compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceDist {
    Normal,
    ChiSquare { df: usize },
    StudentT { df: usize },
}

impl std::fmt::Display for ReferenceDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceDist::Normal => write!(f, "normal"),
            ReferenceDist::ChiSquare { df } => write!(f, "chi-square({df})"),
            ReferenceDist::StudentT { df } => write!(f, "t({df})"),
        }
    }
}

/// Conventional significance thresholds and their table markers:
/// † for 10%, ∗ for 5%, ∗∗ for 1%.
pub const SIGNIFICANCE_LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

/// A test statistic with its p-value and the significance levels passed.
#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub reference: ReferenceDist,
    /// Subset of [`SIGNIFICANCE_LEVELS`] with p < level, descending.
    pub significant_at: Vec<f64>,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, reference: ReferenceDist) -> Self {
        let significant_at = SIGNIFICANCE_LEVELS
            .iter()
            .copied()
            .filter(|&level| p_value < level)
            .collect();
        Self {
            statistic,
            p_value,
            reference,
            significant_at,
        }
    }

    /// Table marker for the strongest level passed: "∗∗", "∗", "†" or "".
    pub fn marker(&self) -> &'static str {
        if self.p_value < 0.01 {
            "∗∗"
        } else if self.p_value < 0.05 {
            "∗"
        } else if self.p_value < 0.10 {
            "†"
        } else {
            ""
        }
    }
}

/// Square roots of the covariance diagonal. A negative diagonal entry
/// (numerical breakage upstream) is a hard error naming the index.
pub fn std_errors(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(cov.nrows());
    for i in 0..cov.nrows() {
        let v = cov[(i, i)];
        if v < 0.0 {
            return Err(Error::NegativeVariance { index: i, value: v });
        }
        out.push(v.sqrt());
    }
    Ok(out)
}

/// Large-sample two-sided t-test of a single coefficient against zero.
pub fn t_test(coef: f64, se: f64) -> Result<TestResult> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "standard error must be positive, got {se}"
        )));
    }
    let statistic = coef / se;
    let p_value = (2.0 * norm_cdf(-statistic.abs())).min(1.0);
    Ok(TestResult::new(statistic, p_value, ReferenceDist::Normal))
}

/// Finite-sample variant using the Student-t reference with `df` degrees
/// of freedom, for OLS-style fits.
pub fn t_test_student(coef: f64, se: f64, df: usize) -> Result<TestResult> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "standard error must be positive, got {se}"
        )));
    }
    if df == 0 {
        return Err(Error::InvalidParameter("zero degrees of freedom".into()));
    }
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let statistic = coef / se;
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let p_value = (2.0 * dist.cdf(-statistic.abs())).min(1.0);
    Ok(TestResult::new(
        statistic,
        p_value,
        ReferenceDist::StudentT { df },
    ))
}

/// Akaike information criterion 2k − 2·loglik.
pub fn aic(loglik: f64, k: usize) -> f64 {
    assert!(k >= 1, "aic needs at least one parameter");
    2.0 * k as f64 - 2.0 * loglik
}

/// AIC comparison of the joint bivariate probit against the two separate
/// probit equations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecTestResult {
    pub aic_joint: f64,
    pub aic_separate: f64,
    /// Joint wins only on strictly smaller AIC; ties prefer the smaller
    /// (separate) model.
    pub preferred: Preference,
    /// loglik(joint) − (loglik₁ + loglik₂); with one extra parameter the
    /// joint model is preferred exactly when this exceeds 1.0.
    pub loglik_difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Joint,
    Separate,
}

impl std::fmt::Display for Preference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Preference::Joint => write!(f, "joint"),
            Preference::Separate => write!(f, "separate"),
        }
    }
}

/// Compares the joint fit to the pair of univariate fits by AIC. All
/// three fits must come from the same observations.
pub fn spec_test(
    joint: &BivariateProbitFit,
    fit1: &ProbitFit,
    fit2: &ProbitFit,
) -> Result<SpecTestResult> {
    if fit1.n != joint.n || fit2.n != joint.n {
        return Err(Error::DimensionMismatch {
            what: "spec test observations",
            expected: joint.n,
            got: if fit1.n != joint.n { fit1.n } else { fit2.n },
        });
    }
    if fit1.k != joint.k1 || fit2.k != joint.k2 {
        return Err(Error::DimensionMismatch {
            what: "spec test regressors",
            expected: joint.k1 + joint.k2,
            got: fit1.k + fit2.k,
        });
    }
    let loglik_separate = fit1.loglik + fit2.loglik;
    let aic_separate = aic(loglik_separate, fit1.k + fit2.k);
    let aic_joint = aic(joint.loglik, joint.n_params());
    let preferred = if aic_joint < aic_separate {
        Preference::Joint
    } else {
        Preference::Separate
    };
    Ok(SpecTestResult {
        aic_joint,
        aic_separate,
        preferred,
        loglik_difference: joint.loglik - loglik_separate,
    })
}

// Chi-square(1) upper tail: P(Z^2 > x) = 2 Phi(-sqrt(x)).
fn chi2_1_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    (2.0 * norm_cdf(-x.sqrt())).min(1.0)
}

/// Breusch-Pagan Lagrange-multiplier test of cross-equation independence
/// for a fitted two-equation SUR system: λ = N·r² against chi-square(1).
pub fn breusch_pagan(sure: &SureFit) -> Result<TestResult> {
    if sure.n < 10 {
        return Err(Error::TooFewObservations { n: sure.n, k: 10 });
    }
    let r = sure.resid_corr;
    let statistic = sure.n as f64 * r * r;
    let p_value = chi2_1_survival(statistic);
    Ok(TestResult::new(
        statistic,
        p_value,
        ReferenceDist::ChiSquare { df: 1 },
    ))
}

/// Area under the ROC curve by the rank (Mann-Whitney) formulation with
/// midrank tie handling.
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "auc inputs",
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let n = scores.len();
    let mut positives = 0usize;
    for (&s, &l) in scores.iter().zip(labels.iter()) {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite score {s}")));
        }
        if l != 0.0 && l != 1.0 {
            return Err(Error::InvalidParameter(format!("non-binary label {l}")));
        }
        positives += (l == 1.0) as usize;
    }
    if positives == 0 || positives == n {
        return Err(Error::SingleClassOutcome("labels".to_string()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());

    // Midranks over tie runs, then the Mann-Whitney identity.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1.0 {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let p = positives as f64;
    let q = (n - positives) as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q))
}
