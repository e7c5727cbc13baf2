//! Model fitters: OLS, univariate probit, bivariate probit with correlated
//! latent errors, and the two-stage SUR feasible-GLS estimator.

mod biprobit;
mod ols;
mod probit;
mod sure;

pub use biprobit::{
    biprobit_loglik, biprobit_loglik_grad, fit_biprobit, fit_biprobit_fixed_athrho,
    BivariateProbitFit,
};
pub use ols::{fit_ols, OlsFit};
pub use probit::{fit_probit, predict_probit, ProbitFit};
pub use sure::{fit_sure, fit_sure_opts, SureFit, SureOptions};

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Inverts an observed-information matrix. A non-converged fit keeps its
/// report (with NaN covariance) instead of failing hard; singular
/// information at a claimed optimum is an error.
fn invert_information(info: DMatrix<f64>, converged: bool) -> Result<DMatrix<f64>> {
    let k = info.nrows();
    match info.try_inverse() {
        Some(inv) => Ok(inv),
        None if !converged => Ok(DMatrix::from_element(k, k, f64::NAN)),
        None => Err(Error::RankDeficient(vec!["observed information".into()])),
    }
}

/// Checks a 0/1 outcome vector and confirms both classes are present.
fn check_binary(name: &str, y: &DVector<f64>) -> Result<()> {
    let mut ones = 0usize;
    for &v in y.iter() {
        if v != 0.0 && v != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "outcome `{name}` contains non-binary value {v}"
            )));
        }
        ones += (v == 1.0) as usize;
    }
    if ones == 0 || ones == y.len() {
        return Err(Error::SingleClassOutcome(name.to_string()));
    }
    Ok(())
}
