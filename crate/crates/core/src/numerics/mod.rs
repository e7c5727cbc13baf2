//! Distribution kernels and the smooth maximizer shared by every
//! likelihood-based estimator.
//!
//! All kernels are pure functions of their arguments and are safe to call
//! concurrently. Invalid inputs (NaN, out-of-domain correlations) yield NaN
//! rather than a panic; the calling layers validate their own domains.

mod bvn;
mod normal;
mod optim;

pub use bvn::{bvn_cdf, bvn_pdf};
pub use normal::{
    mills_conditional, norm_cdf, norm_pdf, norm_quantile, normal_hazard, safe_ln, PROB_FLOOR,
};
pub use optim::{
    maximize, maximize_traced, maximize_with_grad, numeric_gradient, OptimResult, OptimizerConfig,
};
