//! Seeded known-parameter generators for estimator validation.
//!
//! Determinism contract: all draws come from ChaCha8 keyed by the spec
//! seed, consumed in a fixed order (equation-1 regressor rows, then
//! equation-2 rows, then error pairs), with normals produced by the
//! Box-Muller transform. The same spec therefore yields the same dataset
//! on every run and platform, independent of `rand`'s samplers.

use crate::datamodel::{Dataset, Equation};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Covariate law for generated regressors.
#[derive(Debug, Clone)]
pub enum RegressorLaw {
    StandardNormal,
    Uniform01,
    /// Bootstrap rows (with replacement) from supplied slope matrices,
    /// one per equation; column counts must match the slope dimensions.
    FromDataset {
        x1: DMatrix<f64>,
        x2: DMatrix<f64>,
    },
}

/// What to do when a generated outcome column is all zeros or all ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneratePolicy {
    /// Fail, pointing at the offending equation (the default: it forces
    /// the caller to pick intercepts that produce both classes).
    Error,
    /// Keep drawing fresh datasets from the continuing stream.
    Regenerate { max_tries: usize },
}

/// Full description of a synthetic two-equation population.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub n: usize,
    /// Slope vectors; with `intercept` the last entry multiplies a
    /// constant-one column appended after the drawn covariates.
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    /// Latent (or disturbance) error correlation, |rho| < 1.
    pub rho: f64,
    /// Error scales for the continuous system; probit generation fixes
    /// both at one.
    pub sigma1: f64,
    pub sigma2: f64,
    /// Suppresses noise entirely in [`gen_sure`] (exact-recovery limit).
    pub noiseless: bool,
    pub regressor_law: RegressorLaw,
    pub intercept: bool,
    pub degenerate_policy: DegeneratePolicy,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Standard-normal covariates, unit scales, intercept on, hard error
    /// on degenerate outcomes.
    pub fn new(n: usize, beta1: Vec<f64>, beta2: Vec<f64>, rho: f64, seed: u64) -> Self {
        Self {
            n,
            beta1,
            beta2,
            rho,
            sigma1: 1.0,
            sigma2: 1.0,
            noiseless: false,
            regressor_law: RegressorLaw::StandardNormal,
            intercept: true,
            degenerate_policy: DegeneratePolicy::Error,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|rho| must be below 1, got {}",
                self.rho
            )));
        }
        if !(self.sigma1 > 0.0) || !(self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter(
                "error scales must be strictly positive".into(),
            ));
        }
        let min_k = 1 + usize::from(self.intercept);
        if self.beta1.len() < min_k || self.beta2.len() < min_k {
            return Err(Error::InvalidParameter(
                "each equation needs at least one slope (plus the intercept when enabled)".into(),
            ));
        }
        if let RegressorLaw::FromDataset { x1, x2 } = &self.regressor_law {
            let want1 = self.beta1.len() - usize::from(self.intercept);
            let want2 = self.beta2.len() - usize::from(self.intercept);
            if x1.ncols() != want1 || x2.ncols() != want2 || x1.nrows() == 0 || x2.nrows() == 0 {
                return Err(Error::InvalidParameter(
                    "bootstrap source shape does not match the slope dimensions".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The planted parameters behind a generated dataset, exportable as a
/// JSON sidecar next to the data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TruthRecord {
    pub model: String,
    pub n: usize,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub rho: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub seed: u64,
}

/// One standard normal via Box-Muller (consumes two uniforms).
fn draw_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn draw_pair(rng: &mut ChaCha8Rng, rho: f64) -> (f64, f64) {
    let z1 = draw_normal(rng);
    let z2 = draw_normal(rng);
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
}

/// Correlated standard-normal error pairs (ε₁, ε₂) with corr(ε₁,ε₂) = ρ,
/// built as (z₁, ρz₁ + √(1−ρ²)z₂). Deterministic per seed.
pub fn draw_bvn_errors(n: usize, rho: f64, seed: u64) -> Result<Vec<(f64, f64)>> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "|rho| must be below 1, got {rho}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| draw_pair(&mut rng, rho)).collect())
}

fn draw_design(
    rng: &mut ChaCha8Rng,
    n: usize,
    k_slopes: usize,
    law: &RegressorLaw,
    source: Option<&DMatrix<f64>>,
    intercept: bool,
) -> DMatrix<f64> {
    let k = k_slopes + usize::from(intercept);
    let mut x = DMatrix::zeros(n, k);
    for i in 0..n {
        match law {
            RegressorLaw::StandardNormal => {
                for j in 0..k_slopes {
                    x[(i, j)] = draw_normal(rng);
                }
            }
            RegressorLaw::Uniform01 => {
                for j in 0..k_slopes {
                    x[(i, j)] = rng.random::<f64>();
                }
            }
            RegressorLaw::FromDataset { .. } => {
                let pool = source.expect("bootstrap source");
                let row = rng.random_range(0..pool.nrows());
                for j in 0..k_slopes {
                    x[(i, j)] = pool[(row, j)];
                }
            }
        }
    }
    if intercept {
        for i in 0..n {
            x[(i, k - 1)] = 1.0;
        }
    }
    x
}

fn column_names(equation: usize, k_slopes: usize, intercept: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=k_slopes).map(|j| format!("x{equation}_{j}")).collect();
    if intercept {
        names.push("intercept".into());
    }
    names
}

fn degenerate_equation(y1: &DVector<f64>, y2: &DVector<f64>) -> Option<(usize, u8)> {
    for (idx, y) in [(1usize, y1), (2usize, y2)] {
        let ones = y.iter().filter(|&&v| v == 1.0).count();
        if ones == 0 {
            return Some((idx, 0));
        }
        if ones == y.len() {
            return Some((idx, 1));
        }
    }
    None
}

fn spec_truth(spec: &GeneratorSpec, model: &str) -> TruthRecord {
    TruthRecord {
        model: model.to_string(),
        n: spec.n,
        beta1: spec.beta1.clone(),
        beta2: spec.beta2.clone(),
        rho: spec.rho,
        sigma1: spec.sigma1,
        sigma2: spec.sigma2,
        seed: spec.seed,
    }
}

fn generate_latents(
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let k1 = spec.beta1.len() - usize::from(spec.intercept);
    let k2 = spec.beta2.len() - usize::from(spec.intercept);
    let (src1, src2) = match &spec.regressor_law {
        RegressorLaw::FromDataset { x1, x2 } => (Some(x1), Some(x2)),
        _ => (None, None),
    };
    let x1 = draw_design(rng, spec.n, k1, &spec.regressor_law, src1, spec.intercept);
    let x2 = draw_design(rng, spec.n, k2, &spec.regressor_law, src2, spec.intercept);
    let b1 = DVector::from_column_slice(&spec.beta1);
    let b2 = DVector::from_column_slice(&spec.beta2);
    let mut latent1 = &x1 * b1;
    let mut latent2 = &x2 * b2;
    if !spec.noiseless {
        for i in 0..spec.n {
            let (e1, e2) = draw_pair(rng, spec.rho);
            latent1[i] += spec.sigma1 * e1;
            latent2[i] += spec.sigma2 * e2;
        }
    }
    (x1, x2, latent1, latent2)
}

fn dataset_from(
    spec: &GeneratorSpec,
    x1: DMatrix<f64>,
    x2: DMatrix<f64>,
    y1: DVector<f64>,
    y2: DVector<f64>,
) -> Result<Dataset> {
    let k1 = spec.beta1.len() - usize::from(spec.intercept);
    let k2 = spec.beta2.len() - usize::from(spec.intercept);
    let eq1 = Equation {
        outcome_name: "y1".into(),
        outcome: y1,
        regressor_names: column_names(1, k1, spec.intercept),
        x: x1,
        has_intercept: spec.intercept,
    };
    let eq2 = Equation {
        outcome_name: "y2".into(),
        outcome: y2,
        regressor_names: column_names(2, k2, spec.intercept),
        x: x2,
        has_intercept: spec.intercept,
    };
    Dataset::pair(eq1, eq2)
}

/// Generates a bivariate probit population: latent `Xβ + ε` thresholded
/// at zero, errors unit-variance with correlation ρ.
pub fn gen_biprobit(spec: &GeneratorSpec) -> Result<(Dataset, TruthRecord)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tries = match spec.degenerate_policy {
        DegeneratePolicy::Error => 1,
        DegeneratePolicy::Regenerate { max_tries } => max_tries.max(1),
    };
    let mut last_degenerate = (1, 0u8);
    for _ in 0..tries {
        let (x1, x2, latent1, latent2) = generate_latents(spec, &mut rng);
        let y1 = latent1.map(|v| f64::from(v > 0.0));
        let y2 = latent2.map(|v| f64::from(v > 0.0));
        match degenerate_equation(&y1, &y2) {
            None => {
                let data = dataset_from(spec, x1, x2, y1, y2)?;
                return Ok((data, spec_truth(spec, "biprobit")));
            }
            Some(which) => last_degenerate = which,
        }
    }
    Err(Error::DegenerateOutcome {
        equation: last_degenerate.0,
        value: last_degenerate.1,
    })
}

/// Generates a two-equation SUR population with continuous outcomes
/// `Xβ + ε`, error covariance [[σ₁², ρσ₁σ₂], [ρσ₁σ₂, σ₂²]].
pub fn gen_sure(spec: &GeneratorSpec) -> Result<(Dataset, TruthRecord)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (x1, x2, y1, y2) = generate_latents(spec, &mut rng);
    let data = dataset_from(spec, x1, x2, y1, y2)?;
    Ok((data, spec_truth(spec, "sure")))
}
