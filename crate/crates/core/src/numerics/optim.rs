//! Quasi-Newton (BFGS) maximizer with backtracking line search.
//!
//! Estimators supply analytic gradients where they have them; otherwise a
//! central finite-difference gradient is used. Internally the routine
//! minimizes the negated objective with the standard inverse-Hessian BFGS
//! update and an Armijo backtracking search. Non-finite objective values
//! during the search are treated as rejections and the step is shortened.

use nalgebra::{DMatrix, DVector};

/// Tuning knobs for [`maximize`]. All tolerances must be strictly positive.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Sup-norm of the gradient at which the search declares convergence.
    pub gradient_tolerance: f64,
    /// Sup-norm of an accepted step below which the search stops.
    pub step_tolerance: f64,
    /// Relative step for central-difference gradients.
    pub finite_difference_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            step_tolerance: 1e-10,
            finite_difference_step: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.max_iterations < 1 {
            return Err(crate::Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("gradient_tolerance", self.gradient_tolerance),
            ("step_tolerance", self.step_tolerance),
            ("finite_difference_step", self.finite_difference_step),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(crate::Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a [`maximize`] call. `converged` implies
/// `gradient_norm <= gradient_tolerance`.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// Central-difference gradient with per-coordinate relative step.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut work = x.to_vec();
    for i in 0..x.len() {
        let h = rel_step * x[i].abs().max(1.0);
        work[i] = x[i] + h;
        let up = f(&work);
        work[i] = x[i] - h;
        let down = f(&work);
        work[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Maximize `objective` from `initial` using numeric gradients.
pub fn maximize<F>(objective: F, initial: &[f64], config: &OptimizerConfig) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
{
    let fd = config.finite_difference_step;
    let grad = |x: &[f64]| numeric_gradient(&objective, x, fd);
    bfgs(&objective, &grad, initial, config, None)
}

/// Maximize `objective` with a caller-supplied analytic gradient.
pub fn maximize_with_grad<F, G>(
    objective: F,
    gradient: G,
    initial: &[f64],
    config: &OptimizerConfig,
) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    bfgs(&objective, &gradient, initial, config, None)
}

/// Like [`maximize_with_grad`] but records the objective at every accepted
/// iterate (the line-search contract makes this sequence nondecreasing up
/// to the float-noise allowance, 16·ε·(1+|f|)).
pub fn maximize_traced<F, G>(
    objective: F,
    gradient: G,
    initial: &[f64],
    config: &OptimizerConfig,
    trace: &mut Vec<f64>,
) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    bfgs(&objective, &gradient, initial, config, Some(trace))
}

fn bfgs<F, G>(
    objective: &F,
    gradient: &G,
    initial: &[f64],
    config: &OptimizerConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let dim = initial.len();
    let mut x = DVector::from_column_slice(initial);
    // Work with the minimization form.
    let fmin = |p: &DVector<f64>| -objective(p.as_slice());
    let gmin = |p: &DVector<f64>| -DVector::from_vec(gradient(p.as_slice()));

    let mut fx = fmin(&x);
    if !fx.is_finite() {
        return OptimResult {
            argmax: initial.to_vec(),
            value: -fx,
            converged: false,
            iterations: 0,
            gradient_norm: f64::INFINITY,
        };
    }
    if let Some(t) = trace.as_deref_mut() {
        t.push(-fx);
    }
    let mut g = gmin(&x);
    let mut h = DMatrix::<f64>::identity(dim, dim);
    let mut iterations = 0;
    // A stalled line search or vanishing step usually means the inverse
    // Hessian estimate is badly scaled; a few scaled restarts
    // (Barzilai-Borwein diagonal) are allowed before giving up.
    let mut restarts = 0usize;
    let mut bb_scale = 1.0;

    let finish = |x: &DVector<f64>, fx: f64, g: &DVector<f64>, iterations: usize| {
        let gnorm = sup_norm(g.as_slice());
        OptimResult {
            argmax: x.as_slice().to_vec(),
            value: -fx,
            converged: gnorm <= config.gradient_tolerance,
            iterations,
            gradient_norm: gnorm,
        }
    };

    while iterations < config.max_iterations {
        let gnorm = sup_norm(g.as_slice());
        if gnorm <= config.gradient_tolerance {
            return OptimResult {
                argmax: x.as_slice().to_vec(),
                value: -fx,
                converged: true,
                iterations,
                gradient_norm: gnorm,
            };
        }

        let mut dir = -(&h * &g);
        let mut slope = dir.dot(&g);
        if !(slope < 0.0) || !slope.is_finite() {
            // Curvature information has gone bad; restart from steepest descent.
            h = DMatrix::identity(dim, dim) * bb_scale;
            dir = -(&h * &g);
            slope = dir.dot(&g);
        }

        // Armijo backtracking; non-finite trial values shrink the step too.
        // The float-noise allowance keeps progress possible once per-step
        // improvements drop below the objective's representable resolution
        // (the objective is a sum over observations, so its granularity
        // grows with the sample).
        let noise = 16.0 * f64::EPSILON * (1.0 + fx.abs());
        let mut t = 1.0;
        let mut x_new;
        let mut f_new;
        let mut stalled = false;
        loop {
            x_new = &x + &dir * t;
            f_new = fmin(&x_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * t * slope + noise {
                break;
            }
            t *= 0.5;
            if t < 1e-20 {
                stalled = true;
                break;
            }
        }
        if stalled {
            if restarts < 3 {
                restarts += 1;
                h = DMatrix::identity(dim, dim) * bb_scale;
                continue;
            }
            return finish(&x, fx, &g, iterations);
        }

        let step = &x_new - &x;
        let g_new = gmin(&x_new);
        let y = &g_new - &g;
        let sy = step.dot(&y);
        let yy = y.dot(&y);
        if sy > 1e-12 * step.norm() * y.norm() {
            bb_scale = sy / yy;
            // Inverse-Hessian BFGS update.
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (sy + yhy) * rho * rho * (&step * step.transpose())
                - rho * (&hy * step.transpose() + &step * hy.transpose());
        }

        let step_norm = sup_norm(step.as_slice());
        x = x_new;
        fx = f_new;
        g = g_new;
        iterations += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(-fx);
        }

        if step_norm <= config.step_tolerance {
            if sup_norm(g.as_slice()) > config.gradient_tolerance && restarts < 3 {
                restarts += 1;
                h = DMatrix::identity(dim, dim) * bb_scale;
                continue;
            }
            return finish(&x, fx, &g, iterations);
        }
    }

    finish(&x, fx, &g, iterations)
}
