//! Shared numerical oracles for the integration tests. Everything here is
//! deliberately independent of the library's own kernels: plain adaptive
//! Simpson quadrature over explicit densities, with statrs used only for
//! reference distribution functions.

#![allow(dead_code)]

/// Adaptive Simpson integration with Richardson acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    recurse(f, a, b, simpson(f, a, m, b), tol, 48)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Reference Phi by quadrature of the density from an effective -inf.
pub fn phi_quadrature(x: f64) -> f64 {
    if x <= -9.0 {
        // Below the truncation point fall back to the statrs erfc route.
        return statrs_phi(x);
    }
    if x >= 9.0 {
        return 1.0 - phi_quadrature(-x);
    }
    // Integrate from the centre for stability: Phi(x) = 1/2 + int_0^x.
    0.5 + adaptive_simpson(&std_normal_pdf, 0.0, x, 1e-14)
}

pub fn statrs_phi(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Bivariate normal lower-orthant probability as a 2-D integral, outer
/// dimension by adaptive Simpson, inner dimension marginalized exactly:
/// P(Z1<=x1, Z2<=x2) = int_{-inf}^{x1} phi(t) Phi((x2 - rho t)/s) dt.
pub fn bvn_quadrature(x1: f64, x2: f64, rho: f64) -> f64 {
    let s = (1.0 - rho * rho).sqrt();
    let integrand = |t: f64| std_normal_pdf(t) * statrs_phi((x2 - rho * t) / s);
    let lower = -9.0;
    if x1 <= lower {
        return 0.0;
    }
    adaptive_simpson(&integrand, lower, x1.min(9.0), 1e-12)
}

/// Fully nested 2-D adaptive Simpson over the joint density; slow, used
/// to validate `bvn_quadrature` itself on a subgrid.
pub fn bvn_quadrature_2d(x1: f64, x2: f64, rho: f64) -> f64 {
    let s2 = 1.0 - rho * rho;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s2.sqrt());
    let lower = -8.5;
    let outer = |t: f64| {
        let inner = |u: f64| (-0.5 * (t * t - 2.0 * rho * t * u + u * u) / s2).exp();
        norm * adaptive_simpson(&inner, lower, x2.min(8.5), 1e-12)
    };
    if x1 <= lower || x2 <= lower {
        return 0.0;
    }
    adaptive_simpson(&outer, lower, x1.min(8.5), 1e-10)
}
