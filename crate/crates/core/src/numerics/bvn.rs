//! Bivariate standard normal CDF.
//!
//! Follows the Drezner & Wesolowsky (1989) reduction to a single integral
//! over the correlation, evaluated with Gauss-Legendre rules, plus the
//! Genz reformulation for |ρ| > 0.925 that expands around the degenerate
//! boundary and integrates a tail-stabilized residual. Absolute error is
//! below 1e-14 across the full domain, comfortably inside the 1e-7
//! contract.
#![allow(clippy::excessive_precision)]

use super::normal::norm_cdf;
use std::f64::consts::PI;

// Gauss-Legendre (weight, abscissa) pairs on [-1, 1]; only the negative
// abscissas are stored, the loop evaluates both signs. The rule sizes and
// |rho| switch points follow the published algorithm.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705, -0.9324695142031522),
    (0.3607615730481384, -0.6612093864662647),
    (0.4679139345726904, -0.2386191860831970),
];

const GL12: [(f64, f64); 6] = [
    (0.04717533638651177, -0.9815606342467191),
    (0.1069393259953183, -0.9041172563704750),
    (0.1600783285433464, -0.7699026741943050),
    (0.2031674267230659, -0.5873179542866171),
    (0.2334925365383547, -0.3678314989981802),
    (0.2491470458134029, -0.1252334085114692),
];

const GL20: [(f64, f64); 10] = [
    (0.01761400713915212, -0.9931285991850949),
    (0.04060142980038694, -0.9639719272779138),
    (0.06267204833410906, -0.9122344282513259),
    (0.08327674157670475, -0.8391169718222188),
    (0.1019301198172404, -0.7463319064601508),
    (0.1181945319615184, -0.6360536807265150),
    (0.1316886384491766, -0.5108670019508271),
    (0.1420961093183821, -0.3737060887154196),
    (0.1491729864726037, -0.2277858511416451),
    (0.1527533871307259, -0.07652652113349733),
];

fn gauss_rule(rho_abs: f64) -> &'static [(f64, f64)] {
    if rho_abs < 0.3 {
        &GL6
    } else if rho_abs < 0.75 {
        &GL12
    } else {
        &GL20
    }
}

const SQRT_2PI: f64 = 2.506628274631000502;

/// Standard bivariate normal density at (x, y) with correlation rho.
pub fn bvn_pdf(x: f64, y: f64, rho: f64) -> f64 {
    if !x.is_finite() || !y.is_finite() || rho.is_nan() || rho.abs() >= 1.0 {
        return f64::NAN;
    }
    let omr2 = 1.0 - rho * rho;
    let q = (x * x - 2.0 * rho * x * y + y * y) / omr2;
    (-0.5 * q).exp() / (2.0 * PI * omr2.sqrt())
}

// P(Z1 > h, Z2 > k) for |r| < 1.
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    let rule = gauss_rule(r.abs());
    let mut k = k;
    let mut hk = h * k;
    let mut bvn = 0.0;

    if r.abs() <= 0.925 {
        if r.abs() > 0.0 {
            let hs = 0.5 * (h * h + k * k);
            let asr = 0.5 * r.asin();
            for &(w, x) in rule {
                for sign in [-1.0, 1.0] {
                    let sn = (asr * (sign * x + 1.0)).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn *= asr / (2.0 * PI);
        }
        bvn + norm_cdf(-h) * norm_cdf(-k)
    } else {
        // |r| > 0.925: expand around the |r| = 1 boundary.
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        let omr2 = (1.0 - r) * (1.0 + r);
        let mut a = omr2.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let asr = -0.5 * (bs / omr2 + hk);
        if asr > -100.0 {
            bvn = a
                * asr.exp()
                * (1.0 - c * (bs - omr2) * (1.0 - d * bs / 5.0) / 3.0 + c * d * omr2 * omr2 / 5.0);
        }
        if -hk < 100.0 {
            let b = bs.sqrt();
            bvn -= (-0.5 * hk).exp()
                * SQRT_2PI
                * norm_cdf(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a *= 0.5;
        for &(w, x) in rule {
            for sign in [-1.0, 1.0] {
                let xs = (a * (sign * x + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let asr = -0.5 * (bs / xs + hk);
                if asr > -100.0 {
                    let sp = 1.0 + c * xs * (1.0 + d * xs);
                    let ep = (-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs;
                    bvn += a * w * asr.exp() * (ep - sp);
                }
            }
        }
        bvn = -bvn / (2.0 * PI);
        if r > 0.0 {
            bvn + norm_cdf(-h.max(k))
        } else {
            bvn = -bvn;
            if k > h {
                bvn += norm_cdf(k) - norm_cdf(h);
            }
            bvn
        }
    }
}

/// P(Z1 ≤ x1, Z2 ≤ x2) for standard bivariate normals with correlation rho.
///
/// Accepts ±∞ in either coordinate; ρ = ±1 degenerates to the documented
/// limit formulas `min(Φ(x1), Φ(x2))` and `max(0, Φ(x1)+Φ(x2)−1)` instead
/// of the quadrature path. |ρ| > 1 or NaN anywhere yields NaN.
pub fn bvn_cdf(x1: f64, x2: f64, rho: f64) -> f64 {
    if x1.is_nan() || x2.is_nan() || rho.is_nan() || rho.abs() > 1.0 {
        return f64::NAN;
    }
    if x1 == f64::NEG_INFINITY || x2 == f64::NEG_INFINITY {
        return 0.0;
    }
    if x1 == f64::INFINITY {
        return norm_cdf(x2);
    }
    if x2 == f64::INFINITY {
        return norm_cdf(x1);
    }
    if rho == 1.0 {
        return norm_cdf(x1.min(x2));
    }
    if rho == -1.0 {
        return (norm_cdf(x1) + norm_cdf(x2) - 1.0).max(0.0);
    }
    // Canonical argument order makes the symmetry in (x1, x2) exact.
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    bvn_upper(-lo, -hi, rho).clamp(0.0, 1.0)
}
