//! Scalar special functions used by the bound formulas.

use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

/// h₂(ε) in bits, with h₂(0) = h₂(1) = 0.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("binary entropy argument {eps} outside [0, 1]")));
    }
    if eps == 0.0 || eps == 1.0 {
        return Ok(0.0);
    }
    Ok(-eps * eps.log2() - (1.0 - eps) * (-eps).ln_1p() / std::f64::consts::LN_2)
}

/// g(N) = (N + 1) log₂(N + 1) − N log₂ N, the entropy of a thermal state.
pub fn g_entropy(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!("g(N) needs finite N >= 0, got {n}")));
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    // (N + 1) log₂(1 + 1/N) + log₂ N
    Ok(((n + 1.0) * (1.0 / n).ln_1p() + n.ln()) / std::f64::consts::LN_2)
}

/// C(ε) = log₂ 6 + 2 log₂((1 + ε)/(1 − ε)).
pub fn c_epsilon(eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("C(eps) needs 0 <= eps < 1, got {eps}")));
    }
    Ok(6f64.log2() + 2.0 * ((1.0 + eps) / (1.0 - eps)).log2())
}

/// Φ(x) through erfc, accurate in the lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ⁻¹(ε): inverse complementary error function followed by one Newton
/// step on Φ, relative accuracy far below 10⁻⁶ down to ε = 10⁻³⁰⁰.
pub fn inv_normal_cdf(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("inverse normal CDF needs 0 < eps < 1, got {eps}")));
    }
    if eps == 0.5 {
        return Ok(0.0);
    }
    let mut x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps);
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        // Work on whichever tail is small to keep the residual relative.
        let step = if x < 0.0 {
            (normal_cdf(x) - eps) / pdf
        } else {
            ((1.0 - eps) - normal_cdf(-x)) / pdf
        };
        if step.is_finite() {
            x -= step;
        }
    }
    Ok(x)
}
