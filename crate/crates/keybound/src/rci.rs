//! Reverse coherent information of a pure-loss channel fed with a two-mode
//! squeezed vacuum of N_S photons, and its variance.
//!
//! The derivations are in natural logarithms; every public value is in bits.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::special::g_entropy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RciResult {
    pub i_rev: f64,
    pub v_rev: f64,
    pub v_rev_approx: f64,
}

fn check(n_s: f64, eta: f64) -> Result<()> {
    if !(n_s > 0.0) || !n_s.is_finite() {
        return Err(Error::Domain(format!("N_S = {n_s} must be positive")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("transmissivity {eta} outside (0, 1)")));
    }
    Ok(())
}

/// ln(1 + 1/x)
fn l(x: f64) -> f64 {
    (1.0 / x).ln_1p()
}

/// V(N_S) = N_S(N_S + 1) log₂²(1 + 1/N_S).
pub fn entropy_variance_thermal(n_s: f64) -> Result<f64> {
    if !(n_s > 0.0) || !n_s.is_finite() {
        return Err(Error::Domain(format!("N_S = {n_s} must be positive")));
    }
    let x = l(n_s) / LN_2;
    Ok(n_s * (n_s + 1.0) * x * x)
}

/// g(N_S) − g((1 − η)N_S).
pub fn reverse_coherent_information(n_s: f64, eta: f64) -> Result<f64> {
    check(n_s, eta)?;
    Ok(g_entropy(n_s)? - g_entropy((1.0 - eta) * n_s)?)
}

/// Tr{ψ_AE (n̂_A ⊗ n̂_E)} = (1 − η)N_S(2N_S + 1).
pub fn cross_photon_moment(n_s: f64, eta: f64) -> Result<f64> {
    check(n_s, eta)?;
    Ok((1.0 - eta) * n_s * (2.0 * n_s + 1.0))
}

/// m(m + 1)L_E² − 2m(N_S + 1)L_E L_A + N_S(N_S + 1)L_A² with m = (1 − η)N_S.
pub fn rci_variance(n_s: f64, eta: f64) -> Result<f64> {
    check(n_s, eta)?;
    let m = (1.0 - eta) * n_s;
    let le = l(m);
    let la = l(n_s);
    let nats = m * (m + 1.0) * le * le - 2.0 * m * (n_s + 1.0) * le * la + n_s * (n_s + 1.0) * la * la;
    Ok(nats / (LN_2 * LN_2))
}

/// [m log₂(1 + 1/m) − N_S log₂(1 + 1/N_S)]².
pub fn rci_variance_large_ns(n_s: f64, eta: f64) -> Result<f64> {
    check(n_s, eta)?;
    let m = (1.0 - eta) * n_s;
    let x = (m * l(m) - n_s * l(n_s)) / LN_2;
    Ok(x * x)
}

pub fn rci_result(n_s: f64, eta: f64) -> Result<RciResult> {
    Ok(RciResult {
        i_rev: reverse_coherent_information(n_s, eta)?,
        v_rev: rci_variance(n_s, eta)?,
        v_rev_approx: rci_variance_large_ns(n_s, eta)?,
    })
}
