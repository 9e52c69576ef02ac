//! Relative entropy and relative entropy variance between zero-mean
//! faithful Gaussian states, in bits and bits².

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    pub d: f64,
    pub v: f64,
}

fn check_modes<S: GaussianState, T: GaussianState>(rho: &S, sigma: &T) -> Result<()> {
    if rho.mode_count() != sigma.mode_count() {
        return Err(Error::InvalidArgument(format!(
            "mode count mismatch: {} vs {}",
            rho.mode_count(),
            sigma.mode_count()
        )));
    }
    Ok(())
}

/// D and V from a single pass over the exponential forms.
pub fn divergences<S: GaussianState, T: GaussianState>(rho: &S, sigma: &T) -> Result<DivergenceResult> {
    check_modes(rho, sigma)?;
    let fr = rho.exponential_form()?;
    let fs = sigma.exponential_form()?;
    let delta = &fr.g_matrix - &fs.g_matrix;
    let v = rho.covariance();
    let o = symplectic_form(rho.mode_count())?;
    let dv = &delta * &v;
    let dodo = &delta * &o * &delta * &o;
    let d = 0.5 * (fs.log2_z - fr.log2_z) - dv.trace() / (4.0 * LN_2);
    let var = ((&dv * &dv).trace() + dodo.trace()) / (8.0 * LN_2 * LN_2);
    Ok(DivergenceResult { d, v: var })
}

/// D(ρ‖σ) = ½ log₂(Z_σ/Z_ρ) − Tr(ΔV_ρ)/(4 ln 2), Δ = G_ρ − G_σ.
pub fn relative_entropy<S: GaussianState, T: GaussianState>(rho: &S, sigma: &T) -> Result<f64> {
    divergences(rho, sigma).map(|r| r.d)
}

/// V(ρ‖σ) = [Tr(ΔV_ρΔV_ρ) + Tr(ΔΩΔΩ)]/(8 ln² 2).
pub fn relative_entropy_variance<S: GaussianState, T: GaussianState>(rho: &S, sigma: &T) -> Result<f64> {
    divergences(rho, sigma).map(|r| r.v)
}
