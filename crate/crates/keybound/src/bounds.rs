//! Secret-key-agreement capacity bounds, per channel use in bits.

use std::fmt;
use std::str::FromStr;

use crate::divergences::divergences;
use crate::entanglement::SeparableReference;
use crate::error::{Error, Result};
use crate::rci;
use crate::solver::ResourceState;
use crate::special::{binary_entropy, c_epsilon, g_entropy, inv_normal_cdf};

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("transmissivity {eta} outside (0, 1)")))
    }
}

fn check_n(n: f64) -> Result<()> {
    if n >= 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("channel uses n = {n} must be >= 1")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("error probability {eps} outside (0, 1)")))
    }
}

fn check_nb(n_b: f64) -> Result<()> {
    if n_b > 0.0 && n_b.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("thermal photon number {n_b} must be > 0")))
    }
}

/// −log₂(1 − η).
pub fn pure_loss_asymptotic(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(-(-eta).ln_1p() / std::f64::consts::LN_2)
}

/// −log₂(1 − η) + C(ε)/n.
pub fn pure_loss_strong_converse(eta: f64, n: f64, eps: f64) -> Result<f64> {
    check_n(n)?;
    Ok(pure_loss_asymptotic(eta)? + c_epsilon(eps)? / n)
}

/// [−log₂(1 − η) + h₂(ε)/n]/(1 − ε).
pub fn pure_loss_weak_converse(eta: f64, n: f64, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    Ok((pure_loss_asymptotic(eta)? + binary_entropy(eps)? / n) / (1.0 - eps))
}

/// −log₂((1 − η)η^{N_B}) − g(N_B); zero at the threshold η = N_B/(N_B + 1).
pub fn thermal_asymptotic(eta: f64, n_b: f64) -> Result<f64> {
    check_eta(eta)?;
    check_nb(n_b)?;
    let ln2 = std::f64::consts::LN_2;
    Ok(-((-eta).ln_1p() + n_b * eta.ln()) / ln2 - g_entropy(n_b)?)
}

/// V_{η,N_B} = N_B(N_B + 1) log₂²(η(N_B + 1)/N_B).
pub fn thermal_variance(eta: f64, n_b: f64) -> Result<f64> {
    check_eta(eta)?;
    check_nb(n_b)?;
    let l = (eta * (n_b + 1.0) / n_b).log2();
    Ok(n_b * (n_b + 1.0) * l * l)
}

/// thermal_asymptotic + √(2V/(n(1 − ε))) + C(ε)/n.
pub fn thermal_strong_converse(eta: f64, n_b: f64, n: f64, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    let v = thermal_variance(eta, n_b)?;
    Ok(thermal_asymptotic(eta, n_b)? + (2.0 * v / (n * (1.0 - eps))).sqrt() + c_epsilon(eps)? / n)
}

/// [thermal_asymptotic + h₂(ε)/n]/(1 − ε).
pub fn thermal_weak_converse(eta: f64, n_b: f64, n: f64, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    Ok((thermal_asymptotic(eta, n_b)? + binary_entropy(eps)? / n) / (1.0 - eps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderBound {
    pub raw: f64,
    pub clamped: f64,
    /// n < 1/ε², where the normal approximation is not expected to be accurate.
    pub small_n: bool,
    pub d: f64,
    pub v: f64,
}

/// D(ω‖σ′) + √(V(ω‖σ′)/n) Φ⁻¹(ε) [+ log₂(n)/(2n)].
pub fn thermal_second_order(
    eta: f64,
    n_b: f64,
    n: f64,
    eps: f64,
    rs: &ResourceState,
    include_log_term: bool,
) -> Result<SecondOrderBound> {
    check_n(n)?;
    check_eps(eps)?;
    check_eta(eta)?;
    check_nb(n_b)?;
    if rs.eta != eta || rs.n_b != n_b {
        return Err(Error::ResourceMismatch(format!(
            "resource solved for (eta = {}, N_B = {}), bound requested for ({eta}, {n_b})",
            rs.eta, rs.n_b
        )));
    }
    let (d, v) = resource_divergences(rs)?;
    Ok(second_order_from_moments(d, v, n, eps, include_log_term))
}

/// (D, V) of the resource against its separable reference.
pub fn resource_divergences(rs: &ResourceState) -> Result<(f64, f64)> {
    let omega = rs.state_abs_c();
    let reference = SeparableReference::for_state(&omega)?;
    let r = divergences(&omega, &reference.state)?;
    if !(r.v > 0.0) {
        return Err(Error::DegenerateVariance(r.v));
    }
    Ok((r.d, r.v))
}

/// The normal approximation given precomputed D and V (> 0).
pub fn second_order_from_moments(d: f64, v: f64, n: f64, eps: f64, include_log_term: bool) -> SecondOrderBound {
    let phi = inv_normal_cdf(eps).expect("eps validated");
    let mut raw = d + (v / n).sqrt() * phi;
    if include_log_term {
        raw += n.log2() / (2.0 * n);
    }
    SecondOrderBound { raw, clamped: raw.max(0.0), small_n: n < 1.0 / (eps * eps), d, v }
}

/// (d + h₂(ε))/(1 − ε).
pub fn hypothesis_testing_weak_bound(d: f64, eps: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("divergence {d} must be >= 0")));
    }
    check_eps(eps)?;
    Ok((d + binary_entropy(eps)?) / (1.0 - eps))
}

/// n·d − √(n·v/ε): a total over n uses, not a rate.
pub fn chebyshev_lower_expansion(d: f64, v: f64, n: f64, eps: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::Domain(format!("variance {v} must be >= 0")));
    }
    check_n(n)?;
    check_eps(eps)?;
    Ok(n * d - (n * v / eps).sqrt())
}

/// I_rev − √(V_rev/(nε)) for a pure-loss channel fed a TMSV of N_S photons.
/// Heuristic: the infinite-dimensional coding argument behind it is open.
pub fn achievability_estimate(eta: f64, n_s: f64, n: f64, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    let i = rci::reverse_coherent_information(n_s, eta)?;
    let v = rci::rci_variance(n_s, eta)?.max(0.0);
    Ok(i - (v / (n * eps)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    PureLossAsymptotic,
    PureLossSc,
    PureLossWc,
    ThermalAsymptotic,
    ThermalSc,
    ThermalWc,
    ThermalSecondOrder,
    AchievabilityEstimate,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::PureLossAsymptotic,
        BoundKind::PureLossSc,
        BoundKind::PureLossWc,
        BoundKind::ThermalAsymptotic,
        BoundKind::ThermalSc,
        BoundKind::ThermalWc,
        BoundKind::ThermalSecondOrder,
        BoundKind::AchievabilityEstimate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::PureLossAsymptotic => "pure_loss_asymptotic",
            BoundKind::PureLossSc => "pure_loss_sc",
            BoundKind::PureLossWc => "pure_loss_wc",
            BoundKind::ThermalAsymptotic => "thermal_asymptotic",
            BoundKind::ThermalSc => "thermal_sc",
            BoundKind::ThermalWc => "thermal_wc",
            BoundKind::ThermalSecondOrder => "thermal_second_order",
            BoundKind::AchievabilityEstimate => "achievability_estimate",
        }
    }

    pub fn needs_thermal_noise(&self) -> bool {
        matches!(
            self,
            BoundKind::ThermalAsymptotic | BoundKind::ThermalSc | BoundKind::ThermalWc | BoundKind::ThermalSecondOrder
        )
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown bound kind '{s}'")))
    }
}

/// One row of an emitted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCurvePoint {
    pub n: u64,
    pub kind: BoundKind,
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl BoundCurvePoint {
    pub fn new(n: u64, kind: BoundKind, raw: f64, clamp: bool) -> Self {
        let clamped = clamp && raw < 0.0;
        Self { n, kind, value: if clamped { 0.0 } else { raw }, raw, clamped }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_loss_values() {
        assert_eq!(pure_loss_asymptotic(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(pure_loss_asymptotic(0.75).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pure_loss_asymptotic((-1f64).exp()).unwrap(), 0.661_728_357_628_967_4, epsilon = 1e-14);
        assert_abs_diff_eq!(pure_loss_strong_converse(0.5, 1000.0, 0.5).unwrap(), 1.005_754_9, epsilon = 1e-7);
        assert_abs_diff_eq!(pure_loss_strong_converse(0.5, 1.0, 0.0).unwrap(), 1.0 + 6f64.log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(pure_loss_strong_converse(0.5, 1e15, 0.3).unwrap(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pure_loss_weak_converse(0.5, 100.0, 0.5).unwrap(), 2.02, epsilon = 1e-14);
        assert_abs_diff_eq!(pure_loss_weak_converse(0.5, 1.0, 0.5).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pure_loss_weak_converse(0.5, 1e15, 1e-15).unwrap(), 1.0, epsilon = 1e-12);
        assert!(pure_loss_asymptotic(1.0).is_err());
    }

    #[test]
    fn thermal_values() {
        assert_abs_diff_eq!(thermal_asymptotic(0.5, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_asymptotic(0.9, 0.1).unwrap(), 2.853_681_7, epsilon = 1e-7);
        let raw = thermal_asymptotic(0.5, 2.0).unwrap();
        assert_abs_diff_eq!(raw, 3.0 - (3.0 * 3f64.log2() - 2.0), epsilon = 1e-14);
        assert_abs_diff_eq!(raw, 0.245_112_497_836_531_3, epsilon = 1e-14);
        let p = BoundCurvePoint::new(10, BoundKind::ThermalSecondOrder, -0.25, true);
        assert!(p.clamped && p.value == 0.0 && p.raw == -0.25);
        let p = BoundCurvePoint::new(10, BoundKind::ThermalSecondOrder, -0.25, false);
        assert!(!p.clamped && p.value == -0.25);
        assert_abs_diff_eq!(thermal_variance(0.9, 0.1).unwrap(), 1.2033, epsilon = 1e-4);
    }

    #[test]
    fn thermal_asymptotic_vanishes_only_at_entanglement_breaking_threshold() {
        for &n_b in &[0.01, 0.1, 1.0, 3.0] {
            let eta_star = n_b / (n_b + 1.0);
            assert!(thermal_asymptotic(eta_star, n_b).unwrap().abs() < 1e-12);
            for &f in &[0.3, 0.9, 1.1, 1.5] {
                let eta = (eta_star * f).min(0.999);
                assert!(thermal_asymptotic(eta, n_b).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn thermal_converse_values() {
        let t = thermal_asymptotic(0.9, 0.1).unwrap();
        assert_abs_diff_eq!(thermal_strong_converse(0.9, 0.1, 1e16, 0.1).unwrap(), t, epsilon = 1e-7);
        for eps in [1e-10, 0.1, 0.5, 0.9] {
            assert!(thermal_strong_converse(0.9, 0.1, 1e12, eps).unwrap() > t);
        }
        let h = binary_entropy(0.2).unwrap();
        assert_abs_diff_eq!(
            thermal_weak_converse(0.5, 1.0, 50.0, 0.2).unwrap(),
            h / (50.0 * 0.8),
            epsilon = 1e-15
        );
        let w = thermal_weak_converse(0.9, 0.1, 1e3, 1e-10).unwrap();
        assert_abs_diff_eq!(w, 2.853_681_7 + binary_entropy(1e-10).unwrap() / 1e3, epsilon = 1e-7);
    }

    #[test]
    fn auxiliary_formulas() {
        let h = binary_entropy(0.3).unwrap();
        assert_abs_diff_eq!(hypothesis_testing_weak_bound(0.0, 0.3).unwrap(), h / 0.7, epsilon = 1e-15);
        assert_eq!(hypothesis_testing_weak_bound(1.0, 0.5).unwrap(), 4.0);
        assert_abs_diff_eq!(hypothesis_testing_weak_bound(1.0, 1e-15).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(chebyshev_lower_expansion(0.7, 0.0, 10.0, 0.1).unwrap(), 7.0);
        assert_abs_diff_eq!(chebyshev_lower_expansion(1.0, 1.0, 100.0, 0.25).unwrap(), 80.0, epsilon = 1e-12);
    }

    #[test]
    fn second_order_at_half_is_d() {
        let b = second_order_from_moments(0.3, 2.0, 1e3, 0.5, false);
        assert_eq!(b.raw, 0.3);
        let b = second_order_from_moments(0.3, 2.0, 1e3, 1e-10, false);
        assert!(b.raw < 0.3 && b.small_n);
        let with_log = second_order_from_moments(0.3, 2.0, 1e3, 1e-10, true);
        assert_abs_diff_eq!(with_log.raw - b.raw, 1e3f64.log2() / 2e3, epsilon = 1e-15);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(k.as_str().parse::<BoundKind>().unwrap(), k);
        }
        assert!("nope".parse::<BoundKind>().is_err());
    }
}
