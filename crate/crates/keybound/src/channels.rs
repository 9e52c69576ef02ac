//! Single-mode phase-insensitive Gaussian channels and their teleportation
//! simulation by a two-mode resource state.

use nalgebra::{Matrix2, Matrix6, SymmetricEigen, Vector2};

use crate::error::{Error, Result};
use crate::gaussian::TwoModeStandardForm;

/// V ↦ τV + yI, i.e. X = √τ I₂, Y = y I₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseInsensitiveChannel {
    pub tau: f64,
    pub y: f64,
}

const CP_TOL: f64 = 1e-12;

impl PhaseInsensitiveChannel {
    pub fn new(tau: f64, y: f64) -> Result<Self> {
        let ch = Self { tau, y };
        if !ch.is_physical() {
            return Err(Error::Unphysical(format!(
                "channel (tau = {tau}, y = {y}) violates y >= |1 - tau|"
            )));
        }
        Ok(ch)
    }

    pub const IDENTITY: Self = Self { tau: 1.0, y: 0.0 };

    pub fn is_physical(&self) -> bool {
        self.tau >= 0.0 && self.tau.is_finite() && self.y.is_finite() && self.y >= (1.0 - self.tau).abs() - CP_TOL
    }

    pub fn x_matrix(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.tau.sqrt()
    }

    pub fn y_matrix(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.y
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &Self) -> Self {
        Self { tau: self.tau * then.tau, y: then.tau * self.y + then.y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalChannelParams {
    pub eta: f64,
    pub n_b: f64,
}

impl ThermalChannelParams {
    pub fn new(eta: f64, n_b: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidArgument(format!("transmissivity {eta} outside (0, 1)")));
        }
        if n_b == 0.0 {
            return Err(Error::InvalidArgument(
                "N_B = 0 is the pure-loss channel, which has no finite-energy teleportation simulation; use N_B > 0"
                    .into(),
            ));
        }
        if !(n_b > 0.0) || !n_b.is_finite() {
            return Err(Error::InvalidArgument(format!("thermal photon number {n_b} must be > 0")));
        }
        Ok(Self { eta, n_b })
    }

    /// (1 − η)(2N_B + 1).
    pub fn noise(&self) -> f64 {
        (1.0 - self.eta) * (2.0 * self.n_b + 1.0)
    }
}

pub fn thermal_channel(params: &ThermalChannelParams) -> PhaseInsensitiveChannel {
    PhaseInsensitiveChannel { tau: params.eta, y: params.noise() }
}

/// Physical single-mode covariance: symmetric, positive, det ≥ 1.
pub fn is_physical_single_mode(v: &Matrix2<f64>) -> bool {
    let sym = (v[(0, 1)] - v[(1, 0)]).abs() <= 1e-12 * v.amax().max(1.0);
    sym && v[(0, 0)] > 0.0 && v[(1, 1)] > 0.0 && v.determinant() >= 1.0 - 1e-10
}

pub fn apply_channel(ch: &PhaseInsensitiveChannel, v_in: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    if !ch.is_physical() {
        return Err(Error::Unphysical(format!("channel {ch:?}")));
    }
    if !is_physical_single_mode(v_in) {
        return Err(Error::Unphysical(format!("input covariance {v_in:?}")));
    }
    Ok(v_in * ch.tau + Matrix2::identity() * ch.y)
}

/// η = exp(−L/L₀).
pub fn eta_from_distance(l_km: f64, l0_km: f64) -> Result<f64> {
    if !(l0_km > 0.0) {
        return Err(Error::InvalidArgument(format!("L0 = {l0_km} must be positive")));
    }
    if !(l_km >= 0.0) {
        return Err(Error::InvalidArgument(format!("distance {l_km} must be >= 0")));
    }
    Ok((-l_km / l0_km).exp())
}

/// τ = g², y = g²a + 2gc + b.
pub fn simulated_channel_from_resource(state: &TwoModeStandardForm, g: f64) -> Result<PhaseInsensitiveChannel> {
    simulated_channel_with_gain_squared(state, g, g * g)
}

pub(crate) fn simulated_channel_with_gain_squared(
    state: &TwoModeStandardForm,
    g: f64,
    g2: f64,
) -> Result<PhaseInsensitiveChannel> {
    if !state.check_physical() {
        return Err(Error::Unphysical(format!("resource state {state:?}")));
    }
    if g == 0.0 || !g.is_finite() {
        return Err(Error::InvalidArgument(format!("gain {g} must be finite and nonzero")));
    }
    let ch = PhaseInsensitiveChannel { tau: g2, y: g2 * state.a + 2.0 * g * state.c + state.b };
    if !ch.is_physical() {
        return Err(Error::Unphysical(format!(
            "simulated channel (tau = {}, y = {}) violates y >= |1 - tau|",
            ch.tau, ch.y
        )));
    }
    Ok(ch)
}

// Quadrature indices for modes (input, A, B) in (q..., p...) order.
const Q_IN: usize = 0;
const Q_A: usize = 1;
const Q_B: usize = 2;
const P_IN: usize = 3;
const P_A: usize = 4;
const P_B: usize = 5;

const MEASUREMENT_THRESHOLD: f64 = 1e-12;

/// Runs the teleportation protocol on second moments and returns the
/// unconditional output covariance.
///
/// Input and resource mode A meet on a 50-50 beamsplitter; q₊ on the first
/// output port and p₋ on the second are homodyned; mode B is conditioned on
/// the outcomes and then displaced by g√2 times them.
pub fn teleport_verify(state: &TwoModeStandardForm, g: f64, v_in: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    if !state.check_physical() {
        return Err(Error::Unphysical(format!("resource state {state:?}")));
    }
    if !is_physical_single_mode(v_in) {
        return Err(Error::Unphysical(format!("input covariance {v_in:?}")));
    }
    let mut sigma = Matrix6::zeros();
    sigma[(Q_IN, Q_IN)] = v_in[(0, 0)];
    sigma[(P_IN, P_IN)] = v_in[(1, 1)];
    sigma[(Q_IN, P_IN)] = v_in[(0, 1)];
    sigma[(P_IN, Q_IN)] = v_in[(1, 0)];
    let TwoModeStandardForm { a, b, c } = *state;
    sigma[(Q_A, Q_A)] = a;
    sigma[(P_A, P_A)] = a;
    sigma[(Q_B, Q_B)] = b;
    sigma[(P_B, P_B)] = b;
    sigma[(Q_A, Q_B)] = c;
    sigma[(Q_B, Q_A)] = c;
    sigma[(P_A, P_B)] = -c;
    sigma[(P_B, P_A)] = -c;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut bs = Matrix6::identity();
    for (x, y) in [(Q_IN, Q_A), (P_IN, P_A)] {
        bs[(x, x)] = h;
        bs[(x, y)] = h;
        bs[(y, x)] = h;
        bs[(y, y)] = -h;
    }
    let sigma = bs * sigma * bs.transpose();

    // Measured: q₊ (index Q_IN after mixing) and p₋ (index P_A after mixing).
    let m = [Q_IN, P_A];
    let out = [Q_B, P_B];
    let pick = |r: [usize; 2], c: [usize; 2]| {
        Matrix2::new(sigma[(r[0], c[0])], sigma[(r[0], c[1])], sigma[(r[1], c[0])], sigma[(r[1], c[1])])
    };
    let s_mm = pick(m, m);
    let s_bm = pick(out, m);
    let s_bb = pick(out, out);

    let eig = SymmetricEigen::new(s_mm);
    let min_eig = eig.eigenvalues.min();
    if min_eig < MEASUREMENT_THRESHOLD {
        return Err(Error::DegenerateMeasurement(min_eig));
    }
    let inv_diag = Matrix2::from_diagonal(&Vector2::new(1.0 / eig.eigenvalues[0], 1.0 / eig.eigenvalues[1]));
    let s_mm_pinv = eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();

    let gain = s_bm * s_mm_pinv;
    let conditional = s_bb - gain * s_bm.transpose();
    debug_assert!(
        (s_bb - conditional).symmetric_eigenvalues().min() >= -1e-9 * s_bb.amax(),
        "conditioning must not increase uncertainty"
    );

    let feedforward = Matrix2::identity() * (g * std::f64::consts::SQRT_2);
    let k = gain + feedforward;
    let output = conditional + k * s_mm * k.transpose();
    Ok(0.5 * (output + output.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn thermal_channel_values() {
        let ch = thermal_channel(&ThermalChannelParams::new(0.6, 0.5).unwrap());
        assert_abs_diff_eq!(ch.tau, 0.6);
        assert_abs_diff_eq!(ch.y, 0.8, epsilon = 1e-15);
        let ch = thermal_channel(&ThermalChannelParams::new(0.5, 1.0).unwrap());
        assert_eq!((ch.tau, ch.y), (0.5, 1.5));
        let e = ThermalChannelParams::new(0.5, 0.0).unwrap_err();
        assert!(e.to_string().contains("pure-loss"));
        assert!(ThermalChannelParams::new(1.0, 0.1).is_err());
        assert!(ThermalChannelParams::new(0.5, -1.0).is_err());
    }

    #[test]
    fn channel_action() {
        let v = Matrix2::new(3.0, 0.4, 0.4, 2.0);
        assert_eq!(apply_channel(&PhaseInsensitiveChannel::IDENTITY, &v).unwrap(), v);
        let ch = PhaseInsensitiveChannel::new(0.5, 1.5).unwrap();
        assert_eq!(apply_channel(&ch, &Matrix2::identity()).unwrap(), Matrix2::identity() * 2.0);
        assert_eq!(apply_channel(&ch, &(Matrix2::identity() * 3.0)).unwrap(), Matrix2::identity() * 3.0);
        assert!(apply_channel(&ch, &(Matrix2::identity() * 0.5)).is_err());
        assert!(PhaseInsensitiveChannel::new(0.5, 0.2).is_err());
    }

    #[test]
    fn distance_conversion() {
        assert_eq!(eta_from_distance(0.0, 0.542).unwrap(), 1.0);
        assert_abs_diff_eq!(eta_from_distance(0.542, 0.542).unwrap(), 0.367_879_4, epsilon = 1e-7);
        assert_abs_diff_eq!(eta_from_distance(1.084, 0.542).unwrap(), 0.135_335_3, epsilon = 1e-7);
        assert!(eta_from_distance(1.0, 0.0).is_err());
    }

    #[test]
    fn simulated_channel_values() {
        let s = TwoModeStandardForm::new(2.0, 3.0, 1.0);
        let ch = simulated_channel_from_resource(&s, 1.0).unwrap();
        assert_eq!((ch.tau, ch.y), (1.0, 7.0));
        let ch = simulated_channel_from_resource(&s, -1.0).unwrap();
        assert_eq!((ch.tau, ch.y), (1.0, 3.0));
        let g = 0.3f64.sqrt();
        let ch = simulated_channel_from_resource(&s, g).unwrap();
        assert_eq!(ch.tau, g * g);
        assert!(simulated_channel_from_resource(&s, 0.0).is_err());
    }

    #[test]
    fn teleportation_matches_channel() {
        let s = TwoModeStandardForm::new(2.0, 3.0, 1.0);
        for g in [-1.3, -0.6, 0.4, 1.0] {
            let v = Matrix2::new(1.7, 0.3, 0.3, 2.2);
            let out = teleport_verify(&s, g, &v).unwrap();
            let ch = simulated_channel_from_resource(&s, g).unwrap();
            let expect = apply_channel(&ch, &v).unwrap();
            assert!((out - expect).amax() < 1e-10, "g = {g}: {out} vs {expect}");
        }
    }

    #[test]
    fn teleportation_fixed_point() {
        let s = TwoModeStandardForm::new(2.5, 2.0, 1.2);
        let g = -0.7;
        let ch = simulated_channel_from_resource(&s, g).unwrap();
        let fixed = Matrix2::identity() * (ch.y / (1.0 - ch.tau));
        let out = teleport_verify(&s, g, &fixed).unwrap();
        assert!((out - fixed).amax() < 1e-10);
    }

    #[test]
    fn composition() {
        let c1 = PhaseInsensitiveChannel::new(0.7, 0.5).unwrap();
        let c2 = PhaseInsensitiveChannel::new(0.4, 1.1).unwrap();
        let v = Matrix2::new(2.0, 0.1, 0.1, 1.5);
        let two = apply_channel(&c2, &apply_channel(&c1, &v).unwrap()).unwrap();
        let one = apply_channel(&c1.then(&c2), &v).unwrap();
        assert!((two - one).amax() < 1e-12);
    }
}
