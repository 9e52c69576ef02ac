//! Zero-mean Gaussian states.
//!
//! Quadratures are ordered `(q1, .., qm, p1, .., pm)` and the vacuum has unit
//! variance. Two-mode states live in standard form
//! `V = [[a, c], [c, b]] ⊕ [[a, -c], [-c, b]]`; single thermal modes have
//! their own path so that no spurious unit eigenvalues appear.

use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::error::{Error, Result};

/// States with ν₋ ≤ 1 + TOL_FAITHFUL have no usable exponential form.
pub const TOL_FAITHFUL: f64 = 1e-9;

/// Ω = [[0, 1], [-1, 0]] ⊗ I_m.
pub fn symplectic_form(m: usize) -> Result<DMatrix<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("mode count must be at least 1".into()));
    }
    let mut o = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        o[(i, m + i)] = 1.0;
        o[(m + i, i)] = -1.0;
    }
    Ok(o)
}

pub(crate) fn arcoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

/// log₂((ν² − 1)/4), written to keep precision when ν is close to 1.
fn log2_z_factor(nu: f64) -> f64 {
    ((nu - 1.0) * (nu + 1.0) / 4.0).log2()
}

/// `G` and `log₂ Z` of ρ = exp(−½ x̂ᵀ G x̂)/Z.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialForm {
    pub g_matrix: DMatrix<f64>,
    pub log2_z: f64,
}

/// Anything the divergence formulas can consume.
pub trait GaussianState {
    fn mode_count(&self) -> usize;
    fn covariance(&self) -> DMatrix<f64>;
    fn exponential_form(&self) -> Result<ExponentialForm>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeStandardForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticData {
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub omega_plus: f64,
    /// Carries the sign of `c`, so negative correlations reconstruct too.
    pub omega_minus: f64,
    pub y_discriminant: f64,
    /// Eigenvalues in mode order, `[(√y − (b − a))/2, (√y + (b − a))/2]`.
    pub modal: [f64; 2],
}

impl SymplecticData {
    /// S = (I₂ ⊕ σ_Z) S₀^⊕2 (I₂ ⊕ σ_Z) with S₀ = [[ω₊, ω₋], [ω₋, ω₊]].
    pub fn symplectic_matrix(&self) -> Matrix4<f64> {
        let (wp, wm) = (self.omega_plus, self.omega_minus);
        Matrix4::new(
            wp, wm, 0.0, 0.0, //
            wm, wp, 0.0, 0.0, //
            0.0, 0.0, wp, -wm, //
            0.0, 0.0, -wm, wp,
        )
    }

    /// D ⊕ D with the mode-ordered eigenvalues.
    pub fn williamson_diagonal(&self) -> Matrix4<f64> {
        let [d1, d2] = self.modal;
        Matrix4::from_diagonal(&nalgebra::Vector4::new(d1, d2, d1, d2))
    }
}

impl TwoModeStandardForm {
    pub const VACUUM: Self = Self { a: 1.0, b: 1.0, c: 0.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn covariance_matrix(&self) -> Matrix4<f64> {
        let Self { a, b, c } = *self;
        Matrix4::new(
            a, c, 0.0, 0.0, //
            c, b, 0.0, 0.0, //
            0.0, 0.0, a, -c, //
            0.0, 0.0, -c, b,
        )
    }

    pub fn symplectic_data(&self) -> Result<SymplecticData> {
        let Self { a, b, c } = *self;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Domain(format!("non-finite entries ({a}, {b}, {c})")));
        }
        let s = a + b;
        let y = s * s - 4.0 * c * c;
        if y < 0.0 || s <= 0.0 {
            return Err(Error::Domain(format!(
                "(a + b)² − 4c² = {y:e} < 0, not a standard-form state"
            )));
        }
        if y == 0.0 {
            return Err(Error::Domain("(a + b)² − 4c² = 0, symplectic form undefined".into()));
        }
        let sy = y.sqrt();
        let gap = (b - a).abs();
        // ν₋ν₊ = ab − c² avoids cancellation in (√y − |b − a|)/2.
        let large = 0.5 * (sy + gap);
        let small = (a * b - c * c) / large;
        let modal = if b >= a { [small, large] } else { [large, small] };
        let omega_plus = ((s + sy) / (2.0 * sy)).sqrt();
        // a + b − √y = 4c²/(a + b + √y)
        let omega_minus = (4.0 * c * c / (s + sy) / (2.0 * sy)).sqrt() * c.signum();
        let omega_minus = if c == 0.0 { 0.0 } else { omega_minus };
        Ok(SymplecticData {
            nu_minus: small.min(large),
            nu_plus: small.max(large),
            omega_plus,
            omega_minus,
            y_discriminant: y,
            modal,
        })
    }

    /// Smallest symplectic eigenvalue, NaN when the discriminant is not positive.
    pub fn nu_minus(&self) -> f64 {
        self.symplectic_data().map(|d| d.nu_minus).unwrap_or(f64::NAN)
    }

    pub fn check_physical(&self) -> bool {
        check_physical(self)
    }

    pub fn is_faithful(&self) -> bool {
        self.check_physical() && self.nu_minus() > 1.0 + TOL_FAITHFUL
    }

    pub fn mean_photon_number(&self) -> f64 {
        mean_photon_number(self)
    }
}

impl GaussianState for TwoModeStandardForm {
    fn mode_count(&self) -> usize {
        2
    }

    fn covariance(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(4, 4, self.covariance_matrix().iter().copied())
    }

    fn exponential_form(&self) -> Result<ExponentialForm> {
        exponential_form(self)
    }
}

pub fn symplectic_data(state: &TwoModeStandardForm) -> Result<SymplecticData> {
    state.symplectic_data()
}

/// G = −2 Ω S [arcoth D]^⊕2 Sᵀ Ω and log₂ Z = Σ log₂((νᵢ² − 1)/4).
pub fn exponential_form(state: &TwoModeStandardForm) -> Result<ExponentialForm> {
    let sd = state.symplectic_data()?;
    if !(sd.nu_minus > 1.0 + TOL_FAITHFUL) {
        return Err(Error::NotFaithful { nu_minus: sd.nu_minus, tol: TOL_FAITHFUL });
    }
    let s = sd.symplectic_matrix();
    let [d1, d2] = sd.modal;
    let ac = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        arcoth(d1),
        arcoth(d2),
        arcoth(d1),
        arcoth(d2),
    ));
    let o = omega4();
    let g = -2.0 * o * s * ac * s.transpose() * o;
    let g = 0.5 * (g + g.transpose());
    Ok(ExponentialForm {
        g_matrix: DMatrix::from_iterator(4, 4, g.iter().copied()),
        log2_z: log2_z_factor(d1) + log2_z_factor(d2),
    })
}

fn omega4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// True iff a, b ≥ 1 and ν₋ ≥ 1 − 10⁻¹².
pub fn check_physical(state: &TwoModeStandardForm) -> bool {
    let TwoModeStandardForm { a, b, .. } = *state;
    if !(a >= 1.0 && b >= 1.0) {
        return false;
    }
    match state.symplectic_data() {
        Ok(d) => d.nu_minus >= 1.0 - 1e-12,
        Err(_) => false,
    }
}

/// Total mean photon number (a + b)/2 − 1.
pub fn mean_photon_number(state: &TwoModeStandardForm) -> f64 {
    0.5 * (state.a + state.b) - 1.0
}

/// Single-mode thermal state with covariance (2N + 1) I₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalMode {
    pub n_mean: f64,
}

impl ThermalMode {
    pub fn new(n_mean: f64) -> Result<Self> {
        if !(n_mean >= 0.0) || !n_mean.is_finite() {
            return Err(Error::Domain(format!("mean photon number {n_mean} must be finite and >= 0")));
        }
        Ok(Self { n_mean })
    }

    pub fn nu(&self) -> f64 {
        2.0 * self.n_mean + 1.0
    }

    pub fn covariance_matrix(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.nu()
    }
}

impl GaussianState for ThermalMode {
    fn mode_count(&self) -> usize {
        1
    }

    fn covariance(&self) -> DMatrix<f64> {
        DMatrix::identity(2, 2) * self.nu()
    }

    /// G = 2 arcoth(ν) I = ln(1 + 1/N) I, Z = N(N + 1).
    fn exponential_form(&self) -> Result<ExponentialForm> {
        let nu = self.nu();
        if !(nu > 1.0 + TOL_FAITHFUL) {
            return Err(Error::NotFaithful { nu_minus: nu, tol: TOL_FAITHFUL });
        }
        let n = self.n_mean;
        Ok(ExponentialForm {
            g_matrix: DMatrix::identity(2, 2) * (1.0 / n).ln_1p(),
            log2_z: (n * (n + 1.0)).log2(),
        })
    }
}
