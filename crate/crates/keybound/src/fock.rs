//! Truncated number-basis oracle for states diagonal in the Fock basis.
//!
//! Everything here is a direct sum over photon numbers, independent of the
//! symplectic machinery, so it can referee the Gaussian formulas.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

pub const MAX_TAIL: f64 = 1e-12;
pub const MAX_N_MAX: usize = 100_000;

/// Probabilities over retained number states plus the dropped mass.
///
/// Natural-log weights are kept alongside: far in the tail the probabilities
/// underflow to subnormals while their logarithms stay exact.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    pub probabilities: Vec<f64>,
    pub ln_probabilities: Vec<f64>,
    pub tail: f64,
}

fn geometric_tail(n_mean: f64, n_max: usize) -> f64 {
    let r = n_mean / (n_mean + 1.0);
    r.powf(n_max as f64 + 1.0)
}

/// Σ_{n>M} n² pₙ for θ(N), in closed form.
fn second_moment_tail(n_mean: f64, n_max: usize) -> f64 {
    let r = n_mean / (n_mean + 1.0);
    let m1 = n_max as f64 + 1.0;
    r.powf(m1) * (m1 * m1 + 2.0 * m1 * r / (1.0 - r) + r * (1.0 + r) / (1.0 - r).powi(2))
}

/// Smallest n_max whose dropped mass and dropped n²-weighted mass are both
/// ≤ 10⁻¹². The log-likelihood ratio grows linearly in n, so the second
/// condition is what keeps V accurate.
pub fn suggested_n_max(n_mean: f64) -> usize {
    let r = n_mean / (n_mean + 1.0);
    let mut k = ((MAX_TAIL.ln() / r.ln()).ceil() as usize).saturating_sub(1).max(1);
    while k < MAX_N_MAX && second_moment_tail(n_mean, k) > MAX_TAIL {
        k += 1 + k / 64;
    }
    k
}

/// θ(N) on {0, …, n_max}: pₙ = (1/(N + 1))(N/(N + 1))ⁿ.
pub fn thermal_diagonal(n_mean: f64, n_max: usize) -> Result<DiagonalState> {
    if !(n_mean > 0.0) || !n_mean.is_finite() {
        return Err(Error::Domain(format!("mean photon number {n_mean} must be > 0")));
    }
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let tail = geometric_tail(n_mean, n_max);
    if tail > MAX_TAIL {
        return Err(Error::TruncationInsufficient { tail, suggested: suggested_n_max(n_mean) });
    }
    let ln_r = (n_mean / (n_mean + 1.0)).ln();
    let ln_p0 = -(n_mean.ln_1p());
    let ln_probabilities: Vec<f64> = (0..=n_max).map(|n| ln_p0 + n as f64 * ln_r).collect();
    let probabilities = ln_probabilities.iter().map(|l| l.exp()).collect();
    Ok(DiagonalState { probabilities, ln_probabilities, tail })
}

/// Truncation sized for every listed mean, capped at 10⁵.
pub fn auto_n_max(means: &[f64]) -> Result<usize> {
    let mut n = 1;
    for &m in means {
        let s = suggested_n_max(m);
        if s > MAX_N_MAX {
            return Err(Error::TruncationInsufficient { tail: geometric_tail(m, MAX_N_MAX), suggested: s });
        }
        n = n.max(s);
    }
    Ok(n)
}

impl DiagonalState {
    pub fn from_probabilities(probabilities: Vec<f64>, tail: f64) -> Self {
        let ln_probabilities = probabilities.iter().map(|p| p.ln()).collect();
        Self { probabilities, ln_probabilities, tail }
    }

    /// p ⊗ q, flattened row-major over (n₁, n₂).
    pub fn product(&self, other: &DiagonalState) -> DiagonalState {
        let len = self.probabilities.len() * other.probabilities.len();
        let mut ln_probabilities = Vec::with_capacity(len);
        for &p in &self.ln_probabilities {
            for &q in &other.ln_probabilities {
                ln_probabilities.push(p + q);
            }
        }
        let probabilities = ln_probabilities.iter().map(|l| l.exp()).collect();
        // Mass lost from either factor: 1 − (1 − t₁)(1 − t₂).
        let tail = self.tail + other.tail - self.tail * other.tail;
        DiagonalState { probabilities, ln_probabilities, tail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDivergences {
    pub d: f64,
    pub v: f64,
    pub t: f64,
    pub tail_p: f64,
    pub tail_q: f64,
}

/// D = Σ pₙ log₂(pₙ/qₙ), V and T the second and third absolute central moments.
pub fn oracle_divergences(p: &DiagonalState, q: &DiagonalState) -> Result<OracleDivergences> {
    if p.probabilities.len() != q.probabilities.len() {
        return Err(Error::InvalidArgument(format!(
            "truncations differ: {} vs {} levels",
            p.probabilities.len(),
            q.probabilities.len()
        )));
    }
    let mut llr = Vec::with_capacity(p.probabilities.len());
    for (i, (&lp, &lq)) in p.ln_probabilities.iter().zip(&q.ln_probabilities).enumerate() {
        if lp > f64::NEG_INFINITY && lq == f64::NEG_INFINITY {
            return Err(Error::UndefinedDivergence(i));
        }
        llr.push(if lp > f64::NEG_INFINITY { (lp - lq) / LN_2 } else { 0.0 });
    }
    let d: f64 = p.probabilities.iter().zip(&llr).map(|(pi, l)| pi * l).sum();
    let (mut v, mut t) = (0.0, 0.0);
    for (pi, l) in p.probabilities.iter().zip(&llr) {
        let x = (l - d).abs();
        v += pi * x * x;
        t += pi * x * x * x;
    }
    Ok(OracleDivergences { d, v, t, tail_p: p.tail, tail_q: q.tail })
}

/// Σₖ C(n, k) pᵏ (1 − p)^{n−k} k, summed term by term.
pub fn binomial_mean_sum(n: usize, p: f64) -> f64 {
    let ln_fact = ln_factorials(n);
    binomial_mean_with(n, p, &ln_fact)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn binomial_mean_with(n: usize, p: f64, ln_fact: &[f64]) -> f64 {
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (1..=n)
        .map(|k| {
            let ln_c = ln_fact[n] - ln_fact[k] - ln_fact[n - k];
            k as f64 * (ln_c + k as f64 * lp + (n - k) as f64 * lq).exp()
        })
        .sum()
}

/// (1/(N_S + 1)) Σₙ n (N_S/(N_S + 1))ⁿ Σₖ C(n, k)(1 − η)ᵏ η^{n−k} k, by direct summation.
pub fn cross_moment_double_sum(n_s: f64, eta: f64, n_max: usize) -> Result<f64> {
    if !(n_s > 0.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("invalid (N_S, eta) = ({n_s}, {eta})")));
    }
    let r = n_s / (n_s + 1.0);
    // Σ_{n>M} n² rⁿ in closed form, scaled like the retained sum.
    let tail_at = |m: usize| {
        let m1 = m as f64 + 1.0;
        (1.0 - eta) / (n_s + 1.0)
            * r.powf(m1)
            * (m1 * m1 / (1.0 - r) + 2.0 * m1 * r / (1.0 - r).powi(2) + r * (1.0 + r) / (1.0 - r).powi(3))
    };
    let tail = tail_at(n_max);
    if tail > MAX_TAIL {
        let mut suggested = n_max.max(1);
        while suggested < MAX_N_MAX && tail_at(suggested) > MAX_TAIL {
            suggested *= 2;
        }
        return Err(Error::TruncationInsufficient { tail, suggested });
    }
    let ln_fact = ln_factorials(n_max);
    let ln_r = r.ln();
    let total: f64 = (1..=n_max)
        .map(|n| n as f64 * (n as f64 * ln_r).exp() * binomial_mean_with(n, 1.0 - eta, &ln_fact))
        .sum();
    Ok(total / (n_s + 1.0))
}
