//! Finite-energy resource states that teleportation-simulate a thermal
//! channel.
//!
//! Unknowns are (a, b, c) with the gain fixed to g = ±√η. The channel match
//! eliminates b = y − ηa − 2gc. For fixed a, the condition ν₋ = 1 + δ reads
//! c² = (min(a, b) − ν)(max(a, b) + ν), which splits into two quadratics in c:
//!
//! ```text
//! b ≥ a:  c² + 2g(a − ν)c − (a − ν)(y − ηa + ν) = 0
//! a ≥ b:  c² + 2g(a + ν)c − (a + ν)(y − ηa − ν) = 0
//! ```
//!
//! Each of the four roots is a smooth branch c(a). The outer problem
//! REE(a) = target is bracketed on every branch over a log-spaced scan.

use nalgebra::Matrix2;

use crate::bounds::thermal_asymptotic;
use crate::channels::{teleport_verify, ThermalChannelParams};
use crate::divergences::relative_entropy;
use crate::entanglement::{suboptimal_ree, SeparableReference};
use crate::error::{Error, NoBracket, Result};
use crate::gaussian::{TwoModeStandardForm, TOL_FAITHFUL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainSign {
    Negative,
    Positive,
}

impl GainSign {
    pub fn value(self) -> f64 {
        match self {
            GainSign::Negative => -1.0,
            GainSign::Positive => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub delta: f64,
    pub tol_constraint: f64,
    pub tol_ree: f64,
    /// Defaults to [1 + δ, 10⁴].
    pub a_bracket: Option<(f64, f64)>,
    pub max_iter: usize,
    pub gain_sign_order: [GainSign; 2],
    pub scan_points: usize,
    /// Return the closest state on the constraint curve when no root exists.
    pub best_effort: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            tol_constraint: 1e-8,
            tol_ree: 1e-6,
            a_bracket: None,
            max_iter: 200,
            gain_sign_order: [GainSign::Negative, GainSign::Positive],
            scan_points: 400,
            best_effort: false,
        }
    }
}

impl SolverOptions {
    pub fn with_delta(delta: f64) -> Self {
        Self { delta, ..Self::default() }
    }

    pub fn bracket(&self) -> (f64, f64) {
        self.a_bracket.unwrap_or((1.0 + self.delta, 1e4))
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket();
        if !(self.delta > 0.0) || !(self.tol_constraint > 0.0) || !(self.tol_ree > 0.0) {
            return Err(Error::InvalidArgument("delta and tolerances must be positive".into()));
        }
        if !(lo < hi) || !(lo >= 1.0) {
            return Err(Error::InvalidArgument(format!("a bracket [{lo}, {hi}] is empty or below 1")));
        }
        if self.scan_points < 2 || self.max_iter == 0 {
            return Err(Error::InvalidArgument("scan_points >= 2 and max_iter >= 1 required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// g²a + 2gc + b − (1 − η)(2N_B + 1)
    pub y: f64,
    /// ν₋ − (1 + δ)
    pub nu_minus: f64,
    /// suboptimal REE − thermal_asymptotic, bits
    pub ree: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Sign change of the REE residual refined by bisection/secant.
    Bracketed,
    /// Residual touches zero without changing sign; located by golden section.
    Tangent,
    /// No root; closest state on the constraint curve.
    BestEffort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceState {
    pub state: TwoModeStandardForm,
    pub gain_sign: f64,
    pub eta: f64,
    pub n_b: f64,
    pub delta: f64,
    pub residuals: Residuals,
    pub energy: f64,
    pub method: SolveMethod,
}

impl ResourceState {
    /// ±√η.
    pub fn g(&self) -> f64 {
        self.gain_sign * self.eta.sqrt()
    }

    /// g² is η by construction; the gain is never solved for.
    pub fn g_squared(&self) -> f64 {
        self.eta
    }

    pub fn converged(&self) -> bool {
        self.method != SolveMethod::BestEffort
    }

    pub fn state_abs_c(&self) -> TwoModeStandardForm {
        TwoModeStandardForm::new(self.state.a, self.state.b, self.state.c.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    BAboveA,
    AAboveB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Branch {
    case: Case,
    plus: bool,
}

const BRANCHES: [Branch; 4] = [
    Branch { case: Case::BAboveA, plus: true },
    Branch { case: Case::BAboveA, plus: false },
    Branch { case: Case::AAboveB, plus: true },
    Branch { case: Case::AAboveB, plus: false },
];

struct Problem {
    eta: f64,
    y_t: f64,
    g: f64,
    nu: f64,
    target: f64,
    tol_constraint: f64,
}

#[derive(Clone, Copy)]
struct Sample {
    a: f64,
    r: f64,
    state: TwoModeStandardForm,
}

impl Problem {
    fn point(&self, a: f64, br: Branch) -> Option<TwoModeStandardForm> {
        let (k, rhs) = match br.case {
            Case::BAboveA => (a - self.nu, self.y_t - self.eta * a + self.nu),
            Case::AAboveB => (a + self.nu, self.y_t - self.eta * a - self.nu),
        };
        // c² + 2gk c − k·rhs = 0; pick the non-cancelling root first.
        let half_b = self.g * k;
        let disc = half_b * half_b + k * rhs;
        if !(disc >= 0.0) {
            return None;
        }
        let sd = disc.sqrt();
        let big = if -half_b >= 0.0 { -half_b + sd } else { -half_b - sd };
        let small = if big != 0.0 { -k * rhs / big } else { 0.0 };
        let (plus_root, minus_root) = if -half_b >= 0.0 { (big, small) } else { (small, big) };
        let c = if br.plus { plus_root } else { minus_root };
        if !(c >= 0.0) {
            return None;
        }
        let b = self.y_t - self.eta * a - 2.0 * self.g * c;
        let st = TwoModeStandardForm::new(a, b, c);
        if !(a > 1.0 && b > 1.0) || !(st.nu_minus() > 1.0 + TOL_FAITHFUL) {
            return None;
        }
        Some(st)
    }

    fn sample(&self, a: f64, br: Branch) -> Option<Sample> {
        let state = self.point(a, br)?;
        let ree = suboptimal_ree(&state).ok()?;
        let r = ree - self.target;
        r.is_finite().then_some(Sample { a, r, state })
    }

    fn on_constraint(&self, s: &Sample) -> bool {
        (s.state.nu_minus() - self.nu).abs() <= self.tol_constraint
    }

    /// Bisection with secant steps while they shrink the bracket fast enough.
    fn refine(&self, br: Branch, mut lo: Sample, mut hi: Sample, max_iter: usize) -> Option<Sample> {
        let mut force_bisect = false;
        for _ in 0..max_iter {
            let width = hi.a - lo.a;
            if width <= 4.0 * f64::EPSILON * hi.a {
                break;
            }
            let secant = hi.a - hi.r * width / (hi.r - lo.r);
            let x = if !force_bisect && secant > lo.a + 0.05 * width && secant < hi.a - 0.05 * width {
                secant
            } else {
                0.5 * (lo.a + hi.a)
            };
            let s = self.sample(x, br)?;
            if s.r == 0.0 {
                return Some(s);
            }
            if (s.r > 0.0) == (lo.r > 0.0) {
                lo = s;
            } else {
                hi = s;
            }
            force_bisect = hi.a - lo.a > 0.5 * width;
        }
        // The side with D ≥ target keeps the bound conservative.
        Some(if lo.r >= 0.0 { lo } else { hi })
    }

    /// Golden-section minimum of |r| on [lo, hi]; undefined points count as +∞.
    fn golden(&self, br: Branch, lo: f64, hi: f64, max_iter: usize) -> Option<Sample> {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let f = |a: f64| self.sample(a, br);
        let score = |s: &Option<Sample>| s.map(|s| s.r.abs()).unwrap_or(f64::INFINITY);
        let (mut x0, mut x3) = (lo, hi);
        let mut x1 = x3 - inv_phi * (x3 - x0);
        let mut x2 = x0 + inv_phi * (x3 - x0);
        let (mut s1, mut s2) = (f(x1), f(x2));
        let mut best: Option<Sample> = None;
        for s in [s1, s2].into_iter().flatten() {
            if best.is_none_or(|b| s.r.abs() < b.r.abs()) {
                best = Some(s);
            }
        }
        for _ in 0..max_iter {
            if x3 - x0 <= 4.0 * f64::EPSILON * x3 {
                break;
            }
            if score(&s1) <= score(&s2) {
                x3 = x2;
                x2 = x1;
                s2 = s1;
                x1 = x3 - inv_phi * (x3 - x0);
                s1 = f(x1);
                if let Some(s) = s1 {
                    if best.is_none_or(|b| s.r.abs() < b.r.abs()) {
                        best = Some(s);
                    }
                }
            } else {
                x0 = x1;
                x1 = x2;
                s1 = s2;
                x2 = x0 + inv_phi * (x3 - x0);
                s2 = f(x2);
                if let Some(s) = s2 {
                    if best.is_none_or(|b| s.r.abs() < b.r.abs()) {
                        best = Some(s);
                    }
                }
            }
        }
        best
    }
}

/// Outer samples: lo + offsets log-spaced over [10⁻⁷, hi − lo].
fn scan_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let span = hi - lo;
    let first = 1e-7f64.min(span * 1e-3);
    let (l0, l1) = (first.ln(), span.ln());
    let mut out = Vec::with_capacity(points + 1);
    out.push(lo);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        out.push(lo + (l0 + t * (l1 - l0)).exp());
    }
    *out.last_mut().unwrap() = hi;
    out
}

fn build(
    problem: &Problem,
    params: &ThermalChannelParams,
    opts: &SolverOptions,
    s: Sample,
    sign: f64,
    method: SolveMethod,
) -> ResourceState {
    let st = s.state;
    let g = problem.g;
    ResourceState {
        state: st,
        gain_sign: sign,
        eta: params.eta,
        n_b: params.n_b,
        delta: opts.delta,
        residuals: Residuals {
            y: params.eta * st.a + 2.0 * g * st.c + st.b - problem.y_t,
            nu_minus: st.nu_minus() - problem.nu,
            ree: s.r,
        },
        energy: st.mean_photon_number(),
        method,
    }
}

pub fn solve_resource_state(params: &ThermalChannelParams, opts: &SolverOptions) -> Result<ResourceState> {
    let params = ThermalChannelParams::new(params.eta, params.n_b)?;
    opts.validate()?;
    let (lo, hi) = opts.bracket();
    let grid = scan_grid(lo, hi, opts.scan_points);
    let target = thermal_asymptotic(params.eta, params.n_b)?;
    let problem_for = |sign: f64| Problem {
        eta: params.eta,
        y_t: params.noise(),
        g: sign * params.eta.sqrt(),
        nu: 1.0 + opts.delta,
        target,
        tol_constraint: opts.tol_constraint,
    };

    let mut scans = Vec::new();
    for gs in opts.gain_sign_order {
        let sign = gs.value();
        let problem = problem_for(sign);
        let mut roots: Vec<Sample> = Vec::new();
        let mut per_branch = Vec::new();
        for br in BRANCHES {
            let samples: Vec<Option<Sample>> = grid.iter().map(|&a| problem.sample(a, br)).collect();
            for w in samples.windows(2) {
                if let [Some(l), Some(h)] = *w {
                    if l.r == 0.0 && problem.on_constraint(&l) {
                        roots.push(l);
                    } else if (l.r > 0.0) != (h.r > 0.0) && h.r != 0.0 {
                        if let Some(s) = problem.refine(br, l, h, opts.max_iter) {
                            if problem.on_constraint(&s) && s.r.abs() <= opts.tol_ree {
                                roots.push(s);
                            }
                        }
                    }
                }
            }
            per_branch.push((br, samples));
        }
        if let Some(first) = roots.into_iter().min_by(|x, y| x.a.total_cmp(&y.a)) {
            return Ok(build(&problem, &params, opts, first, sign, SolveMethod::Bracketed));
        }
        scans.push((sign, per_branch));
    }

    // No sign change: look for a root that only touches zero.
    let mut candidates: Vec<(f64, f64, Branch, usize)> = Vec::new();
    for (sign, per_branch) in &scans {
        let problem = problem_for(*sign);
        for (br, samples) in per_branch {
            for i in 0..samples.len() {
                let Some(s) = samples[i] else { continue };
                if !problem.on_constraint(&s) {
                    continue;
                }
                let left = i.checked_sub(1).and_then(|j| samples[j]).map_or(f64::INFINITY, |x| x.r.abs());
                let right = samples.get(i + 1).copied().flatten().map_or(f64::INFINITY, |x| x.r.abs());
                if s.r.abs() <= left && s.r.abs() <= right {
                    candidates.push((s.r.abs(), *sign, *br, i));
                }
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best: Option<(Sample, f64)> = None;
    for &(_, sign, br, i) in candidates.iter().take(8) {
        let problem = problem_for(sign);
        let l = grid[i.saturating_sub(1)];
        let h = grid[(i + 1).min(grid.len() - 1)];
        let Some(s) = problem.golden(br, l, h, opts.max_iter) else { continue };
        if !problem.on_constraint(&s) {
            continue;
        }
        if s.r.abs() <= opts.tol_ree {
            return Ok(build(&problem, &params, opts, s, sign, SolveMethod::Tangent));
        }
        if best.is_none_or(|(b, _)| s.r.abs() < b.r.abs()) {
            best = Some((s, sign));
        }
    }

    if opts.best_effort {
        if let Some((s, sign)) = best {
            return Ok(build(&problem_for(sign), &params, opts, s, sign, SolveMethod::BestEffort));
        }
    }

    let mut diag = NoBracket {
        a_interval: (lo, hi),
        gains_tried: opts.gain_sign_order.iter().map(|g| g.value() * params.eta.sqrt()).collect(),
        valid_samples: 0,
        positive_samples: 0,
        negative_samples: 0,
        best_residual: best.map(|(s, _)| s.r),
        best_a: best.map(|(s, _)| s.a),
    };
    for (sign, per_branch) in &scans {
        let problem = problem_for(*sign);
        for (_, samples) in per_branch {
            for s in samples.iter().flatten().filter(|s| problem.on_constraint(s)) {
                diag.valid_samples += 1;
                if s.r > 0.0 {
                    diag.positive_samples += 1;
                } else {
                    diag.negative_samples += 1;
                }
                if best.is_none() && diag.best_residual.is_none_or(|b: f64| s.r.abs() < b.abs()) {
                    diag.best_residual = Some(s.r);
                    diag.best_a = Some(s.a);
                }
            }
        }
    }
    Err(Error::NoBracket(Box::new(diag)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub gain_pass: bool,
    pub y_residual: f64,
    pub y_pass: bool,
    pub nu_residual: f64,
    pub nu_pass: bool,
    /// None when the REE cannot be evaluated (non-faithful state or reference).
    pub ree_residual: Option<f64>,
    pub ree_pass: bool,
    pub energy: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.gain_pass && self.y_pass && self.nu_pass && self.ree_pass
    }
}

/// Smallest symplectic eigenvalue from the invariants Δ = a² + b² − 2c² and
/// det V = (ab − c²)².
fn nu_minus_from_invariants(s: &TwoModeStandardForm) -> f64 {
    let delta = s.a * s.a + s.b * s.b - 2.0 * s.c * s.c;
    let sqrt_det = s.a * s.b - s.c * s.c;
    let disc = (delta * delta - 4.0 * sqrt_det * sqrt_det).max(0.0);
    let nu_plus = (0.5 * (delta + disc.sqrt())).sqrt();
    sqrt_det / nu_plus
}

/// Re-checks the three constraints along independent routes: the channel
/// through the explicit teleportation protocol, ν₋ from symplectic
/// invariants, the REE from a freshly built reference state.
pub fn verify_resource(rs: &ResourceState, params: &ThermalChannelParams) -> VerificationReport {
    verify_resource_with(rs, params, &SolverOptions::with_delta(rs.delta))
}

pub fn verify_resource_with(rs: &ResourceState, params: &ThermalChannelParams, opts: &SolverOptions) -> VerificationReport {
    let st = rs.state;
    let gain_pass = rs.eta == params.eta && rs.g_squared() == params.eta && rs.gain_sign.abs() == 1.0;
    let expected = params.eta + params.noise();
    let y_residual = match teleport_verify(&st, rs.g(), &Matrix2::identity()) {
        Ok(out) => {
            let d0 = out[(0, 0)] - expected;
            let d1 = out[(1, 1)] - expected;
            let off = out[(0, 1)];
            [d0, d1, off].into_iter().max_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap()
        }
        Err(_) => f64::NAN,
    };
    let nu_residual = nu_minus_from_invariants(&st) - (1.0 + rs.delta);
    let ree_residual = (|| {
        let omega = TwoModeStandardForm::new(st.a, st.b, st.c.abs());
        let reference = SeparableReference::for_state(&omega).ok()?;
        let d = relative_entropy(&omega, &reference.state).ok()?;
        Some(d - thermal_asymptotic(params.eta, params.n_b).ok()?)
    })();
    VerificationReport {
        gain_pass,
        y_residual,
        y_pass: y_residual.abs() <= opts.tol_constraint,
        nu_residual,
        nu_pass: nu_residual.abs() <= opts.tol_constraint,
        ree_residual,
        ree_pass: ree_residual.is_some_and(|r| r.abs() <= opts.tol_ree),
        energy: st.mean_photon_number(),
    }
}
