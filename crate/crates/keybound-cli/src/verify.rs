//! Self-check suite: Gaussian formulas against the number-basis oracle,
//! the teleportation protocol against the channel map, and the
//! reverse-coherent-information identities.

use std::io::Write;

use keybound::channels::{apply_channel, simulated_channel_from_resource, teleport_verify};
use keybound::divergences::divergences;
use keybound::fock::{auto_n_max, cross_moment_double_sum, oracle_divergences, thermal_diagonal};
use keybound::gaussian::{ThermalMode, TwoModeStandardForm};
use keybound::rci;
use nalgebra::Matrix2;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.residual.abs() <= self.tol
    }
}

fn check(name: impl Into<String>, residual: keybound::Result<f64>, tol: f64) -> Check {
    Check { name: name.into(), residual: residual.unwrap_or(f64::NAN), tol }
}

const THERMAL_MEANS: [f64; 5] = [0.05, 0.1, 0.5, 1.0, 2.0];

/// `fault` shifts every Gaussian-side value by one part in 10⁶, so that a
/// working suite must report failures.
pub fn run_checks(fault: bool) -> Vec<Check> {
    let bump = if fault { 1.0 + 1e-6 } else { 1.0 };
    let mut out = Vec::new();

    for &n1 in &THERMAL_MEANS {
        for &n2 in &THERMAL_MEANS {
            if n1 == n2 {
                continue;
            }
            let res = (|| {
                let g = divergences(&ThermalMode::new(n1)?, &ThermalMode::new(n2)?)?;
                let m = auto_n_max(&[n1, n2])?;
                let o = oracle_divergences(&thermal_diagonal(n1, m)?, &thermal_diagonal(n2, m)?)?;
                let (dd, dv) = (g.d * bump - o.d, g.v * bump - o.v);
                Ok(if dd.abs() >= dv.abs() { dd } else { dv })
            })();
            out.push(check(format!("oracle D,V theta({n1}) vs theta({n2})"), res, 1e-8));
        }
    }

    let res = (|| {
        let g = divergences(&ThermalMode::new(1.0)?, &ThermalMode::new(2.0)?)?;
        Ok(g.d * bump - (2.0 * 3f64.log2() - 3.0))
    })();
    out.push(check("D(theta(1)||theta(2)) = 2 log2 3 - 3", res, 1e-10));

    let res = (|| {
        let t = |m| oracle_divergences(&thermal_diagonal(1.0, m)?, &thermal_diagonal(2.0, m)?);
        let (a, b) = (t(500)?, t(2000)?);
        Ok(if a.t >= a.v.powf(1.5) { a.t - b.t } else { f64::INFINITY })
    })();
    out.push(check("oracle T truncation-stable and T >= V^(3/2)", res, 1e-10));

    let states = [
        TwoModeStandardForm::new(2.0, 3.0, 1.0),
        TwoModeStandardForm::new(5.0, 1.5, -1.2),
        TwoModeStandardForm::new(1.108, 2.2018, 0.5878),
        TwoModeStandardForm::new(20.0, 20.0, 19.9),
    ];
    let inputs = [Matrix2::identity(), Matrix2::new(3.0, 0.5, 0.5, 2.0), Matrix2::new(0.25, 0.0, 0.0, 4.0)];
    for (i, st) in states.iter().enumerate() {
        for &g in &[-0.8, 0.6, 1.3] {
            let res = (|| {
                let ch = simulated_channel_from_resource(st, g)?;
                let mut worst: f64 = 0.0;
                for v in &inputs {
                    let tele = teleport_verify(st, g, v)? * bump;
                    let direct = apply_channel(&ch, v)?;
                    worst = worst.max((tele - direct).amax());
                }
                Ok(worst)
            })();
            out.push(check(format!("teleportation = channel map, state {i}, g = {g}"), res, 1e-8));
        }
    }

    for &n_s in &[0.5, 1.0, 2.0] {
        let res = (|| Ok(rci::rci_variance(n_s, 1.0 - 1e-12)? * bump - rci::entropy_variance_thermal(n_s)?))();
        out.push(check(format!("V_rev(N_S = {n_s}, eta -> 1) = V(N_S)"), res, 1e-6));
    }
    let res = (|| Ok(rci::cross_photon_moment(1.0, 0.5)? * bump - cross_moment_double_sum(1.0, 0.5, 1000)?))();
    out.push(check("cross photon moment = double sum (N_S = 1, eta = 0.5)", res, 1e-8));
    let res = (|| Ok(rci::reverse_coherent_information(1e6, 0.5)? * bump - 1.0))();
    out.push(check("I_rev(N_S = 1e6, eta = 0.5) -> -log2(1 - eta)", res, 1e-5));
    let res = (|| Ok(rci::entropy_variance_thermal(1e4)? * bump - 1.0 / (std::f64::consts::LN_2.powi(2))))();
    out.push(check("V(N_S = 1e4) -> 1/ln^2 2", res, 1e-6));
    out
}

/// Prints the pass/fail matrix; true iff every check passed.
pub fn cmd_verify(fault: bool, verbose: bool, out: &mut dyn Write) -> std::io::Result<bool> {
    let checks = run_checks(fault);
    let mut failed = 0;
    for c in &checks {
        let tag = if c.pass() { "PASS" } else { "FAIL" };
        if !c.pass() {
            failed += 1;
        }
        if verbose {
            writeln!(out, "{tag}  {:<55} residual {:>10.3e}  tol {:.0e}", c.name, c.residual, c.tol)?;
        } else {
            writeln!(out, "{tag}  {}", c.name)?;
        }
    }
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    Ok(failed == 0)
}
