//! The `bounds` and `solve` subcommands.

use std::io::Write;

use keybound::bounds::{self, resource_divergences, BoundCurvePoint, BoundKind};
use keybound::channels::ThermalChannelParams;
use keybound::solver::{solve_resource_state, verify_resource, ResourceState, SolverOptions};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{bounds_csv, fmt_f64, write_atomic};
use crate::CliError;

fn channel(cfg: &RunConfig, eta: f64) -> Result<ThermalChannelParams, CliError> {
    let n_b = cfg.n_b.ok_or_else(|| CliError::Invalid("--nb is required for thermal-channel quantities".into()))?;
    ThermalChannelParams::new(eta, n_b).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn solve(cfg: &RunConfig, params: &ThermalChannelParams) -> Result<ResourceState, CliError> {
    let opts = SolverOptions { best_effort: cfg.best_effort, ..SolverOptions::with_delta(cfg.delta) };
    let rs = solve_resource_state(params, &opts).map_err(|e| CliError::Numeric(format!("solver: {e}")))?;
    Ok(rs)
}

fn point(
    kind: BoundKind,
    n: u64,
    cfg: &RunConfig,
    eta: f64,
    params: Option<&ThermalChannelParams>,
    rs: Option<&ResourceState>,
) -> keybound::Result<BoundCurvePoint> {
    let nf = n as f64;
    let eps = cfg.eps;
    let raw = match kind {
        BoundKind::PureLossAsymptotic => bounds::pure_loss_asymptotic(eta)?,
        BoundKind::PureLossSc => bounds::pure_loss_strong_converse(eta, nf, eps)?,
        BoundKind::PureLossWc => bounds::pure_loss_weak_converse(eta, nf, eps)?,
        BoundKind::AchievabilityEstimate => bounds::achievability_estimate(eta, cfg.n_s, nf, eps)?,
        thermal => {
            let p = params.expect("thermal kinds resolve channel parameters");
            match thermal {
                BoundKind::ThermalAsymptotic => bounds::thermal_asymptotic(p.eta, p.n_b)?,
                BoundKind::ThermalSc => bounds::thermal_strong_converse(p.eta, p.n_b, nf, eps)?,
                BoundKind::ThermalWc => bounds::thermal_weak_converse(p.eta, p.n_b, nf, eps)?,
                _ => {
                    let rs = rs.expect("second-order bound needs a resource state");
                    bounds::thermal_second_order(p.eta, p.n_b, nf, eps, rs, cfg.include_log_term)?.raw
                }
            }
        }
    };
    Ok(BoundCurvePoint::new(n, kind, raw, cfg.clamp))
}

/// All requested curve points, ordered by n and then by kind.
pub fn bound_points(cfg: &RunConfig, log: &mut dyn Write) -> Result<(f64, Vec<BoundCurvePoint>), CliError> {
    let eta = cfg.require_eta()?;
    let params = if cfg.bounds.iter().any(|k| k.needs_thermal_noise()) { Some(channel(cfg, eta)?) } else { None };
    let rs = match (&params, cfg.bounds.contains(&BoundKind::ThermalSecondOrder)) {
        (Some(p), true) => {
            let rs = solve(cfg, p)?;
            if !rs.converged() {
                let _ = writeln!(
                    log,
                    "warning: no resource state meets the REE target; using the closest one (REE residual {:.3e} bits)",
                    rs.residuals.ree
                );
            }
            if cfg.verbose {
                let _ = writeln!(log, "resource state: a = {}, b = {}, c = {}, g = {}", rs.state.a, rs.state.b, rs.state.c, rs.g());
                let small = cfg.n_grid.iter().filter(|&&n| (n as f64) < 1.0 / (cfg.eps * cfg.eps)).count();
                if small > 0 {
                    let _ = writeln!(log, "note: {small} grid points have n < 1/eps^2");
                }
            }
            Some(rs)
        }
        _ => None,
    };

    let rows: Vec<Vec<BoundCurvePoint>> = cfg
        .n_grid
        .par_iter()
        .map(|&n| cfg.bounds.iter().map(|&k| point(k, n, cfg, eta, params.as_ref(), rs.as_ref())).collect())
        .collect::<keybound::Result<_>>()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok((eta, rows.into_iter().flatten().collect()))
}

pub fn cmd_bounds(cfg: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let (eta, points) = bound_points(cfg, log)?;
    let bytes = bounds_csv(&points, cfg, eta)?;
    match &cfg.output {
        Some(path) => write_atomic(path, &bytes),
        None => out.write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

pub const SOLVE_HEADER: [&str; 15] = [
    "eta", "n_b", "delta", "a", "b", "c", "g", "g_squared", "y_residual", "nu_residual", "ree_residual", "energy",
    "d_bits", "v_bits2", "converged",
];

pub fn cmd_solve(cfg: &RunConfig, out: &mut dyn Write, _log: &mut dyn Write) -> Result<(), CliError> {
    let eta = cfg.require_eta()?;
    let params = channel(cfg, eta)?;
    let rs = solve(cfg, &params)?;
    let (d, v) = resource_divergences(&rs).map_err(|e| CliError::Numeric(e.to_string()))?;
    let report = verify_resource(&rs, &params);

    let io = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(out, "thermal channel eta = {}, N_B = {}, delta = {}", params.eta, params.n_b, rs.delta).map_err(io)?;
    writeln!(out, "method      {:?}", rs.method).map_err(io)?;
    writeln!(out, "a           {}", rs.state.a).map_err(io)?;
    writeln!(out, "b           {}", rs.state.b).map_err(io)?;
    writeln!(out, "c           {}", rs.state.c).map_err(io)?;
    writeln!(out, "g           {}  (g^2 = {})", rs.g(), rs.g_squared()).map_err(io)?;
    writeln!(out, "residual y  {:e}", rs.residuals.y).map_err(io)?;
    writeln!(out, "residual nu {:e}", rs.residuals.nu_minus).map_err(io)?;
    writeln!(out, "residual D  {:e} bits", rs.residuals.ree).map_err(io)?;
    writeln!(out, "energy      {} photons", rs.energy).map_err(io)?;
    writeln!(out, "D           {d:e} bits").map_err(io)?;
    writeln!(out, "V           {v:e} bits^2").map_err(io)?;
    writeln!(out, "verified    {}", if report.all_pass() { "yes" } else { "no" }).map_err(io)?;
    if cfg.verbose {
        writeln!(out, "{report:?}").map_err(io)?;
    }

    if let Some(path) = &cfg.output {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SOLVE_HEADER)?;
        let fields = [
            params.eta, params.n_b, rs.delta, rs.state.a, rs.state.b, rs.state.c, rs.g(), rs.g_squared(),
            rs.residuals.y, rs.residuals.nu_minus, rs.residuals.ree, rs.energy, d, v,
        ];
        let mut rec: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
        rec.push(rs.converged().to_string());
        w.write_record(&rec)?;
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(path, &bytes)?;
    }
    Ok(())
}
