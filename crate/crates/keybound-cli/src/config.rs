//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::Args;
use keybound::bounds::BoundKind;
use keybound::channels::eta_from_distance;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_L0_KM: f64 = 0.542;
pub const DEFAULT_EPS: f64 = 1e-10;
pub const DEFAULT_DELTA: f64 = 1e-4;
pub const DEFAULT_N_MIN: f64 = 1e3;
pub const DEFAULT_N_MAX: f64 = 1e12;
pub const DEFAULT_N_POINTS: usize = 60;
pub const DEFAULT_N_S: f64 = 1e6;

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Channel transmissivity in (0, 1).
    #[arg(long, conflicts_with = "distance_km")]
    pub eta: Option<f64>,
    /// Fibre length in km; η = exp(−L/L₀).
    #[arg(long)]
    pub distance_km: Option<f64>,
    /// Attenuation length L₀ in km.
    #[arg(long)]
    pub l0_km: Option<f64>,
    /// Thermal photon number N_B of the environment.
    #[arg(long = "nb")]
    pub n_b: Option<f64>,
    /// Error probability ε.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Resource-state offset: ν₋ = 1 + δ.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n_min: Option<f64>,
    #[arg(long)]
    pub n_max: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Comma-separated bound kinds (default: all).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<String>>,
    /// Clamp negative bound values to 0 (default).
    #[arg(long, overrides_with = "no_clamp")]
    pub clamp: bool,
    #[arg(long, overrides_with = "clamp")]
    pub no_clamp: bool,
    /// Add log₂(n)/(2n) to the second-order bound.
    #[arg(long)]
    pub log_term: bool,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with RunConfig fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the closest resource state when the solver finds no root.
    #[arg(long)]
    pub best_effort: bool,
    /// Input photon number for the achievability estimate.
    #[arg(long)]
    pub n_s: Option<f64>,
    #[arg(long, short)]
    pub verbose: bool,
}

/// JSON form of the configuration, all fields optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub eta: Option<f64>,
    pub distance_km: Option<f64>,
    pub l0_km: Option<f64>,
    pub n_b: Option<f64>,
    pub eps: Option<f64>,
    pub n_grid: Option<Vec<u64>>,
    pub n_min: Option<f64>,
    pub n_max: Option<f64>,
    pub n_points: Option<usize>,
    pub delta: Option<f64>,
    pub bounds: Option<Vec<String>>,
    pub clamp: Option<bool>,
    pub include_log_term: Option<bool>,
    pub output: Option<PathBuf>,
    pub best_effort: Option<bool>,
    pub n_s: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Resolved transmissivity; None when neither η nor a distance was given.
    pub eta: Option<f64>,
    pub distance_km: Option<f64>,
    pub l0_km: f64,
    pub n_b: Option<f64>,
    pub eps: f64,
    pub n_grid: Vec<u64>,
    pub delta: f64,
    pub bounds: Vec<BoundKind>,
    pub clamp: bool,
    pub include_log_term: bool,
    pub output: Option<PathBuf>,
    pub best_effort: bool,
    pub n_s: f64,
    pub verbose: bool,
}

/// round(10^x) over P log-spaced exponents between n_min and n_max.
pub fn log_grid(n_min: f64, n_max: f64, points: usize) -> Result<Vec<u64>, CliError> {
    if !(n_min >= 1.0 && n_max >= n_min && n_max <= 1e18) {
        return Err(CliError::Invalid(format!("need 1 <= n_min <= n_max <= 1e18, got [{n_min}, {n_max}]")));
    }
    if points == 0 {
        return Err(CliError::Invalid("n_points must be at least 1".into()));
    }
    if points == 1 {
        return Ok(vec![n_min.round() as u64]);
    }
    let (l0, l1) = (n_min.log10(), n_max.log10());
    let grid: Vec<u64> = (0..points)
        .map(|i| {
            let x = if i + 1 == points { l1 } else { l0 + (l1 - l0) * i as f64 / (points - 1) as f64 };
            10f64.powf(x).round() as u64
        })
        .collect();
    Ok(grid)
}

fn check_grid(grid: &[u64]) -> Result<(), CliError> {
    if grid.is_empty() || grid[0] < 1 {
        return Err(CliError::Invalid("n grid must be non-empty with n >= 1".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Invalid(format!("n grid is not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(args: &ConfigArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        // η and distance travel together: a flag for either replaces both file values.
        let (eta, distance_km) = if args.eta.is_some() || args.distance_km.is_some() {
            (args.eta, args.distance_km)
        } else {
            (file.eta, file.distance_km)
        };
        if eta.is_some() && distance_km.is_some() {
            return Err(CliError::Invalid("give either eta or distance_km, not both".into()));
        }
        let l0_km = args.l0_km.or(file.l0_km).unwrap_or(DEFAULT_L0_KM);
        let eta = match (eta, distance_km) {
            (Some(e), _) => {
                if !(e > 0.0 && e < 1.0) {
                    return Err(CliError::Invalid(format!("eta = {e} outside (0, 1)")));
                }
                Some(e)
            }
            (None, Some(l)) => {
                let e = eta_from_distance(l, l0_km).map_err(|e| CliError::Invalid(e.to_string()))?;
                if !(e > 0.0 && e < 1.0) {
                    return Err(CliError::Invalid(format!("distance {l} km gives eta = {e}, outside (0, 1)")));
                }
                Some(e)
            }
            (None, None) => None,
        };

        let n_b = args.n_b.or(file.n_b);
        let eps = args.eps.or(file.eps).unwrap_or(DEFAULT_EPS);
        if !(eps > 0.0 && eps < 1.0) {
            return Err(CliError::Invalid(format!("eps = {eps} outside (0, 1)")));
        }
        let delta = args.delta.or(file.delta).unwrap_or(DEFAULT_DELTA);
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(CliError::Invalid(format!("delta = {delta} must be positive")));
        }
        let n_s = args.n_s.or(file.n_s).unwrap_or(DEFAULT_N_S);
        if !(n_s > 0.0 && n_s.is_finite()) {
            return Err(CliError::Invalid(format!("n_s = {n_s} must be positive")));
        }

        let grid_flags = args.n_min.is_some() || args.n_max.is_some() || args.n_points.is_some();
        let n_grid = match (&file.n_grid, grid_flags) {
            (Some(g), false) => g.clone(),
            _ => log_grid(
                args.n_min.or(file.n_min).unwrap_or(DEFAULT_N_MIN),
                args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
                args.n_points.or(file.n_points).unwrap_or(DEFAULT_N_POINTS),
            )?,
        };
        check_grid(&n_grid)?;

        let names = args.kinds.clone().or(file.bounds.clone());
        let bounds = match names {
            Some(list) => {
                let mut out = Vec::new();
                for s in list {
                    let k: BoundKind = s.trim().parse().map_err(|e: keybound::Error| CliError::Invalid(e.to_string()))?;
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
                if out.is_empty() {
                    return Err(CliError::Invalid("empty bound list".into()));
                }
                out
            }
            None => BoundKind::ALL.to_vec(),
        };

        let clamp = if args.clamp {
            true
        } else if args.no_clamp {
            false
        } else {
            file.clamp.unwrap_or(true)
        };

        Ok(RunConfig {
            eta,
            distance_km,
            l0_km,
            n_b,
            eps,
            n_grid,
            delta,
            bounds,
            clamp,
            include_log_term: args.log_term || file.include_log_term.unwrap_or(false),
            output: args.out.clone().or(file.output),
            best_effort: args.best_effort || file.best_effort.unwrap_or(false),
            n_s,
            verbose: args.verbose,
        })
    }

    pub fn require_eta(&self) -> Result<f64, CliError> {
        self.eta.ok_or_else(|| CliError::Invalid("one of --eta or --distance-km is required".into()))
    }
}
