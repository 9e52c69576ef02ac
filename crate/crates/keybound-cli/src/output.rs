//! CSV formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use keybound::bounds::BoundCurvePoint;

use crate::config::RunConfig;
use crate::CliError;

pub const BOUNDS_HEADER: [&str; 9] = ["n", "kind", "value_bits", "raw_bits", "clamped", "eta", "n_b", "eps", "delta"];

/// 17 significant digits, enough to round-trip any binary64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn bounds_csv(points: &[BoundCurvePoint], cfg: &RunConfig, eta: f64) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BOUNDS_HEADER)?;
    let eta_s = fmt_f64(eta);
    let nb_s = cfg.n_b.map(fmt_f64).unwrap_or_default();
    let eps_s = fmt_f64(cfg.eps);
    let delta_s = fmt_f64(cfg.delta);
    for p in points {
        w.write_record([
            p.n.to_string().as_str(),
            p.kind.as_str(),
            &fmt_f64(p.value),
            &fmt_f64(p.raw),
            if p.clamped { "true" } else { "false" },
            &eta_s,
            &nb_s,
            &eps_s,
            &delta_s,
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.as_file().sync_all().map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}
