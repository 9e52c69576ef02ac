//! Acceptance suite: one PASS/FAIL line per criterion (per cell where the
//! criterion is stated per cell). Exits nonzero if anything fails.

use std::process::Command;
use std::time::Instant;

use keybound::bounds::{self, thermal_asymptotic, thermal_second_order, thermal_strong_converse};
use keybound::channels::{apply_channel, teleport_verify, thermal_channel, ThermalChannelParams};
use keybound::divergences::divergences;
use keybound::fock::{auto_n_max, cross_moment_double_sum, oracle_divergences, thermal_diagonal};
use keybound::gaussian::ThermalMode;
use keybound::rci;
use keybound::solver::{solve_resource_state, verify_resource, ResourceState, SolverOptions};
use keybound::special::{binary_entropy, c_epsilon, inv_normal_cdf, normal_cdf};
use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failed: usize,
    total: usize,
}

impl Report {
    fn line(&mut self, ok: bool, label: &str, detail: String) {
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        println!("{}  {label}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn e(x: f64) -> f64 {
    (-x).exp()
}

fn cells() -> Vec<(String, f64, f64)> {
    let etas = [("e^-1", e(1.0)), ("e^-2", e(2.0)), ("e^-5", e(5.0)), ("0.9", 0.9)];
    let nbs = [("3e-7", 3e-7), ("0.01", 0.01), ("0.1", 0.1), ("1", 1.0)];
    let mut out = Vec::new();
    for (en, eta) in etas {
        for (nn, nb) in nbs {
            out.push((format!("eta={en}, N_B={nn}"), eta, nb));
        }
    }
    out
}

fn n_grid() -> Vec<f64> {
    (0..60).map(|i| 10f64.powf(3.0 + 9.0 * i as f64 / 59.0)).collect()
}

fn solve(eta: f64, nb: f64, delta: f64) -> keybound::Result<ResourceState> {
    solve_resource_state(&ThermalChannelParams::new(eta, nb)?, &SolverOptions::with_delta(delta))
}

fn criterion_1(r: &mut Report) {
    let pl = bounds::pure_loss_asymptotic(0.5).unwrap();
    let th = thermal_asymptotic(0.5, 1.0).unwrap();
    let c0 = c_epsilon(0.0).unwrap();
    let h = binary_entropy(0.5).unwrap();
    let ok = (pl - 1.0).abs() <= 1e-12 && th.abs() <= 1e-12 && (c0 - 6f64.log2()).abs() <= 1e-12 && h == 1.0;
    r.line(ok, "1 closed-form spot values", format!("pure_loss(0.5) = {pl}, thermal(0.5,1) = {th:e}, C(0) = {c0}, h2(0.5) = {h}"));
}

fn criterion_2(r: &mut Report) {
    let t = Instant::now();
    let means = [0.05, 0.1, 0.5, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    for &a in &means {
        for &b in &means {
            if a == b {
                continue;
            }
            let g = divergences(&ThermalMode::new(a).unwrap(), &ThermalMode::new(b).unwrap()).unwrap();
            let m = auto_n_max(&[a, b]).unwrap();
            let o = oracle_divergences(&thermal_diagonal(a, m).unwrap(), &thermal_diagonal(b, m).unwrap()).unwrap();
            worst = worst.max((g.d - o.d).abs()).max((g.v - o.v).abs());
        }
    }
    let d12 = divergences(&ThermalMode::new(1.0).unwrap(), &ThermalMode::new(2.0).unwrap()).unwrap().d;
    let err12 = (d12 - (2.0 * 3f64.log2() - 3.0)).abs();
    let secs = t.elapsed().as_secs_f64();
    r.line(
        worst <= 1e-8 && err12 <= 1e-10 && secs < 10.0,
        "2 oracle equivalence",
        format!("max |Gaussian - oracle| = {worst:.2e}, |D(1||2) - (2log2 3 - 3)| = {err12:.2e}, {secs:.2} s"),
    );
}

fn criterion_3(r: &mut Report, solved: &[(String, f64, f64, keybound::Result<ResourceState>)], solve_secs: f64) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (label, eta, nb, res) in solved {
        let rs = match res {
            Ok(rs) => rs,
            Err(err) => {
                r.line(false, &format!("3 solver [{label}]"), format!("no resource state: {err}"));
                continue;
            }
        };
        let p = ThermalChannelParams::new(*eta, *nb).unwrap();
        let v = verify_resource(rs, &p);
        let g2 = (rs.g_squared() - eta).abs();
        let ree = v.ree_residual.unwrap_or(f64::NAN);
        let ch = thermal_channel(&p);
        let mut tele: f64 = 0.0;
        for _ in 0..20 {
            let (s, th, sc) = (rng.gen_range(1.0..10.0), rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.2..5.0));
            let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
            let vin = rot * Matrix2::new(s * sc, 0.0, 0.0, s / sc) * rot.transpose();
            let out = teleport_verify(&rs.state, rs.g(), &vin).unwrap();
            tele = tele.max((out - apply_channel(&ch, &vin).unwrap()).amax());
        }
        let ok = g2 == 0.0 && v.y_residual.abs() <= 1e-8 && v.nu_residual.abs() <= 1e-8 && ree.abs() <= 1e-6 && tele <= 1e-8;
        r.line(
            ok,
            &format!("3 solver [{label}]"),
            format!(
                "|g^2-eta| = {g2:e}, y {:.1e}, nu {:.1e}, REE {ree:.1e} bits, teleport {tele:.1e}",
                v.y_residual, v.nu_residual
            ),
        );
    }
    let secs = solve_secs + t.elapsed().as_secs_f64();
    r.line(secs < 60.0, "3 runtime", format!("{secs:.2} s for 16 cells"));
}

fn criterion_4(r: &mut Report) {
    let (eta, nb) = (e(1.0), 0.1);
    let mut vals = Vec::new();
    for delta in [1e-3, 1e-4, 1e-5] {
        match solve(eta, nb, delta).and_then(|rs| thermal_second_order(eta, nb, 1e6, 1e-10, &rs, false)) {
            Ok(b) => vals.push(b.raw),
            Err(err) => {
                r.line(false, "4 delta-insensitivity [eta=e^-1, N_B=0.1]", format!("delta = {delta:e}: {err}"));
                return;
            }
        }
    }
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    r.line(spread < 1e-3, "4 delta-insensitivity [eta=e^-1, N_B=0.1]", format!("values {vals:?}, spread {spread:e}"));
}

fn criterion_5(r: &mut Report, solved: &[(String, f64, f64, keybound::Result<ResourceState>)]) {
    let t = Instant::now();
    let eps = 1e-10;
    let phi = inv_normal_cdf(eps).unwrap().abs();
    for (label, eta, nb, res) in solved {
        let rs = match res {
            Ok(rs) => rs,
            Err(_) => {
                r.line(false, &format!("5 Figure 1 shape [{label}]"), "no resource state, second-order bound unavailable".into());
                continue;
            }
        };
        let asym = thermal_asymptotic(*eta, *nb).unwrap();
        let mut prev_so = f64::NEG_INFINITY;
        let mut prev_sc = f64::INFINITY;
        let (mut increasing, mut below, mut gap_ok, mut sc_above, mut separated) = (true, true, true, true, false);
        let mut worst_gap_excess = f64::NEG_INFINITY;
        for n in n_grid() {
            let so = thermal_second_order(*eta, *nb, n, eps, rs, false).unwrap();
            let sc = thermal_strong_converse(*eta, *nb, n, eps).unwrap();
            increasing &= so.raw > prev_so;
            below &= so.raw <= asym;
            let excess = (asym - so.raw) - ((so.v / n).sqrt() * phi + 1e-12);
            worst_gap_excess = worst_gap_excess.max(excess);
            gap_ok &= excess <= 0.0;
            sc_above &= sc > asym && sc < prev_sc;
            separated |= so.raw < sc;
            prev_so = so.raw;
            prev_sc = sc;
        }
        r.line(
            increasing && below && gap_ok && sc_above && separated,
            &format!("5 Figure 1 shape [{label}]"),
            format!(
                "second-order increasing {increasing}, below asymptote {below}, gap excess {worst_gap_excess:.1e}, strong converse above {sc_above}, separated {separated}"
            ),
        );
    }
    let secs = t.elapsed().as_secs_f64();
    r.line(secs < 30.0, "5 runtime", format!("{secs:.2} s"));
}

fn criterion_6(r: &mut Report) {
    let t = Instant::now();
    let v = rci::rci_variance(1e6, 0.5).unwrap();
    r.line(v <= 1e-10, "6a rci_variance(N_S=1e6, eta=0.5) <= 1e-10", format!("{v:e} bits^2"));
    let mut worst: f64 = 0.0;
    for n_s in [0.5, 1.0, 2.0] {
        let d = rci::rci_variance(n_s, 1.0 - 1e-12).unwrap() - rci::entropy_variance_thermal(n_s).unwrap();
        worst = worst.max(d.abs());
    }
    r.line(worst <= 1e-6, "6b eta -> 1 limit equals V(N_S)", format!("max difference {worst:e}"));
    let d = rci::cross_photon_moment(1.0, 0.5).unwrap() - cross_moment_double_sum(1.0, 0.5, 1000).unwrap();
    let secs = t.elapsed().as_secs_f64();
    r.line(d.abs() <= 1e-8 && secs < 5.0, "6c cross moment vs double sum", format!("difference {d:e}, {secs:.2} s"));
}

fn criterion_7(r: &mut Report) {
    let t = Instant::now();
    let run = |m| oracle_divergences(&thermal_diagonal(1.0, m).unwrap(), &thermal_diagonal(2.0, m).unwrap()).unwrap();
    let (a, b) = (run(500), run(2000));
    let diff = (a.t - b.t).abs();
    let secs = t.elapsed().as_secs_f64();
    r.line(
        diff < 1e-10 && a.t >= a.v.powf(1.5) && secs < 5.0,
        "7 third moment finite",
        format!("T = {}, |T500 - T2000| = {diff:e}, V^(3/2) = {}, {secs:.2} s", a.t, a.v.powf(1.5)),
    );
}

fn criterion_8(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for eps in [1e-10, 1e-6, 0.01, 0.1, 0.5, 0.9] {
        let back = normal_cdf(inv_normal_cdf(eps).unwrap());
        worst = worst.max(((back - eps) / eps).abs());
    }
    r.line(worst <= 1e-6, "8 inverse normal round trip", format!("max relative error {worst:e}"));
}

fn criterion_9(r: &mut Report) {
    let dir = tempfile_dir();
    let bin = env!("CARGO_BIN_EXE_keybound");
    let mut outputs = Vec::new();
    for name in ["run1.csv", "run2.csv"] {
        let path = dir.join(name);
        let status = Command::new(bin)
            .args(["bounds", "--eta", "0.5", "--nb", "1", "--out"])
            .arg(&path)
            .status()
            .expect("spawn keybound");
        outputs.push((status.success(), std::fs::read(&path).unwrap_or_default()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    r.line(
        outputs.iter().all(|o| o.0) && same,
        "9 determinism",
        format!("{} bytes per run, identical {same}", outputs[0].1.len()),
    );
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("keybound-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn main() {
    let mut r = Report { failed: 0, total: 0 };
    criterion_1(&mut r);
    criterion_2(&mut r);

    let t = Instant::now();
    let solved: Vec<_> = cells()
        .into_iter()
        .map(|(l, eta, nb)| {
            let res = solve(eta, nb, 1e-4);
            (l, eta, nb, res)
        })
        .collect();
    criterion_3(&mut r, &solved, t.elapsed().as_secs_f64());
    criterion_4(&mut r);
    criterion_5(&mut r, &solved);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);

    println!("\n{} of {} acceptance checks passed", r.total - r.failed, r.total);
    if r.failed > 0 {
        std::process::exit(1);
    }
}
