//! The subcommands. Each fills a `Report` and writes its artifacts under `out`.

use std::f64::consts::PI;
use std::path::Path;

use ilw_core::evolve::{conserved, Perturbation, SimConfig, Simulation};
use ilw_core::krein::{compute_mk, krein_report, Verdict};
use ilw_core::linop::{galilean_shift, pf2_check_wave};
use ilw_core::wave::{admissible_kmax, speed_root_k0, WaveParams, WaveProfile};
use ilw_core::IlwError;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{write_csv, Report};
use crate::svg::{line_plot, Series};
use crate::CliError;

/// Modulus used when `--k` is absent (Figure 1 uses 0.5).
pub const WAVE_DEFAULT_K: f64 = 0.5;
pub const DEFAULT_K: f64 = 0.85;

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(CliError::from_display)
}

fn common_inputs(report: &mut Report, cfg: &RunConfig, k: Option<f64>) {
    report.input("L", cfg.period);
    report.input("delta", cfg.delta);
    report.input("N", cfg.n);
    if let Some(k) = k {
        report.input("k", k);
    }
}

pub fn wave(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.k_or(WAVE_DEFAULT_K);
    let mut report = Report::new("wave");
    common_inputs(&mut report, cfg, Some(k));
    let p = WaveParams::new(cfg.period, cfg.delta, k)?;
    let profile = WaveProfile::new(p.clone(), cfg.n)?;
    let xs = profile.grid().nodes();
    let elliptic: Vec<f64> = xs.iter().map(|&x| p.profile_elliptic(x)).collect();
    let fourier: Vec<f64> = xs.iter().map(|&x| p.profile_series(x, cfg.n / 2)).collect();
    let diff: Vec<f64> = elliptic.iter().zip(&fourier).map(|(a, b)| (a - b).abs()).collect();
    let rows: Vec<Vec<f64>> = (0..xs.len()).map(|j| vec![xs[j], elliptic[j], fourier[j], diff[j]]).collect();
    let preamble = [("c", p.c), ("A", p.a_const), ("a", p.shift), ("sigma", p.sigma), ("k1", p.kmax)];
    write_csv(&cfg.out.join("wave.csv"), &preamble, &["x", "phi_elliptic", "phi_fourier", "abs_diff"], &rows)?;
    let title = format!("phi_c at L = {}, delta = {}, k = {k} (c = {:.6})", cfg.period, cfg.delta, p.c);
    write_text(&cfg.out.join("wave.svg"), &line_plot(&title, "x", &[Series { label: "phi_c", x: &xs, y: &elliptic }]))?;

    let n = xs.len();
    let max_diff = diff.iter().cloned().fold(0.0, f64::max);
    let even = (1..n).map(|j| (elliptic[j] - elliptic[n - j]).abs()).fold(0.0, f64::max);
    let trough = (0..n).min_by(|&a, &b| elliptic[a].total_cmp(&elliptic[b])).unwrap_or(0);
    let interior_minima =
        (0..n).filter(|&j| elliptic[j] < elliptic[(j + 1) % n] && elliptic[j] < elliptic[(j + n - 1) % n]).count();
    for (key, value) in preamble {
        report.output(key, value);
    }
    report.output("max_abs_diff", max_diff);
    report.output("residual", profile.residual());
    report.output("trough_x", xs[trough]);
    report.below("elliptic_vs_fourier", max_diff, 1e-9);
    report.below("traveling_wave_residual", profile.residual(), 1e-8);
    report.below("even_profile", even, 1e-12);
    report.check("single_trough_at_half_period", trough == n / 2 && interior_minima == 1, xs[trough], 0.0);
    Ok(report)
}

struct ScanRow {
    k: f64,
    c: f64,
    dc: f64,
    norm: f64,
    dnorm: f64,
    a: f64,
    minus_trough: f64,
    linear_bound: f64,
}

fn scan_point(cfg: &RunConfig, k: f64) -> Result<ScanRow, IlwError> {
    let p = WaveParams::new(cfg.period, cfg.delta, k)?;
    Ok(ScanRow {
        k,
        c: p.c,
        dc: p.dc_dk()?,
        norm: p.norm_sq,
        dnorm: p.dn_dk(),
        a: p.shift,
        minus_trough: -p.profile_elliptic(cfg.period / 2.0),
        linear_bound: 2.0 * PI / cfg.period * p.velocity_ratio(),
    })
}

pub fn speed_scan(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new("speed-scan");
    common_inputs(&mut report, cfg, None);
    report.input("k_range", json!([cfg.k_range.start, cfg.k_range.end, cfg.k_range.count]));
    let k1 = admissible_kmax(cfg.period, cfg.delta)?;
    let ks = cfg.k_range.values();
    if ks[0] <= 0.0 || *ks.last().unwrap() >= k1 {
        return Err(CliError::Invalid(format!("k-range must lie inside (0, k1) with k1 = {k1:.12}")));
    }
    let rows: Vec<ScanRow> = ks.par_iter().map(|&k| scan_point(cfg, k)).collect::<Result<_, _>>()?;
    let k0 = speed_root_k0(cfg.period, cfg.delta)?;
    let table: Vec<Vec<f64>> =
        rows.iter().map(|r| vec![r.k, r.c, r.dc, r.norm, r.dnorm, r.a, r.minus_trough, r.linear_bound]).collect();
    write_csv(
        &cfg.out.join("speed_scan.csv"),
        &[("k0", k0), ("k1", k1)],
        &["k", "c", "dc_dk", "N", "dN_dk", "a", "minus_phi_half", "linear_bound"],
        &table,
    )?;
    let col = |f: fn(&ScanRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    let (c, dc, norm, dnorm, a, trough) =
        (col(|r| r.c), col(|r| r.dc), col(|r| r.norm), col(|r| r.dnorm), col(|r| r.a), col(|r| r.minus_trough));
    let plots = [
        ("speed_scan_c.svg", "wave speed", [("c(k)", &c), ("c'(k)", &dc)]),
        ("speed_scan_n.svg", "squared L2 norm", [("N(k)", &norm), ("N'(k)", &dnorm)]),
        ("speed_scan_a.svg", "Galilean shift", [("a(k)", &a), ("-phi(L/2)", &trough)]),
    ];
    for (file, title, pair) in plots {
        let series: Vec<Series> = pair.iter().map(|(label, y)| Series { label, x: &ks, y }).collect();
        write_text(&cfg.out.join(file), &line_plot(title, "k", &series))?;
    }

    let min_dc = dc.iter().cloned().fold(f64::INFINITY, f64::min);
    let shift_margin = rows.iter().map(|r| r.a - r.minus_trough).fold(f64::INFINITY, f64::min);
    let bound_margin = rows.iter().map(|r| r.a - r.linear_bound).fold(f64::INFINITY, f64::min);
    let sign_change = rows.windows(2).find(|w| w[0].c.signum() != w[1].c.signum()).map(|w| (w[0].k, w[1].k));
    report.output("k0", k0);
    report.output("k1", k1);
    report.output("rows", rows.len());
    report.output("min_dc_dk", min_dc);
    report.output("min_shift_margin", shift_margin);
    report.output("min_linear_bound_margin", bound_margin);
    if let Some((lo, hi)) = sign_change {
        report.output("speed_sign_change", json!([lo, hi]));
    }
    report.check("dc_dk_positive", min_dc > 0.0, min_dc, 0.0);
    report.check("a_above_minus_phi_half", shift_margin > 0.0, shift_margin, 0.0);
    report.check("a_above_linear_bound", bound_margin > 0.0, bound_margin, 0.0);
    if let Some((lo, hi)) = sign_change {
        report.check("k0_brackets_sign_change", lo <= k0 && k0 <= hi, k0, hi - lo);
    }
    Ok(report)
}

pub fn stability(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.k_or(DEFAULT_K);
    let mut report = Report::new("stability");
    common_inputs(&mut report, cfg, Some(k));
    report.input("window", cfg.window);
    report.input("rel_tol", cfg.rel_tol);
    let profile = WaveProfile::build(cfg.period, cfg.delta, k, cfg.n)?;
    let p = &profile.params;
    let r = krein_report(&profile, cfg.n, cfg.rel_tol)?;
    let s = &r.spectrum;
    let lowest: Vec<f64> = s.eigenvalues.iter().take(10).cloned().collect();
    report.output("c", p.c);
    report.output("lowest_eigenvalues", lowest);
    report.output("n_neg", s.n_neg);
    report.output("n_zero", s.n_zero);
    report.output("kernel_cosine", s.kernel_cosine);
    report.output("kernel_residual", s.kernel_residual);
    report.output("truncation_drift", s.truncation_drift);
    report.output("I_direct", r.i_direct);
    report.output("I_closed", r.i_closed);
    report.output("D_direct", json!(r.d));
    report.output("D_closed", json!(r.d_closed));
    report.output("det_D_direct", r.det_d_direct);
    report.output("det_D_closed", r.det_d_closed);
    report.output("P3_direct", r.p3.direct);
    report.output("P3_closed", r.p3.closed);
    report.output("n_L", r.n_l);
    report.output("n_I", r.n_i);
    report.output("n_D", r.n_d);
    report.output("K_Ham", json!(r.k_ham));
    report.output("verdict", r.verdict.to_string());
    report.output("reasons", json!(r.reasons));

    report.check("one_negative_eigenvalue", s.n_neg == 1, s.n_neg as f64, 1.0);
    report.check("one_dimensional_kernel", s.n_zero == 1, s.n_zero as f64, 1.0);
    report.below("kernel_is_phi_prime", 1.0 - s.kernel_cosine, 1e-8);
    report.below("kernel_residual", s.kernel_residual, 1e-6);
    match galilean_shift(&profile).and_then(|_| pf2_check_wave(p, cfg.window)) {
        Ok(pf2) => {
            report.output("pf2_minors_tested", pf2.minors_tested);
            report.output("pf2_log_min_minor", pf2.log_min_minor);
            report.check("pf2_minors", pf2.pass, pf2.violations as f64, 0.0);
        }
        Err(e) => {
            report.output("pf2_error", e.to_string());
            report.check("pf2_minors", false, f64::NAN, 0.0);
        }
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    report.below("I_direct_vs_closed", rel(r.i_direct, r.i_closed), 1e-5);
    report.below("det_D_direct_vs_closed", rel(r.det_d_direct, r.det_d_closed), 1e-4);
    report.check("P3_negative", r.p3.direct < 0.0, r.p3.direct, 0.0);
    report.below("P3_direct_vs_closed", r.p3.relative_gap, 1e-4);
    report.check("verdict_linearly_stable", r.verdict == Verdict::LinearlyStable, r.k_ham.unwrap_or(-1) as f64, 0.0);
    Ok(report)
}

pub fn evolve(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.k_or(DEFAULT_K);
    let mut report = Report::new("evolve");
    common_inputs(&mut report, cfg, Some(k));
    report.input("dt", cfg.dt);
    report.input("t_end", cfg.t_end);
    report.input("epsilon", cfg.epsilon);
    report.input("mode", cfg.mode);
    report.input("scheme", format!("{:?}", cfg.scheme));
    let profile = WaveProfile::build(cfg.period, cfg.delta, k, cfg.n)?;
    let p = &profile.params;
    let (dc, da) = (p.dc_dk()?, p.da_dk());
    let mut sim_cfg = SimConfig::new(*profile.grid(), cfg.delta, cfg.dt, cfg.t_end)?;
    sim_cfg.scheme = cfg.scheme;
    let perturbation = Perturbation { amplitude: cfg.epsilon, mode: cfg.mode };
    let u0 = profile.field.axpy(1.0, &perturbation.field(profile.grid()))?;
    let mut sim = Simulation::new(u0, sim_cfg, Some(profile.clone()))?;

    let row = |sim: &Simulation| -> Vec<f64> {
        let s = sim.state();
        vec![s.t, s.rho_w.unwrap_or(f64::NAN), s.e_minus1, s.e0, s.e1, compute_mk(&s.field, dc, da)]
    };
    let mut rows = vec![row(&sim)];
    let mut blow_up = None;
    while !sim.finished() {
        match sim.advance() {
            Ok(()) if sim.steps() % cfg.record_every == 0 || sim.finished() => rows.push(row(&sim)),
            Ok(()) => {}
            Err(e) => {
                blow_up = Some(e);
                break;
            }
        }
    }
    let header = ["t", "rho_W", "E_minus1", "E_0", "E_1", "M_k"];
    write_csv(&cfg.out.join("evolve.csv"), &[("c", p.c), ("k", k)], &header, &rows)?;
    let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let rho: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    write_text(
        &cfg.out.join("evolve.svg"),
        &line_plot("distance to the wave orbit", "t", &[Series { label: "rho_W", x: &ts, y: &rho }]),
    )?;

    let first = &rows[0];
    let drift = |col: usize| rows.iter().map(|r| (r[col] - first[col]).abs() / first[col].abs()).fold(0.0, f64::max);
    let sup_rho = rho.iter().cloned().fold(0.0, f64::max);
    let drift_minus1 = rows.iter().map(|r| (r[2] - first[2]).abs()).fold(0.0, f64::max);
    report.output("steps", sim.steps());
    report.output("t_final", sim.state().t);
    report.output("sup_rho_W", sup_rho);
    report.output("drift_E_minus1", drift_minus1);
    report.output("drift_E_0", drift(3));
    report.output("drift_E_1", drift(4));
    report.output("drift_M_k", drift(5));

    if let Some(e) = blow_up {
        let s = sim.state();
        let xs = s.field.grid().nodes();
        let dump: Vec<Vec<f64>> = xs.iter().zip(s.field.samples()).map(|(&x, &u)| vec![x, u]).collect();
        write_csv(&cfg.out.join("evolve_last_state.csv"), &[("t", s.t)], &["x", "u"], &dump)?;
        let (_, e0, e1) = conserved(&s.field, cfg.delta);
        report.output("blow_up", e.to_string());
        report.output("last_state_E_0", e0);
        report.output("last_state_E_1", e1);
        report.check("no_blow_up", false, s.t, cfg.t_end);
        return Ok(report);
    }
    let rho_bound = if cfg.epsilon > 0.0 { 10.0 * cfg.epsilon } else { 1e-6 };
    report.check("sup_rho_W", sup_rho <= rho_bound, sup_rho, rho_bound);
    report.below("drift_E_0", drift(3), 1e-8);
    report.below("drift_E_1", drift(4), 1e-8);
    report.below("drift_E_minus1", drift_minus1, 1e-12);
    report.below("drift_M_k", drift(5), 1e-8);
    Ok(report)
}
