//! `verify-all`: the fourteen acceptance checks at fixed parameters.

use std::f64::consts::PI;

use ilw_core::evolve::{propagation_error, stability_experiment, Perturbation, Scheme, SimConfig};
use ilw_core::fourier::symbol_ilw;
use ilw_core::krein::{krein_report, p3_check, Verdict};
use ilw_core::linop::{galilean_shift, pf2_check_wave, spectrum_report};
use ilw_core::wave::{admissible_kmax, speed_root_k0, wave_speed, WaveParams, WaveProfile};

use crate::report::Report;
use crate::CliError;

const L: f64 = PI;
const DELTA: f64 = 1.0;
const N: usize = 256;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn verify_all(scheme: Scheme) -> Result<Report, CliError> {
    let mut r = Report::new("verify-all");
    r.input("L", L);
    r.input("delta", DELTA);
    r.input("N", N);
    r.input("scheme", format!("{scheme:?}"));

    let k1 = admissible_kmax(L, DELTA)?;
    r.below("01_k1", (k1 - 0.944085037).abs(), 1e-6);
    let k0 = speed_root_k0(L, DELTA)?;
    r.below("02_k0", (k0 - 0.795178532).abs(), 1e-6);
    let c_small = wave_speed(L, DELTA, 1e-6)?;
    r.below("03_linear_speed", (c_small + 1.07462944).abs(), 1e-5);
    r.below("03_linear_speed_vs_symbol", (c_small + symbol_ilw(1, L, DELTA)).abs(), 1e-5);
    r.output("k1", k1);
    r.output("k0", k0);
    r.output("c_small_k", c_small);

    let mut residual = 0.0f64;
    let mut route_gap = 0.0f64;
    for &k in &[0.3, 0.5, 0.85, 0.9] {
        let w = WaveProfile::build(L, DELTA, k, N)?;
        residual = residual.max(w.residual());
        let p = &w.params;
        for x in w.grid().nodes() {
            route_gap = route_gap.max((p.profile_elliptic(x) - p.profile_series(x, N / 2)).abs());
        }
    }
    r.below("04_traveling_wave_residual", residual, 1e-8);
    r.below("05_elliptic_vs_fourier", route_gap, 1e-9);

    let p = WaveParams::new(L, DELTA, 0.5)?;
    let series = p.norm_squared_series();
    let m = 4096;
    let quad = (0..m).map(|j| p.profile_elliptic(L * j as f64 / m as f64).powi(2)).sum::<f64>() * L / m as f64;
    r.below("06_norm_series_vs_closed", rel(series, p.norm_squared_closed()?), 1e-8);
    r.below("06_norm_series_vs_quadrature", rel(series, quad), 1e-9);

    for &k in &[0.5, 0.85] {
        let w = WaveProfile::build(L, DELTA, k, N)?;
        let s = spectrum_report(&w, N, 1e-8)?;
        r.check(&format!("07_k{k}_one_negative"), s.n_neg == 1, s.n_neg as f64, 1.0);
        r.check(&format!("07_k{k}_one_zero"), s.n_zero == 1, s.n_zero as f64, 1.0);
        r.below(&format!("07_k{k}_kernel_cosine"), 1.0 - s.kernel_cosine, 1e-8);
        r.below(&format!("07_k{k}_kernel_residual"), s.kernel_residual, 1e-6);
        r.below(&format!("07_k{k}_truncation_drift"), s.truncation_drift, 1e-8);
    }

    for &k in &[0.3, 0.5, 0.85] {
        let pf2 = pf2_check_wave(&WaveParams::new(L, DELTA, k)?, 40)?;
        r.check(&format!("08_k{k}_pf2"), pf2.pass, pf2.violations as f64, 0.0);
    }
    let mut margin = f64::INFINITY;
    let mut positive = true;
    for j in 1..=50 {
        let p = WaveParams::new(L, DELTA, k1 * j as f64 / 51.0)?;
        let bound = 2.0 * PI / L * p.velocity_ratio();
        margin = margin.min((p.shift + p.profile_elliptic(L / 2.0)).min(p.shift - bound));
        positive &= galilean_shift(&WaveProfile::new(p, N)?).is_ok();
    }
    r.check("08_galilean_preconditions", margin > 0.0 && positive, margin, 0.0);

    for &k in &[0.85, 0.9] {
        let w = WaveProfile::build(L, DELTA, k, N)?;
        let kr = krein_report(&w, N, 1e-8)?;
        r.check(&format!("09_k{k}_I_positive"), kr.i_direct > 0.0, kr.i_direct, 0.0);
        r.below(&format!("09_k{k}_I_direct_vs_closed"), rel(kr.i_direct, kr.i_closed), 1e-5);
        r.check(&format!("09_k{k}_det_D_negative"), kr.det_d_direct < 0.0, kr.det_d_direct, 0.0);
        r.below(&format!("09_k{k}_det_D_direct_vs_closed"), rel(kr.det_d_direct, kr.det_d_closed), 1e-4);
        let stable = (kr.n_l, kr.n_i, kr.n_d, kr.k_ham) == (1, 0, 1, Some(0)) && kr.verdict == Verdict::LinearlyStable;
        r.check(&format!("09_k{k}_linearly_stable"), stable, kr.k_ham.unwrap_or(-1) as f64, 0.0);
    }

    for &k in &[0.5, 0.85] {
        let p3 = p3_check(&WaveProfile::build(L, DELTA, k, N)?, N)?;
        r.check(&format!("10_k{k}_P3_negative"), p3.direct < 0.0, p3.direct, 0.0);
        r.below(&format!("10_k{k}_P3_direct_vs_closed"), p3.relative_gap, 1e-4);
    }

    let w = WaveProfile::build(L, DELTA, 0.85, N)?;
    let coarse = propagation_error(&w, scheme, 1e-3, 0.5)?;
    let fine = propagation_error(&w, scheme, 5e-4, 0.5)?;
    r.below("11_propagation_error", coarse, 1e-6);
    r.below("11_convergence_ratio", (coarse / fine - 16.0).abs(), 3.0 + f64::EPSILON);

    let run = |eps: f64| -> Result<_, CliError> {
        let mut cfg = SimConfig::new(*w.grid(), DELTA, 1e-3, 50.0)?;
        cfg.scheme = scheme;
        cfg.record_every = 100;
        Ok(stability_experiment(&w, Perturbation { amplitude: eps, mode: 2 }, &cfg)?)
    };
    let pure = run(0.0)?;
    r.below("12_drift_E_0", pure.drift_e0, 1e-8);
    r.below("12_drift_E_1", pure.drift_e1, 1e-8);
    r.below("12_drift_E_minus1", pure.drift_e_minus1, 1e-12);
    let eps = 1e-3;
    let perturbed = run(eps)?;
    r.check("13_sup_rho_W", perturbed.sup_rho <= 10.0 * eps, perturbed.sup_rho, 10.0 * eps);
    r.below("13_drift_M_k", perturbed.drift_mk, 1e-8);
    r.output("perturbed_drift_E_0", perturbed.drift_e0);
    r.output("perturbed_drift_E_1", perturbed.drift_e1);
    r.output("pure_sup_rho_W", pure.sup_rho);

    let bo =
        (1..=8i64).map(|n| (symbol_ilw(n, L, 50.0) - (2.0 * PI / L * n as f64 - 1.0 / 50.0)).abs()).fold(0.0, f64::max);
    r.below("14_benjamin_ono_limit", bo, 1e-10);
    Ok(r)
}
