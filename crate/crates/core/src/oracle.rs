//! Independent reference computations used only by tests.
//!
//! Nothing here shares code paths with the library routines it checks.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // split first so that the initial Simpson estimate cannot be accidentally exact
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            step(&f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Maclaurin series `K(k) = (π/2) Σ [(2n)! / (2^{2n} (n!)²)]² k^{2n}`.
pub fn k_series(k: f64) -> f64 {
    let k2 = k * k;
    let mut coeff = 1.0;
    let mut pow = 1.0;
    let mut sum = 1.0;
    for n in 1..100_000 {
        let r = (2 * n - 1) as f64 / (2 * n) as f64;
        coeff *= r * r;
        pow *= k2;
        let term = coeff * pow;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    FRAC_PI_2 * sum
}

/// `O(N²)` DFT with the `(1/N) Σ g_j e^{-2πi n j / N}` normalization;
/// returns `(re, im)` for `n = 0..N`.
pub fn direct_dft(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    (0..n)
        .map(|m| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &g) in samples.iter().enumerate() {
                let ang = -2.0 * PI * ((m * j) % n) as f64 / n as f64;
                re += g * ang.cos();
                im += g * ang.sin();
            }
            (re / n as f64, im / n as f64)
        })
        .collect()
}

/// Trapezoidal rule over one period of uniformly sampled periodic data.
pub fn periodic_trapezoid(samples: &[f64], period: f64) -> f64 {
    samples.iter().sum::<f64>() * period / samples.len() as f64
}

/// Brute-force minimum of `f` over a uniform scan of `[a, b]`.
pub fn scan_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    (0..=n)
        .map(|i| {
            let x = a + (b - a) * i as f64 / n as f64;
            (x, f(x))
        })
        .fold((a, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}
