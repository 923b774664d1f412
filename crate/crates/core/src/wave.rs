//! Mean-zero periodic traveling waves `u(x,t) = φ(x − ct)` of the ILW equation.
//!
//! For fixed period `L` and depth `δ` the family is parametrized by the elliptic
//! modulus `k ∈ (0, k₁)`, where `k₁` solves `v(L, δ, k) = (2δ/L) K(k)/K(k') = 1`.
//! The profile satisfies
//!
//! ```text
//! −c φ + φ² − M_δ φ = A,    A = (1/L) ∫₀ᴸ φ² dx
//! ```
//!
//! and has two independent representations: an elliptic one
//! `φ(x) = m₁ dn²(m₄x)/(1 − m₂ dn²(m₄x)) + m₃` and a cosine series with
//! coefficients `φ̂(m) = (2π/L) sinh(mν)/sinh(mμ)`, `ν = 2πδ/L`, `μ = πK'/K`.

use std::f64::consts::PI;

use crate::error::{IlwError, Result};
use crate::fourier::{symbol_ilw, Grid, SpectralField};
use crate::specfun::{complete_pi_negative, heuman_lambda, Elliptic, EllipticModulus};

/// Distance kept from `k₁`, where the speed formula has a pole.
pub const KMAX_MARGIN: f64 = 1e-6;
/// Hard cap on Fourier modes summed in the series representations.
pub const SERIES_CAP: usize = 2000;

const BISECTION_TOL: f64 = 1e-14;

fn check_lengths(period: f64, delta: f64) -> Result<()> {
    if !(period.is_finite() && period > 0.0 && delta.is_finite() && delta > 0.0) {
        return Err(IlwError::Domain(format!("L = {period} and delta = {delta} must be positive")));
    }
    Ok(())
}

/// `K(k)` and `K(k')` for a modulus.
fn complete_pair(k: f64) -> Result<(Elliptic, Elliptic)> {
    let m = EllipticModulus::new(k)?;
    Ok((Elliptic::new(m), Elliptic::new(m.complement()?)))
}

/// Admissibility ratio `v(L, δ, k) = (2δ/L) K(k)/K(k')`; waves exist for `v < 1`.
pub fn velocity_ratio(period: f64, delta: f64, k: f64) -> Result<f64> {
    check_lengths(period, delta)?;
    let (ell, ell_c) = complete_pair(k)?;
    Ok(2.0 * delta / period * ell.complete_k() / ell_c.complete_k())
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(IlwError::RootNotFound(format!("no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}")));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper end `k₁(L, δ)` of the admissible moduli: the root of `v(L, δ, k) = 1`.
pub fn admissible_kmax(period: f64, delta: f64) -> Result<f64> {
    check_lengths(period, delta)?;
    // v is increasing in k, from 0 at k = 0 to ∞ at k = 1
    bisect(|k| Ok(velocity_ratio(period, delta, k)? - 1.0), 1e-9, 1.0 - 1e-15)
}

fn check_admissible(period: f64, delta: f64, k: f64) -> Result<f64> {
    check_lengths(period, delta)?;
    let kmax = admissible_kmax(period, delta)?;
    if !(k > 0.0 && k <= kmax - KMAX_MARGIN) {
        return Err(IlwError::Admissibility(format!("k = {k} outside (0, k1 - {KMAX_MARGIN:e}] with k1 = {kmax:.12}")));
    }
    Ok(kmax)
}

fn speed_unchecked(period: f64, delta: f64, k: f64) -> Result<f64> {
    let (ell, ell_c) = complete_pair(k)?;
    let (kk, kk_c) = (ell.complete_k(), ell_c.complete_k());
    let u = 4.0 * delta * kk / period;
    let (sn, cn, dn) = ell_c.sn_cn_dn(u);
    Ok(1.0 / delta
        - 8.0 * PI * delta * kk / (period * period * kk_c)
        - 4.0 * kk / period * ell_c.zeta(u)
        - 4.0 * kk / period * cn * dn / sn)
}

/// Wave speed `c(k)`.
pub fn wave_speed(period: f64, delta: f64, k: f64) -> Result<f64> {
    check_admissible(period, delta, k)?;
    speed_unchecked(period, delta, k)
}

/// The modulus `k₀` at which the wave speed changes sign.
pub fn speed_root_k0(period: f64, delta: f64) -> Result<f64> {
    let kmax = admissible_kmax(period, delta)?;
    bisect(|k| speed_unchecked(period, delta, k), 1e-6, kmax - KMAX_MARGIN)
}

/// `dc/dk` by Richardson extrapolation of central differences (h = 1e-5, 5e-6).
pub fn dc_dk(period: f64, delta: f64, k: f64) -> Result<f64> {
    let kmax = check_admissible(period, delta, k)?;
    if k < 1e-4 || k > kmax - 1e-4 {
        return Err(IlwError::Domain(format!("k = {k} within 1e-4 of the admissible endpoints")));
    }
    let central = |h: f64| -> Result<f64> {
        Ok((speed_unchecked(period, delta, k + h)? - speed_unchecked(period, delta, k - h)?) / (2.0 * h))
    };
    let (coarse, fine) = (central(1e-5)?, central(5e-6)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `sinh(mν)/sinh(mμ)` without overflow, for `m >= 1`.
fn sinh_ratio(m: f64, nu: f64, mu: f64) -> f64 {
    (-m * (mu - nu)).exp() * (-(-2.0 * m * nu).exp_m1()) / (-(-2.0 * m * mu).exp_m1())
}

/// All the scalar data attached to one traveling wave.
#[derive(Debug, Clone)]
pub struct WaveParams {
    pub period: f64,
    pub delta: f64,
    pub k: f64,
    pub kmax: f64,
    /// `K(k)` and `K(k')`.
    pub big_k: f64,
    pub big_k_prime: f64,
    /// `ν = 2πδ/L` and `μ = πK'/K`; admissibility is `ν < μ`.
    pub nu: f64,
    pub mu: f64,
    pub c: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    /// `N(k) = ∫₀ᴸ φ²`.
    pub norm_sq: f64,
    /// Integration constant `A = N/L`.
    pub a_const: f64,
    /// Galilean shift `a > 0` solving `a² + c a − A = 0`.
    pub shift: f64,
    /// Shifted speed `ς = c + 2a = sqrt(c² + 4A)`.
    pub sigma: f64,
    /// Number of cosine modes needed to reach the series tolerance.
    pub series_terms: usize,
    /// True if the series hit [`SERIES_CAP`] before converging.
    pub series_capped: bool,
    ell: Elliptic,
}

impl WaveParams {
    pub fn new(period: f64, delta: f64, k: f64) -> Result<Self> {
        let kmax = check_admissible(period, delta, k)?;
        let (ell, ell_c) = complete_pair(k)?;
        let (big_k, big_k_prime) = (ell.complete_k(), ell_c.complete_k());
        let c = speed_unchecked(period, delta, k)?;

        let u = 2.0 * big_k * delta / period;
        let (sn, cn, dn) = ell_c.sn_cn_dn(u);
        let m1 = 4.0 * big_k / period * cn * sn * dn;
        let m2 = sn * sn;
        let m3 = -4.0 * big_k / period * ell_c.zeta(u) - 4.0 * delta * PI / (period * period) * big_k / big_k_prime;
        let m4 = 2.0 * big_k / period;

        let nu = 2.0 * PI * delta / period;
        let mu = PI * big_k_prime / big_k;
        let (norm_sq, series_terms, series_capped) = sum_series(|m| {
            let r = sinh_ratio(m, nu, mu);
            8.0 * PI * PI / period * r * r
        });
        let a_const = norm_sq / period;
        let root = (c * c + 4.0 * a_const).sqrt();
        // a = (−c + root)/2 without cancellation for c > 0
        let shift = if c > 0.0 { 2.0 * a_const / (c + root) } else { 0.5 * (root - c) };
        Ok(Self {
            period,
            delta,
            k,
            kmax,
            big_k,
            big_k_prime,
            nu,
            mu,
            c,
            m1,
            m2,
            m3,
            m4,
            norm_sq,
            a_const,
            shift,
            sigma: root,
            series_terms,
            series_capped,
            ell,
        })
    }

    /// `v(L, δ, k)`.
    pub fn velocity_ratio(&self) -> f64 {
        2.0 * self.delta / self.period * self.big_k / self.big_k_prime
    }

    /// Elliptic representation `m₁ dn²(m₄x)/(1 − m₂ dn²(m₄x)) + m₃`.
    pub fn profile_elliptic(&self, x: f64) -> f64 {
        let (_, _, dn) = self.ell.sn_cn_dn(self.m4 * x);
        let dn2 = dn * dn;
        self.m1 * dn2 / (1.0 - self.m2 * dn2) + self.m3
    }

    /// Cosine coefficient `φ̂(m)`; `φ̂(0) = 0`.
    pub fn fourier_coefficient(&self, m: i64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        2.0 * PI / self.period * sinh_ratio(m.unsigned_abs() as f64, self.nu, self.mu)
    }

    /// `φ̂(0..=modes)`.
    pub fn profile_fourier(&self, modes: usize) -> Vec<f64> {
        (0..=modes as i64).map(|m| self.fourier_coefficient(m)).collect()
    }

    /// Evaluate the cosine series with `modes` terms.
    pub fn profile_series(&self, x: f64, modes: usize) -> f64 {
        let w = 2.0 * PI / self.period;
        (1..=modes).rev().map(|m| 2.0 * self.fourier_coefficient(m as i64) * (w * m as f64 * x).cos()).sum()
    }

    /// `N(k)` from the series (same value as `norm_sq`).
    pub fn norm_squared_series(&self) -> f64 {
        self.norm_sq
    }

    /// `N(k)` from the closed form in complete/incomplete elliptic integrals.
    pub fn norm_squared_closed(&self) -> Result<f64> {
        let k = self.k;
        let k2 = k * k;
        let m2 = self.m2;
        if (1.0 - m2).abs() < 1e-14 {
            return Err(IlwError::Degenerate("m2 = 1".into()));
        }
        let modulus = self.ell.modulus();
        let big_k = self.big_k;
        let big_e = self.ell.complete_e();
        let alpha2 = -m2 * k2 / (1.0 - m2);
        let psi = (alpha2 / (alpha2 - k2)).sqrt().asin();
        let lambda = heuman_lambda(psi, modulus)?;
        let root = (alpha2 * (1.0 - alpha2) * (alpha2 - k2)).sqrt();
        let pi3 = complete_pi_negative(alpha2, modulus)?;
        let v2 = 1.0 / (2.0 * (alpha2 - 1.0) * (k2 - alpha2))
            * ((2.0 * k2 * k2 * alpha2 - 2.0 * k2 * k2 + alpha2 * alpha2 * (1.0 - k2)) * big_k / (k2 - alpha2)
                + alpha2 * big_e
                - PI * (2.0 * alpha2 * k2 + 2.0 * alpha2 - alpha2 * alpha2 - 3.0 * k2) * alpha2 * lambda
                    / (2.0 * root));
        let (m1, m3, m4) = (self.m1, self.m3, self.m4);
        let quartic = 2.0 * m1 * m1 / (m4 * (1.0 - m2).powi(2)) / (alpha2 * alpha2)
            * (k2 * k2 * big_k + 2.0 * k2 * (alpha2 - k2) * pi3 + (alpha2 - k2).powi(2) * v2);
        let cross = 2.0 * m1 * m3 / (m4 * (1.0 - m2)) * (PI * (k2 - alpha2) * lambda / root);
        Ok(quartic + cross + self.period * m3 * m3)
    }

    /// `d/dk [K(k')/K(k)] = −π / (2 k k'² K²)`.
    pub fn dratio_dk(&self) -> f64 {
        let modulus = self.ell.modulus();
        let (e, kk) = (self.ell.complete_e(), self.big_k);
        let (kk_c, e_c) = {
            let ell_c = Elliptic::new(modulus.complement().expect("admissible modulus"));
            (ell_c.complete_k(), ell_c.complete_e())
        };
        let k = self.k;
        ((e - kk) * kk_c + kk * e_c) / (k * (k * k - 1.0) * kk * kk)
    }

    /// `N'(k)` from the differentiated series.
    pub fn dn_dk(&self) -> f64 {
        let dq = self.dratio_dk();
        let (nu, mu) = (self.nu, self.mu);
        let (sum, _, _) = sum_series(|m| {
            // sinh²(mν) cosh(mμ) / sinh³(mμ) = ratio² · coth(mμ)
            let r = sinh_ratio(m, nu, mu);
            let coth = 1.0 + 2.0 / (2.0 * m * mu).exp_m1();
            m * r * r * coth
        });
        -16.0 * PI * PI * PI / self.period * sum * dq
    }

    /// `dc/dk` at this wave.
    pub fn dc_dk(&self) -> Result<f64> {
        dc_dk(self.period, self.delta, self.k)
    }

    /// `dA/dk = N'(k)/L`.
    pub fn da_dk(&self) -> f64 {
        self.dn_dk() / self.period
    }

    /// Sample the wave on a grid of `n` points over one period.
    pub fn sample(&self, n: usize) -> Result<SpectralField> {
        let grid = Grid::new(self.period, n)?;
        Ok(grid.sample(|x| self.profile_elliptic(x)))
    }
}

/// Sum positive terms `f(1), f(2), …` until a term drops below `1e-16` of the partial sum.
fn sum_series<F: Fn(f64) -> f64>(f: F) -> (f64, usize, bool) {
    let mut sum = 0.0;
    for m in 1..=SERIES_CAP {
        let term = f(m as f64);
        sum += term;
        if term.abs() < 1e-16 * sum.abs() || term == 0.0 {
            return (sum, m, false);
        }
    }
    (sum, SERIES_CAP, true)
}

/// A wave sampled on a grid, with its analytic Fourier coefficients.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub params: WaveParams,
    pub field: SpectralField,
    /// `φ̂(m)` for `m = 0..=N/2`.
    pub coeffs_analytic: Vec<f64>,
}

impl WaveProfile {
    pub fn new(params: WaveParams, n: usize) -> Result<Self> {
        let field = params.sample(n)?;
        let coeffs_analytic = params.profile_fourier(n / 2);
        Ok(Self { params, field, coeffs_analytic })
    }

    pub fn build(period: f64, delta: f64, k: f64, n: usize) -> Result<Self> {
        Self::new(WaveParams::new(period, delta, k)?, n)
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    /// Max-norm of the traveling-wave residual `−cφ + φ² − M_δφ − A` on the grid.
    pub fn residual(&self) -> f64 {
        travkdv_residual(&self.field, self.params.c, self.params.a_const, self.params.delta)
    }

    /// `dφ/dx` on the grid.
    pub fn derivative(&self) -> SpectralField {
        self.field.derivative()
    }
}

/// Max-norm of `−cφ + φ² − M_δφ − A` for an arbitrary sampled field.
pub fn travkdv_residual(field: &SpectralField, c: f64, a_const: f64, delta: f64) -> f64 {
    let m_phi = field.apply_multiplier(delta);
    field.samples().iter().zip(m_phi.samples()).map(|(p, mp)| (-c * p + p * p - mp - a_const).abs()).fold(0.0, f64::max)
}

/// Residual of the traveling-wave equation for `(L, δ, k)` on `n` points.
pub fn residual_travkdv(params: &WaveParams, n: usize) -> Result<f64> {
    let field = params.sample(n)?;
    Ok(travkdv_residual(&field, params.c, params.a_const, params.delta))
}

/// Linear dispersion check: the `k → 0` limit of `c(k)` is `−θ_δ(1)`.
pub fn linear_limit_speed(period: f64, delta: f64) -> f64 {
    -symbol_ilw(1, period, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{adaptive_simpson, k_series, periodic_trapezoid};

    const L: f64 = PI;

    #[test]
    fn kmax_reproduces_reported_value() {
        let k1 = admissible_kmax(L, 1.0).unwrap();
        assert!((k1 - 0.944085037).abs() < 1e-6);
        assert!((velocity_ratio(L, 1.0, k1).unwrap() - 1.0).abs() < 1e-9);
        let v = velocity_ratio(L, 1.0, 0.5).unwrap();
        let expected = 2.0 / PI * k_series(0.5) / k_series(0.75f64.sqrt());
        assert!((v - expected).abs() < 1e-13 && v < 1.0);
    }

    #[test]
    fn speed_values() {
        let c0 = wave_speed(L, 1.0, 1e-6).unwrap();
        assert!((c0 + 1.07462944).abs() < 1e-5);
        assert!((c0 - linear_limit_speed(L, 1.0)).abs() < 1e-5);
        let k0 = speed_root_k0(L, 1.0).unwrap();
        assert!((k0 - 0.795178532).abs() < 1e-6);
        assert!(wave_speed(L, 1.0, k0).unwrap().abs() < 1e-8);
        assert!(wave_speed(L, 1.0, k0 - 0.05).unwrap() < 0.0);
        assert!(wave_speed(L, 1.0, k0 + 0.05).unwrap() > 0.0);
        assert!(wave_speed(L, 1.0, 0.93).unwrap() > wave_speed(L, 1.0, 0.9).unwrap());
        assert!(wave_speed(L, 1.0, 0.93).unwrap() > 5.0);
    }

    #[test]
    fn inadmissible_moduli_are_rejected() {
        assert!(matches!(wave_speed(L, 1.0, 0.99), Err(IlwError::Admissibility(_))));
        assert!(matches!(WaveParams::new(L, 1.0, 0.0), Err(IlwError::Admissibility(_))));
        let k1 = admissible_kmax(L, 1.0).unwrap();
        assert!(WaveParams::new(L, 1.0, k1 - 1e-7).is_err());
        assert!(matches!(WaveParams::new(L, -1.0, 0.5), Err(IlwError::Domain(_))));
    }

    #[test]
    fn profile_is_even_mean_zero_and_bottoms_out_at_half_period() {
        let p = WaveParams::new(L, 1.0, 0.5).unwrap();
        assert!((p.profile_elliptic(0.3) - p.profile_elliptic(-0.3)).abs() < 1e-15);
        let f = p.sample(256).unwrap();
        let mean = periodic_trapezoid(f.samples(), L) / L;
        assert!(mean.abs() < 1e-10);
        assert!(f.coeffs()[0].norm() < 1e-12);
        let min_idx = f.samples().iter().enumerate().min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0;
        assert_eq!(min_idx, 128);
    }

    #[test]
    fn elliptic_and_fourier_routes_agree() {
        for &k in &[0.3, 0.5, 0.85] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            let grid = Grid::new(L, 256).unwrap();
            let err = grid
                .nodes()
                .iter()
                .map(|&x| (p.profile_elliptic(x) - p.profile_series(x, p.series_terms + 10)).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "k = {k}: {err}");
        }
    }

    #[test]
    fn fourier_coefficients() {
        let p = WaveParams::new(L, 1.0, 0.5).unwrap();
        assert_eq!(p.fourier_coefficient(0), 0.0);
        for m in 1..30 {
            assert_eq!(p.fourier_coefficient(m), p.fourier_coefficient(-m));
            assert!(p.fourier_coefficient(m) > 0.0);
        }
        // log-linear decay with slope ν − μ for large m
        let slope = |m: i64| (p.fourier_coefficient(m + 1) / p.fourier_coefficient(m)).ln();
        assert!((slope(19) - (p.nu - p.mu)).abs() < 1e-12);
        assert!(slope(1) < 0.0);
        // grid transform of the elliptic samples matches the analytic coefficients
        let f = p.sample(256).unwrap().coeffs();
        for (m, fm) in f.iter().enumerate().take(40).skip(1) {
            assert!((fm.re - p.fourier_coefficient(m as i64)).abs() < 1e-13);
        }
    }

    #[test]
    fn norm_routes_agree() {
        let p = WaveParams::new(L, 1.0, 0.5).unwrap();
        assert!(p.norm_sq > 0.0);
        let parseval: f64 =
            L * (1..=p.series_terms as i64).map(|m| 2.0 * p.fourier_coefficient(m).powi(2)).sum::<f64>();
        assert!(((parseval - p.norm_sq) / p.norm_sq).abs() < 1e-12);
        let closed = p.norm_squared_closed().unwrap();
        assert!(((closed - p.norm_sq) / p.norm_sq).abs() < 1e-8);
        let quad = adaptive_simpson(|x| p.profile_elliptic(x).powi(2), 0.0, L, 1e-14);
        assert!(((quad - p.norm_sq) / p.norm_sq).abs() < 1e-9);
        let f = p.sample(512).unwrap();
        assert!(((f.inner(&f).unwrap() - p.norm_sq) / p.norm_sq).abs() < 1e-9);
        assert!((p.a_const - p.norm_sq / L).abs() < 1e-15);
    }

    #[test]
    fn closed_form_sign_bookkeeping() {
        for &k in &[0.2, 0.5, 0.9] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            let k2 = k * k;
            let alpha2 = -p.m2 * k2 / (1.0 - p.m2);
            assert!(alpha2 < 0.0 && p.m2 > 0.0 && p.m2 < 1.0);
            assert!(alpha2 * (1.0 - alpha2) * (alpha2 - k2) > 0.0);
            let psi = (alpha2 / (alpha2 - k2)).sqrt().asin();
            assert!(psi > 0.0 && psi < PI / 2.0);
        }
    }

    #[test]
    fn norm_derivative() {
        for &k in &[0.2, 0.5, 0.85] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            let d = p.dn_dk();
            assert!(d > 0.0);
            let h = 1e-6;
            let fd = (WaveParams::new(L, 1.0, k + h).unwrap().norm_sq
                - WaveParams::new(L, 1.0, k - h).unwrap().norm_sq)
                / (2.0 * h);
            assert!(((fd - d) / d).abs() < 1e-6, "k = {k}: {fd} vs {d}");
        }
        let p = WaveParams::new(L, 1.0, 0.5).unwrap();
        assert!(p.dratio_dk() < 0.0);
        // Legendre's relation collapses the numerator to π/2
        let closed = -PI / (2.0 * 0.5 * 0.75 * p.big_k * p.big_k);
        assert!((p.dratio_dk() - closed).abs() < 1e-13);
    }

    #[test]
    fn speed_derivative() {
        for &k in &[0.2, 0.5, 0.85] {
            let d = dc_dk(L, 1.0, k).unwrap();
            assert!(d > 0.0);
            // halving both steps barely changes the extrapolated value
            let c = |k| wave_speed(L, 1.0, k).unwrap();
            let central = |h: f64| (c(k + h) - c(k - h)) / (2.0 * h);
            let half = (4.0 * central(2.5e-6) - central(5e-6)) / 3.0;
            assert!(((half - d) / d).abs() < 1e-7);
        }
        assert!(dc_dk(L, 1.0, 5e-5).is_err());
        let k0 = speed_root_k0(L, 1.0).unwrap();
        for &k in &[0.82, 0.85, 0.9] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            assert!(p.c > 0.0 && k > k0);
            assert!(p.dn_dk() / p.dc_dk().unwrap() > 0.0);
        }
    }

    #[test]
    fn traveling_wave_residual() {
        for &k in &[0.3, 0.5, 0.85, 0.9] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            let r = residual_travkdv(&p, 256).unwrap();
            assert!(r < 1e-8, "k = {k}: residual {r}");
        }
        let zero = Grid::new(L, 64).unwrap().zeros();
        assert_eq!(travkdv_residual(&zero, 3.0, 0.0, 1.0), 0.0);
        let p = WaveParams::new(L, 1.0, 0.5).unwrap();
        let f = p.sample(256).unwrap();
        let r = travkdv_residual(&f, p.c + 0.1, p.a_const, 1.0);
        assert!(r > 1e-2);
    }

    #[test]
    fn galilean_shift_solves_quadratic() {
        for &k in &[0.1, 0.5, 0.85, 0.93] {
            let p = WaveParams::new(L, 1.0, k).unwrap();
            assert!(p.shift > 0.0);
            let q = p.shift * p.shift + p.c * p.shift - p.a_const;
            assert!(q.abs() < 1e-12 * (1.0 + p.a_const));
            assert!((p.sigma - (p.c + 2.0 * p.shift)).abs() < 1e-12 * p.sigma);
        }
    }

    #[test]
    fn speed_and_norm_increase_across_admissible_range() {
        let k1 = admissible_kmax(L, 1.0).unwrap();
        for i in 0..50 {
            let k = 0.01 + (k1 - 0.02) * i as f64 / 49.0;
            let p = WaveParams::new(L, 1.0, k).unwrap();
            assert!(p.dc_dk().unwrap() > 0.0, "c' at k = {k}");
            assert!(p.dn_dk() > 0.0, "N' at k = {k}");
            assert!(!p.series_capped);
        }
    }
}
