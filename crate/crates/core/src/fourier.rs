//! Periodic grids, discrete Fourier analysis and the ILW multiplier `M_δ`.
//!
//! Coefficients use the normalization `ĝ(n) = (1/N) Σ_j g(x_j) e^{-2πi n x_j / L}`,
//! i.e. the discrete version of `(1/L) ∫ g e^{-2πi n x / L} dx`, stored in FFT
//! order: slot `j` holds mode `j` for `j <= N/2` and mode `j - N` above that.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{IlwError, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Uniform grid `x_j = j L / N`, `j = 0..N`, on one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    period: f64,
    n: usize,
}

impl Grid {
    pub fn new(period: f64, n: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(IlwError::Domain(format!("period L = {period} must be positive")));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(IlwError::Domain(format!("sample count N = {n} must be even and >= 8")));
        }
        Ok(Self { period, n })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed mode number held in FFT slot `j`.
    pub fn mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// FFT slot of mode `n`, if it is resolved (`-N/2 < n <= N/2`).
    pub fn slot(&self, n: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if n > -half && n <= half {
            Some(n.rem_euclid(self.n as i64) as usize)
        } else {
            None
        }
    }

    /// Angular wavenumber `2π n / L` of slot `j`, with the Nyquist slot mapped to zero
    /// so that odd-order derivatives stay real.
    pub fn wavenumber(&self, j: usize) -> f64 {
        if j == self.n / 2 {
            0.0
        } else {
            2.0 * PI * self.mode(j) as f64 / self.period
        }
    }

    /// Sample a function on the grid.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> SpectralField {
        SpectralField { grid: *self, samples: self.nodes().into_iter().map(f).collect() }
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField { grid: *self, samples: vec![0.0; self.n] }
    }
}

/// Forward transform of real samples.
pub fn transform(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    forward_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse transform; the imaginary part (round-off for Hermitian input) is dropped.
pub fn inverse(coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    inverse_plan(buf.len()).process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Unnormalized in-place complex DFT, `Σ_j z_j e^{∓2πi jm/N}` (minus sign forward).
pub fn dft_in_place(data: &mut [Complex64], forward: bool) {
    let plan = if forward { forward_plan(data.len()) } else { inverse_plan(data.len()) };
    plan.process(data);
}

/// `x coth(x δ) - 1/δ` written as `(y coth y - 1)/δ` with `y = xδ`.
fn shifted_coth(y: f64) -> f64 {
    if y < 0.1 {
        // y coth y - 1 = y²/3 - y⁴/45 + 2y⁶/945 - y⁸/4725 + 2y¹⁰/93555
        let y2 = y * y;
        y2 * (1.0 / 3.0 + y2 * (-1.0 / 45.0 + y2 * (2.0 / 945.0 + y2 * (-1.0 / 4725.0 + y2 * 2.0 / 93555.0))))
    } else {
        // coth y = 1 + 2/(e^{2y} - 1), overflow-free for large y
        y * (1.0 + 2.0 / (2.0 * y).exp_m1()) - 1.0
    }
}

/// ILW symbol `θ_δ(n) = (2π|n|/L) coth(2π|n|δ/L) − 1/δ`, with `θ_δ(0) = 0`.
pub fn symbol_ilw(n: i64, period: f64, delta: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = 2.0 * PI * n.unsigned_abs() as f64 / period;
    shifted_coth(x * delta) / delta
}

/// A real periodic field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    samples: Vec<f64>,
}

impl SpectralField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(IlwError::Shape { expected: grid.len(), got: samples.len() });
        }
        Ok(Self { grid, samples })
    }

    /// Field from FFT-ordered coefficients.
    pub fn from_coeffs(grid: Grid, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(IlwError::Shape { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid, samples: inverse(coeffs) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn coeffs(&self) -> Vec<Complex64> {
        transform(&self.samples)
    }

    /// Coefficient of a single mode; zero if unresolved.
    pub fn coeff(&self, n: i64) -> Complex64 {
        match self.grid.slot(n) {
            Some(j) => self.coeffs()[j],
            None => Complex64::new(0.0, 0.0),
        }
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(IlwError::Shape { expected: self.grid.len(), got: other.grid.len() });
        }
        Ok(())
    }

    fn map_coeffs<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Self {
        let coeffs: Vec<Complex64> = self.coeffs().into_iter().enumerate().map(|(j, c)| f(j, c)).collect();
        Self { grid: self.grid, samples: inverse(&coeffs) }
    }

    /// `M_δ` applied mode by mode.
    pub fn apply_multiplier(&self, delta: f64) -> Self {
        let g = self.grid;
        self.map_coeffs(|j, c| c * symbol_ilw(g.mode(j), g.period(), delta))
    }

    /// Spectral derivative `d/dx`.
    pub fn derivative(&self) -> Self {
        let g = self.grid;
        self.map_coeffs(|j, c| c * Complex64::new(0.0, g.wavenumber(j)))
    }

    /// Translate: returns `x ↦ g(x + shift)`, exact for band-limited data.
    pub fn translate(&self, shift: f64) -> Self {
        let g = self.grid;
        self.map_coeffs(|j, c| {
            if j == g.len() / 2 {
                // keep the Nyquist slot real
                c * (2.0 * PI * g.mode(j) as f64 * shift / g.period()).cos()
            } else {
                c * Complex64::from_polar(1.0, 2.0 * PI * g.mode(j) as f64 * shift / g.period())
            }
        })
    }

    /// Energy-space norm `(Σ_m [1 + θ_δ(m)] |ĝ(m)|²)^{1/2}` over resolved modes.
    pub fn wnorm(&self, delta: f64) -> f64 {
        let g = self.grid;
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| (1.0 + symbol_ilw(g.mode(j), g.period(), delta)) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Product with the 2/3 rule: both factors and the result keep only `|n| <= N/3`.
    pub fn product_dealiased(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let a = dealias(&self.grid, self.coeffs());
        let b = dealias(&self.grid, other.coeffs());
        let prod: Vec<f64> = inverse(&a).iter().zip(inverse(&b)).map(|(x, y)| x * y).collect();
        let coeffs = dealias(&self.grid, transform(&prod));
        Ok(Self { grid: self.grid, samples: inverse(&coeffs) })
    }

    /// `∫_0^L g dx` by the trapezoidal rule (exact for resolved modes).
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.spacing()
    }

    /// `∫_0^L f g dx`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).sum::<f64>() * self.grid.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|v| v + s).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|v| v * s).collect() }
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self { grid: self.grid, samples: self.samples.iter().zip(&other.samples).map(|(x, y)| x + a * y).collect() })
    }

    /// Same field with its mean removed.
    pub fn mean_free(&self) -> Self {
        let mean = self.samples.iter().sum::<f64>() / self.samples.len() as f64;
        self.add_scalar(-mean)
    }
}

/// Zero every slot with `|n| > N/3`.
pub fn dealias(grid: &Grid, mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    let cutoff = (grid.len() / 3) as i64;
    for (j, c) in coeffs.iter_mut().enumerate() {
        if grid.mode(j).abs() > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    coeffs
}
