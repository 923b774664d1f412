//! The linearized operator `L = M_δ + c − 2φ_c` around a traveling wave, its
//! spectrum, and the PF(2) test behind the count of its negative eigenvalues.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{IlwError, Result};
use crate::fourier::{inverse, symbol_ilw, Grid, SpectralField};
use crate::wave::{WaveParams, WaveProfile};

/// Iteration cap handed to the symmetric eigensolver.
const EIG_MAX_ITER: usize = 10_000;

/// Real-space collocation matrix of `M_δ + c − 2φ` on a grid.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub delta: f64,
    pub speed: f64,
    pub entries: DMatrix<f64>,
    /// Wave the potential was taken from, if any.
    pub params: Option<WaveParams>,
}

impl OperatorMatrix {
    /// `M_δ + speed − 2·diag(potential)`.
    pub fn from_potential(grid: Grid, delta: f64, speed: f64, potential: &[f64]) -> Result<Self> {
        let n = grid.len();
        if potential.len() != n {
            return Err(IlwError::Shape { expected: n, got: potential.len() });
        }
        let symbol: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new((symbol_ilw(grid.mode(j), grid.period(), delta) + speed) / n as f64, 0.0))
            .collect();
        let column = inverse(&symbol);
        let mut entries = DMatrix::from_fn(n, n, |i, j| column[(i + n - j) % n]);
        for (i, p) in potential.iter().enumerate() {
            entries[(i, i)] -= 2.0 * p;
        }
        let entries = (&entries + entries.transpose()) * 0.5;
        Ok(Self { grid, delta, speed, entries, params: None })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    pub fn apply_field(&self, f: &SpectralField) -> Result<SpectralField> {
        SpectralField::new(self.grid, self.apply(f.samples()))
    }

    /// `max |A − Aᵀ|`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }

    /// `max |AR − RA|` for the reflection `R: x ↦ −x`.
    pub fn parity_defect(&self) -> f64 {
        let n = self.size();
        let refl = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, refl(j))] - self.entries[(refl(i), j)]).abs());
            }
        }
        worst
    }

    /// Spectral norm, from the eigenvalues.
    pub fn norm(&self) -> Result<f64> {
        let e = eig_sym(&self.entries)?;
        Ok(e.values.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
    }
}

/// Build `L = M_δ + c − 2φ_c` for a wave sampled on `n` points.
pub fn build_operator(profile: &WaveProfile, n: usize) -> Result<OperatorMatrix> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(IlwError::Domain(format!("operator size N = {n} must be even and at least 64")));
    }
    let p = &profile.params;
    let field = p.sample(n)?;
    let mut op = OperatorMatrix::from_potential(*field.grid(), p.delta, p.c, field.samples())?;
    op.params = Some(p.clone());
    Ok(op)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `max_i ‖A v_i − λ_i v_i‖`.
    pub max_residual: f64,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

/// Full symmetric eigendecomposition; errors if the solver fails or any pair
/// misses `‖Av − λv‖ < 1e-10 ‖A‖`.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(IlwError::Shape { expected: a.nrows(), got: a.ncols() });
    }
    let n = a.nrows();
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
        IlwError::Numerical(format!("symmetric eigensolver did not converge in {EIG_MAX_ITER} sweeps (n = {n})"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let scale = values.iter().fold(0.0, |m: f64, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let residual = a * &vectors - &vectors * DMatrix::from_diagonal(&DVector::from_column_slice(&values));
    let max_residual = residual.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_residual > 1e-10 * scale {
        return Err(IlwError::Numerical(format!(
            "eigenpair residual {max_residual:e} exceeds 1e-10 * ‖A‖ = {:e}",
            1e-10 * scale
        )));
    }
    Ok(EigenDecomposition { values, vectors, max_residual })
}

/// Symmetry class of a grid vector under `x ↦ −x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Classify `v` as even or odd when its parity projector residual is below `tol ‖v‖`.
pub fn classify_parity(v: &[f64], tol: f64) -> Parity {
    let n = v.len();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut even, mut odd) = (0.0, 0.0);
    for (j, x) in v.iter().enumerate() {
        let r = v[(n - j) % n];
        even += (x - r).powi(2);
        odd += (x + r).powi(2);
    }
    if even.sqrt() <= tol * norm {
        Parity::Even
    } else if odd.sqrt() <= tol * norm {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Spectral facts about `L` at one grid size.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    /// `‖L‖` (largest eigenvalue magnitude).
    pub operator_norm: f64,
    /// Relative tolerance requested and the absolute zero threshold `rel_tol ‖L‖`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    /// `‖L φ'‖ / ‖φ'‖`.
    pub kernel_residual: f64,
    /// `|cos|` between the eigenvector of smallest `|λ|` and `φ'`.
    pub kernel_cosine: f64,
    /// Smallest `|λ|` among eigenvalues outside the zero band.
    pub gap: f64,
    /// Max shift of the lowest ten eigenvalues between `N/2` and `N` points.
    pub truncation_drift: f64,
    pub negative_parity: Option<Parity>,
    pub kernel_parity: Option<Parity>,
}

/// Eigenvalue counts, kernel alignment and truncation drift for the wave's operator.
pub fn spectrum_report(profile: &WaveProfile, n: usize, rel_tol: f64) -> Result<SpectrumReport> {
    let op = build_operator(profile, n)?;
    let eig = eig_sym(&op.entries)?;
    let operator_norm = eig.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let abs_tol = rel_tol * operator_norm;
    let n_neg = eig.values.iter().filter(|&&v| v < -abs_tol).count();
    let n_zero = eig.values.iter().filter(|&&v| v.abs() <= abs_tol).count();
    let n_pos = n - n_neg - n_zero;

    let dphi = profile.params.sample(n)?.derivative();
    let l_dphi = op.apply(dphi.samples());
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let kernel_residual = norm(&l_dphi) / norm(dphi.samples());

    let kernel_idx = (0..n).min_by(|&i, &j| eig.values[i].abs().total_cmp(&eig.values[j].abs())).unwrap_or(0);
    let kernel_vec = eig.vector(kernel_idx);
    let kernel_cosine = cosine(&kernel_vec, dphi.samples()).abs();
    let gap = eig.values.iter().filter(|v| v.abs() > abs_tol).fold(f64::INFINITY, |m, v| m.min(v.abs()));

    let coarse = eig_sym(&build_operator(profile, n / 2)?.entries)?;
    let truncation_drift =
        eig.values.iter().zip(&coarse.values).take(10).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let parity_tol = 1e-8;
    let negative_parity = (n_neg > 0).then(|| classify_parity(&eig.vector(0), parity_tol));
    let kernel_parity = (n_zero > 0).then(|| classify_parity(&kernel_vec, parity_tol));

    Ok(SpectrumReport {
        n,
        eigenvalues: eig.values,
        operator_norm,
        rel_tol,
        abs_tol,
        n_neg,
        n_zero,
        n_pos,
        kernel_residual,
        kernel_cosine,
        gap,
        truncation_drift,
        negative_parity,
        kernel_parity,
    })
}

/// The positive wave `φ_ς = a + φ_c`, which solves `M_δψ + ςψ − ψ² = 0`.
#[derive(Debug, Clone)]
pub struct ShiftedWave {
    pub a: f64,
    pub sigma: f64,
    pub field: SpectralField,
    /// Max-norm residual of `M_δψ + ςψ − ψ²`.
    pub residual: f64,
    /// Minimum of `φ_ς` on a grid four times finer.
    pub min_refined: f64,
}

/// Galilean shift of a wave; fails if the shifted profile is not positive.
pub fn galilean_shift(profile: &WaveProfile) -> Result<ShiftedWave> {
    let p = &profile.params;
    let field = profile.field.add_scalar(p.shift);
    let m = field.apply_multiplier(p.delta);
    let residual = field
        .samples()
        .iter()
        .zip(m.samples())
        .map(|(psi, mpsi)| (mpsi + p.sigma * psi - psi * psi).abs())
        .fold(0.0, f64::max);
    let fine = p.sample(4 * profile.grid().len())?;
    let min_refined = fine.samples().iter().fold(f64::INFINITY, |m, v| m.min(v + p.shift));
    if !(min_refined > 0.0) {
        return Err(IlwError::Pf2Precondition(format!(
            "shifted wave is not positive: min = {min_refined:e} (a = {}, k = {})",
            p.shift, p.k
        )));
    }
    Ok(ShiftedWave { a: p.shift, sigma: p.sigma, field, residual, min_refined })
}

/// Max entrywise gap between `M_δ + c − 2φ` and `M_δ + ς − 2(φ + a)` for a chosen `(a, ς)`.
pub fn operator_identity_defect(profile: &WaveProfile, n: usize, a: f64, sigma: f64) -> Result<f64> {
    let op = build_operator(profile, n)?;
    let p = &profile.params;
    let shifted: Vec<f64> = p.sample(n)?.samples().iter().map(|v| v + a).collect();
    let op_s = OperatorMatrix::from_potential(op.grid, p.delta, sigma, &shifted)?;
    Ok((&op.entries - &op_s.entries).amax())
}

/// `operator_identity_defect` at the wave's own shift `a` and speed `ς = c + 2a`.
pub fn operator_identity_check(profile: &WaveProfile, n: usize) -> Result<f64> {
    operator_identity_defect(profile, n, profile.params.shift, profile.params.sigma)
}

/// A positive even sequence `α_n = s · r^{|n|} · exp(g_{|n|})`, stored through
/// `ln s`, `ln r` and the corrections `g`. Splitting off the geometric envelope keeps
/// the sign of `α_a α_b − α_c α_d` computable long after the values underflow.
#[derive(Debug, Clone)]
pub struct EnvelopedSequence {
    pub log_scale: f64,
    pub log_ratio: f64,
    corr: Vec<f64>,
    positive: bool,
}

impl EnvelopedSequence {
    pub fn new(log_scale: f64, log_ratio: f64, corr: Vec<f64>) -> Self {
        let positive = corr.iter().all(|c| c.is_finite()) && log_scale.is_finite() && log_ratio.is_finite();
        Self { log_scale, log_ratio, corr, positive }
    }

    /// From plain values `α_0, α_1, …` (extended evenly).
    pub fn from_values(values: &[f64]) -> Self {
        let positive = values.iter().all(|&v| v > 0.0 && v.is_finite());
        let corr = values.iter().map(|&v| if v > 0.0 { v.ln() } else { f64::NAN }).collect();
        Self { log_scale: 0.0, log_ratio: 0.0, corr, positive }
    }

    /// `α_n = sech(n) = 2e^{-|n|}/(1 + e^{-2|n|})`.
    pub fn sech(max_index: usize) -> Self {
        let corr = (0..=max_index).map(|n| -(-2.0 * n as f64).exp().ln_1p()).collect();
        Self::new(std::f64::consts::LN_2, -1.0, corr)
    }

    /// Fourier coefficients of the shifted wave: `α_0 = a`, `α_m = φ̂(m)`.
    pub fn shifted_wave(params: &WaveParams, max_index: usize) -> Self {
        let (nu, mu) = (params.nu, params.mu);
        let log_scale = (2.0 * std::f64::consts::PI / params.period).ln();
        let corr = (0..=max_index)
            .map(|m| {
                if m == 0 {
                    params.shift.ln() - log_scale
                } else {
                    let m = m as f64;
                    (-(-2.0 * m * nu).exp()).ln_1p() - (-(-2.0 * m * mu).exp()).ln_1p()
                }
            })
            .collect();
        Self::new(log_scale, nu - mu, corr)
    }

    pub fn max_index(&self) -> usize {
        self.corr.len() - 1
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn log_value(&self, n: i64) -> f64 {
        let m = n.unsigned_abs() as usize;
        self.log_scale + m as f64 * self.log_ratio + self.corr[m]
    }

    pub fn value(&self, n: i64) -> f64 {
        self.log_value(n).exp()
    }

    /// `ln(α_p α_q) − ln(α_r α_s)` for `p + q = r + s`, and a bound on its round-off.
    fn log_minor_excess(&self, p: i64, q: i64, r: i64, s: i64) -> (f64, f64) {
        let plus = [p.unsigned_abs() as usize, q.unsigned_abs() as usize];
        let minus = [r.unsigned_abs() as usize, s.unsigned_abs() as usize];
        let envelope = (plus[0] + plus[1]) as f64 - (minus[0] + minus[1]) as f64;
        // cancel matching indices exactly before summing
        let mut live_plus = [true, true];
        let mut live_minus = [true, true];
        for i in 0..2 {
            for j in 0..2 {
                if live_plus[i] && live_minus[j] && plus[i] == minus[j] {
                    live_plus[i] = false;
                    live_minus[j] = false;
                }
            }
        }
        let mut terms = [0.0; 5];
        let mut len = 0;
        if envelope != 0.0 {
            terms[len] = envelope * self.log_ratio;
            len += 1;
        }
        for i in 0..2 {
            if live_plus[i] {
                terms[len] = self.corr[plus[i]];
                len += 1;
            }
            if live_minus[i] {
                terms[len] = -self.corr[minus[i]];
                len += 1;
            }
        }
        let terms = &mut terms[..len];
        terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        // Neumaier summation
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &t in terms.iter() {
            let next = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - next) + t } else { (t - next) + sum };
            sum = next;
        }
        let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
        (sum + comp, 16.0 * f64::EPSILON * magnitude)
    }
}

/// Outcome of the windowed PF(2) test.
#[derive(Debug, Clone)]
pub struct PF2Report {
    pub window: usize,
    /// `α_0 … α_{2M}`; the sequence is even.
    pub alpha: Vec<f64>,
    pub positive: bool,
    pub minors_tested: usize,
    pub violations: usize,
    /// Smallest minor `α_{n₁−m₁}α_{n₂−m₂} − α_{n₁−m₂}α_{n₂−m₁}` (may underflow to 0).
    pub min_minor: f64,
    /// Natural log of the smallest minor, finite when all tested minors are positive.
    pub log_min_minor: f64,
    /// Smallest minor relative to its subtracted product.
    pub min_relative_minor: f64,
    /// First failing `(n₁, n₂, m₁, m₂)`.
    pub first_violation: Option<(i64, i64, i64, i64)>,
    pub pass: bool,
}

/// Check positivity and every 2×2 minor with `n₁ < n₂`, `m₁ < m₂` in `[−M, M]`;
/// the inequality must be strict when `n₂ > m₁` and `n₁ < m₂`.
pub fn pf2_check(alpha: &EnvelopedSequence, window: usize) -> Result<PF2Report> {
    if alpha.max_index() < 2 * window {
        return Err(IlwError::Window(format!(
            "window M = {window} needs |n| <= {}, sequence has {}",
            2 * window,
            alpha.max_index()
        )));
    }
    let values: Vec<f64> = (0..=2 * window as i64).map(|n| alpha.value(n)).collect();
    let mut report = PF2Report {
        window,
        alpha: values,
        positive: alpha.is_positive(),
        minors_tested: 0,
        violations: 0,
        min_minor: f64::INFINITY,
        log_min_minor: f64::INFINITY,
        min_relative_minor: f64::INFINITY,
        first_violation: None,
        pass: false,
    };
    if !report.positive {
        return Ok(report);
    }
    let w = window as i64;
    for n1 in -w..=w {
        for n2 in n1 + 1..=w {
            for m1 in -w..=w {
                for m2 in m1 + 1..=w {
                    let (p, q, r, s) = (n1 - m1, n2 - m2, n1 - m2, n2 - m1);
                    let strict = n2 > m1 && n1 < m2;
                    let (excess, noise) = alpha.log_minor_excess(p, q, r, s);
                    report.minors_tested += 1;
                    let ok = if strict { excess > noise } else { excess >= -noise };
                    if !ok {
                        report.violations += 1;
                        report.first_violation.get_or_insert((n1, n2, m1, m2));
                    }
                    let relative = excess.exp_m1();
                    let log_base = alpha.log_value(r) + alpha.log_value(s);
                    if relative < report.min_relative_minor {
                        report.min_relative_minor = relative;
                    }
                    let log_minor = if relative > 0.0 { log_base + relative.ln() } else { f64::NEG_INFINITY };
                    if log_minor < report.log_min_minor {
                        report.log_min_minor = log_minor;
                        report.min_minor = log_base.exp() * relative;
                    }
                }
            }
        }
    }
    report.pass = report.violations == 0;
    Ok(report)
}

/// PF(2) test for the shifted wave's Fourier coefficients.
pub fn pf2_check_wave(params: &WaveParams, window: usize) -> Result<PF2Report> {
    pf2_check(&EnvelopedSequence::shifted_wave(params, 2 * window), window)
}
