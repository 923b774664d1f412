//! Hamiltonian-Krein index of a traveling wave: the scalars `I = ⟨L⁻¹1, 1⟩` and
//! the 2×2 matrix `D`, each computed by linear solves and by closed forms in
//! `c(k)` and `N(k)`, and the resulting linear stability verdict.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{IlwError, Result};
use crate::fourier::SpectralField;
use crate::linop::{build_operator, classify_parity, spectrum_report, OperatorMatrix, Parity, SpectrumReport};
use crate::wave::{WaveParams, WaveProfile};

/// Largest condition number accepted for the even-block solve.
pub const MAX_CONDITION: f64 = 1e12;
/// Below this `|c|` the closed forms are not used for the verdict.
pub const SPEED_ZERO_TOL: f64 = 1e-8;

/// `L` restricted to even grid functions, diagonalized once for repeated solves.
///
/// Basis: `e_0`, `(e_j + e_{N−j})/√2` for `0 < j < N/2`, and `e_{N/2}`.
#[derive(Debug, Clone)]
pub struct EvenSolver {
    n: usize,
    op: OperatorMatrix,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    pub condition: f64,
}

impl EvenSolver {
    pub fn new(op: &OperatorMatrix) -> Result<Self> {
        let n = op.size();
        let half = n / 2;
        let basis = |a: usize| -> Vec<(usize, f64)> {
            if a == 0 || a == half {
                vec![(a, 1.0)]
            } else {
                let w = std::f64::consts::FRAC_1_SQRT_2;
                vec![(a, w), (n - a, w)]
            }
        };
        let cols: Vec<Vec<(usize, f64)>> = (0..=half).map(basis).collect();
        let a = &op.entries;
        let block = DMatrix::from_fn(half + 1, half + 1, |r, c| {
            let mut s = 0.0;
            for &(i, wi) in &cols[r] {
                for &(j, wj) in &cols[c] {
                    s += wi * wj * a[(i, j)];
                }
            }
            s
        });
        let block = (&block + block.transpose()) * 0.5;
        let eig = SymmetricEigen::new(block);
        let abs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
        let (lo, hi) = abs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let condition = hi / lo;
        if !(condition <= MAX_CONDITION) {
            return Err(IlwError::Singular(format!(
                "even block condition number {condition:e} exceeds {MAX_CONDITION:e}"
            )));
        }
        Ok(Self {
            n,
            op: op.clone(),
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
            condition,
        })
    }

    /// Solve `L h = rhs` for even `rhs`; the result is even.
    pub fn solve(&self, rhs: &SpectralField) -> Result<SpectralField> {
        let f = rhs.samples();
        if f.len() != self.n {
            return Err(IlwError::Shape { expected: self.n, got: f.len() });
        }
        if f.iter().any(|v| *v != 0.0) && classify_parity(f, 1e-10) != Parity::Even {
            return Err(IlwError::Parity("right-hand side is not even".into()));
        }
        let half = self.n / 2;
        let w = std::f64::consts::SQRT_2;
        // coordinates of f in the even basis
        let coords = DVector::from_fn(half + 1, |a, _| if a == 0 || a == half { f[a] } else { w * f[a] });
        let mut y = self.vectors.transpose() * coords;
        for (yi, lam) in y.iter_mut().zip(&self.values) {
            *yi /= lam;
        }
        let y = &self.vectors * y;
        let mut h = vec![0.0; self.n];
        for a in 0..=half {
            if a == 0 || a == half {
                h[a] = y[a];
            } else {
                h[a] = y[a] / w;
                h[self.n - a] = y[a] / w;
            }
        }
        let residual = self.op.apply(&h).iter().zip(f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if residual > 1e-10 * norm {
            return Err(IlwError::Numerical(format!("even solve residual {residual:e} vs ‖rhs‖ = {norm:e}")));
        }
        SpectralField::new(self.op.grid, h)
    }
}

/// One-shot even-block solve.
pub fn solve_even(op: &OperatorMatrix, rhs: &SpectralField) -> Result<SpectralField> {
    EvenSolver::new(op)?.solve(rhs)
}

/// `dN/dc = N'(k)/c'(k)`.
pub fn dn_dc(params: &WaveParams) -> Result<f64> {
    Ok(params.dn_dk() / params.dc_dk()?)
}

/// Closed forms of `I`, `⟨L⁻¹φ,1⟩` and `⟨L⁻¹φ,φ⟩` in terms of `c`, `L` and `dN/dc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub dn_dc: f64,
    pub i: f64,
    pub lphi_one: f64,
    pub lphi_phi: f64,
    pub det_d: f64,
}

impl ClosedForms {
    pub fn new(params: &WaveParams) -> Result<Self> {
        let (c, l) = (params.c, params.period);
        let nc = dn_dc(params)?;
        let x = c * l + 2.0 * nc;
        let i = l * l / x;
        Ok(Self { dn_dc: nc, i, lphi_one: -l * nc / x, lphi_phi: -c * l * nc / (2.0 * x), det_d: -nc / (2.0 * i) })
    }

    pub fn d_matrix(&self) -> [[f64; 2]; 2] {
        d_matrix(self.i, self.lphi_one, self.lphi_phi)
    }
}

fn d_matrix(i: f64, lphi_one: f64, lphi_phi: f64) -> [[f64; 2]; 2] {
    [[lphi_phi / i, lphi_one / i], [lphi_one / i, 1.0]]
}

fn det2(d: &[[f64; 2]; 2]) -> f64 {
    d[0][0] * d[1][1] - d[0][1] * d[1][0]
}

/// `L⁻¹1`, `L⁻¹φ` and the pairings built from them.
#[derive(Debug, Clone)]
pub struct InverseData {
    pub inv_one: SpectralField,
    pub inv_phi: SpectralField,
    /// `I = ⟨L⁻¹1, 1⟩`.
    pub i: f64,
    pub lphi_one: f64,
    pub lphi_phi: f64,
    pub condition: f64,
}

impl InverseData {
    pub fn new(profile: &WaveProfile, n: usize) -> Result<Self> {
        let op = build_operator(profile, n)?;
        let solver = EvenSolver::new(&op)?;
        let phi = profile.params.sample(n)?;
        let one = phi.grid().sample(|_| 1.0);
        let inv_one = solver.solve(&one)?;
        let inv_phi = solver.solve(&phi)?;
        Ok(Self {
            i: inv_one.inner(&one)?,
            lphi_one: inv_phi.inner(&one)?,
            lphi_phi: inv_phi.inner(&phi)?,
            inv_one,
            inv_phi,
            condition: solver.condition,
        })
    }

    pub fn d_matrix(&self) -> Result<[[f64; 2]; 2]> {
        if self.i.abs() < 1e-14 {
            return Err(IlwError::Degenerate(format!("I = {:e} vanishes", self.i)));
        }
        Ok(d_matrix(self.i, self.lphi_one, self.lphi_phi))
    }

    /// Max of `|c L⁻¹1 − 2 L⁻¹φ − 1|` over the grid.
    pub fn identity_residual(&self, c: f64) -> f64 {
        self.inv_one
            .samples()
            .iter()
            .zip(self.inv_phi.samples())
            .map(|(h1, hp)| (c * h1 - 2.0 * hp - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `(I_direct, I_closed)`.
pub fn compute_i(profile: &WaveProfile, n: usize) -> Result<(f64, f64)> {
    let direct = InverseData::new(profile, n)?.i;
    Ok((direct, ClosedForms::new(&profile.params)?.i))
}

/// `(D_direct, detD_direct, detD_closed)`.
pub fn compute_d(profile: &WaveProfile, n: usize) -> Result<([[f64; 2]; 2], f64, f64)> {
    let d = InverseData::new(profile, n)?.d_matrix()?;
    Ok((d, det2(&d), ClosedForms::new(&profile.params)?.det_d))
}

/// Linear stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LinearlyStable,
    LinearlyUnstable,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LinearlyStable => "LinearlyStable",
            Verdict::LinearlyUnstable => "LinearlyUnstable",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Index counts and the verdict derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexCount {
    pub n_l: usize,
    pub n_i: usize,
    pub n_d: usize,
    pub k_ham: Option<i64>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Negative eigenvalues of a symmetric 2×2 matrix.
pub fn negative_count_2x2(d: &[[f64; 2]; 2]) -> usize {
    let tr = d[0][0] + d[1][1];
    let det = det2(d);
    let disc = ((d[0][0] - d[1][1]).powi(2) + 4.0 * d[0][1] * d[1][0]).max(0.0).sqrt();
    let (lo, hi) = (0.5 * (tr - disc), 0.5 * (tr + disc));
    if det < 0.0 {
        1
    } else {
        [lo, hi].iter().filter(|&&v| v < 0.0).count()
    }
}

/// `K_Ham = n(L) − n(I) − n(D)` with the preconditions checked.
pub fn krein_verdict(spectrum: &SpectrumReport, i: f64, d: &[[f64; 2]; 2]) -> IndexCount {
    let mut reasons = Vec::new();
    if !(i.abs() > 1e-12) {
        reasons.push(format!("I = {i:e} is zero"));
    }
    let det = det2(d);
    let scale = d.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale) {
        reasons.push(format!("D is singular (det = {det:e})"));
    }
    if spectrum.n_zero != 1 {
        reasons.push(format!("kernel dimension {} is not 1", spectrum.n_zero));
    }
    let n_l = spectrum.n_neg;
    let n_i = usize::from(i <= 0.0);
    let n_d = negative_count_2x2(d);
    let k_ham = n_l as i64 - n_i as i64 - n_d as i64;
    let (k_ham, verdict) = if !reasons.is_empty() {
        (None, Verdict::Inconclusive)
    } else {
        match k_ham {
            0 => (Some(0), Verdict::LinearlyStable),
            1 => (Some(1), Verdict::LinearlyUnstable),
            other => {
                reasons.push(format!("K_Ham = {other} outside {{0, 1}}"));
                (Some(other), Verdict::Inconclusive)
            }
        }
    };
    IndexCount { n_l, n_i, n_d, k_ham, verdict, reasons }
}

/// `⟨L ∂φ/∂k, ∂φ/∂k⟩` by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P3Report {
    /// `−(1/2) c'(k) N'(k)`.
    pub closed: f64,
    /// Pairing with `∂φ/∂k` from finite differences of the profile.
    pub direct: f64,
    pub relative_gap: f64,
    /// Max of `|L ∂φ/∂k + c'(k) φ + A'(k)|`.
    pub field_residual: f64,
}

/// Condition (P3) check at a wave.
pub fn p3_check(profile: &WaveProfile, n: usize) -> Result<P3Report> {
    let p = &profile.params;
    let sample = |k: f64| -> Result<Vec<f64>> { Ok(WaveParams::new(p.period, p.delta, k)?.sample(n)?.into_samples()) };
    let central = |h: f64| -> Result<Vec<f64>> {
        let (plus, minus) = (sample(p.k + h)?, sample(p.k - h)?);
        Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    let (coarse, fine) = (central(1e-4)?, central(5e-5)?);
    let dk: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();

    let phi = p.sample(n)?;
    let dk = SpectralField::new(*phi.grid(), dk)?;
    let m_dk = dk.apply_multiplier(p.delta);
    let l_dk: Vec<f64> = (0..n).map(|j| m_dk.samples()[j] + (p.c - 2.0 * phi.samples()[j]) * dk.samples()[j]).collect();
    let l_dk = SpectralField::new(*phi.grid(), l_dk)?;

    let (dc, dn) = (p.dc_dk()?, p.dn_dk());
    let da = dn / p.period;
    let closed = -0.5 * dc * dn;
    let direct = l_dk.inner(&dk)?;
    let field_residual = (0..n).map(|j| (l_dk.samples()[j] + dc * phi.samples()[j] + da).abs()).fold(0.0, f64::max);
    Ok(P3Report { closed, direct, relative_gap: ((direct - closed) / closed).abs(), field_residual })
}

/// `M_k(u) = c'(k) E_0(u) + A'(k) E_{−1}(u)` with `E_0 = ½∫u²`, `E_{−1} = ∫u`.
pub fn compute_mk(field: &SpectralField, dc_dk: f64, da_dk: f64) -> f64 {
    let e0 = 0.5 * field.samples().iter().map(|v| v * v).sum::<f64>() * field.grid().spacing();
    dc_dk * e0 + da_dk * field.integral()
}

/// Full index computation for one wave.
#[derive(Debug, Clone)]
pub struct KreinReport {
    pub spectrum: SpectrumReport,
    pub i_direct: f64,
    pub i_closed: f64,
    pub d: [[f64; 2]; 2],
    pub d_closed: [[f64; 2]; 2],
    pub det_d_direct: f64,
    pub det_d_closed: f64,
    pub lphi_one_direct: f64,
    pub lphi_one_closed: f64,
    pub identity_residual: Option<f64>,
    pub p3: P3Report,
    pub n_l: usize,
    pub n_i: usize,
    pub n_d: usize,
    pub k_ham: Option<i64>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Spectrum, `I`, `D`, (P3) and the verdict from the direct route; closed forms
/// are reported alongside. At `c = 0` the verdict is `Inconclusive`.
pub fn krein_report(profile: &WaveProfile, n: usize, rel_tol: f64) -> Result<KreinReport> {
    let p = &profile.params;
    let spectrum = spectrum_report(profile, n, rel_tol)?;
    let inv = InverseData::new(profile, n)?;
    let closed = ClosedForms::new(p)?;
    let d = inv.d_matrix()?;
    let mut count = krein_verdict(&spectrum, inv.i, &d);
    let speed_zero = p.c.abs() < SPEED_ZERO_TOL;
    if speed_zero {
        count.reasons.push(format!("c = {:e} is zero; the closed forms divide by c", p.c));
        count.verdict = Verdict::Inconclusive;
    }
    Ok(KreinReport {
        i_direct: inv.i,
        i_closed: closed.i,
        d,
        d_closed: closed.d_matrix(),
        det_d_direct: det2(&d),
        det_d_closed: closed.det_d,
        lphi_one_direct: inv.lphi_one,
        lphi_one_closed: closed.lphi_one,
        identity_residual: (!speed_zero).then(|| inv.identity_residual(p.c)),
        p3: p3_check(profile, n)?,
        n_l: count.n_l,
        n_i: count.n_i,
        n_d: count.n_d,
        k_ham: count.k_ham,
        verdict: count.verdict,
        reasons: count.reasons,
        spectrum,
    })
}
