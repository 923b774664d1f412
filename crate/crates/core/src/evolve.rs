//! Pseudospectral integration of `u_t = ∂ₓ(M_δu − u²)` with integrating-factor
//! RK4, the conserved quantities, and the distance to a wave's translation orbit.

use num_complex::Complex64;

use crate::error::{IlwError, Result};
use crate::fourier::{dealias, dft_in_place, inverse, symbol_ilw, transform, Grid, SpectralField};
use crate::krein::compute_mk;
use crate::wave::WaveProfile;

/// Nonlinear time-step bound `dt ≤ CFL / (max|u| N / L)`.
pub const CFL: f64 = 0.5;
/// More CFL substeps than this in one step is treated as blow-up.
pub const MAX_SUBSTEPS: usize = 100_000;
/// Golden-section tolerance in the shift variable.
pub const SHIFT_TOL: f64 = 1e-10;

/// Run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub grid: Grid,
    pub delta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    /// Switch the `u²` term off for linear diagnostics.
    pub nonlinear: bool,
    /// Record a snapshot every this many steps.
    pub record_every: usize,
    pub scheme: Scheme,
}

impl SimConfig {
    pub fn new(grid: Grid, delta: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            delta,
            dt,
            t_end,
            dealias: true,
            nonlinear: true,
            record_every: 1,
            scheme: Scheme::LawsonGauss4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(IlwError::Domain(format!("delta = {} must be positive", self.delta)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(IlwError::Domain(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(IlwError::Domain(format!("t_end = {} must be positive", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(IlwError::Domain("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Snapshot of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub field: SpectralField,
    pub e_minus1: f64,
    pub e0: f64,
    pub e1: f64,
    /// Distance to the reference orbit, when one is attached.
    pub rho_w: Option<f64>,
}

impl SimState {
    pub fn new(t: f64, field: SpectralField, delta: f64) -> Self {
        let (e_minus1, e0, e1) = conserved(&field, delta);
        Self { t, field, e_minus1, e0, e1, rho_w: None }
    }
}

/// `(E₋₁, E₀, E₁) = (∫u, ½∫u², ½∫(M_δu)u − ⅓∫u³)`.
pub fn conserved(u: &SpectralField, delta: f64) -> (f64, f64, f64) {
    let h = u.grid().spacing();
    let mu = u.apply_multiplier(delta);
    let s = u.samples();
    let e_minus1 = s.iter().sum::<f64>() * h;
    let e0 = 0.5 * s.iter().map(|v| v * v).sum::<f64>() * h;
    let quad: f64 = s.iter().zip(mu.samples()).map(|(a, b)| a * b).sum();
    let cubic: f64 = s.iter().map(|v| v * v * v).sum();
    (e_minus1, e0, (0.5 * quad - cubic / 3.0) * h)
}

/// Right-hand side `∂ₓ(M_δu − u²)` on the grid.
pub fn rhs(u: &SpectralField, delta: f64, dealias_product: bool) -> SpectralField {
    let g = *u.grid();
    let coeffs = u.coeffs();
    let sq = square_coeffs(&g, &coeffs, dealias_product);
    let out: Vec<Complex64> = (0..g.len())
        .map(|j| Complex64::new(0.0, g.wavenumber(j)) * (symbol_ilw(g.mode(j), g.period(), delta) * coeffs[j] - sq[j]))
        .collect();
    SpectralField::from_coeffs(g, &out).expect("grid-sized coefficients")
}

fn square_coeffs(g: &Grid, coeffs: &[Complex64], dealias_product: bool) -> Vec<Complex64> {
    let input = if dealias_product { dealias(g, coeffs.to_vec()) } else { coeffs.to_vec() };
    let samples = inverse(&input);
    let sq: Vec<f64> = samples.iter().map(|v| v * v).collect();
    let out = transform(&sq);
    if dealias_product {
        dealias(g, out)
    } else {
        out
    }
}

/// Time-stepping scheme; the linear part `Λ_n = iκ_nθ_δ(n)` is integrated exactly by all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Two-stage Gauss–Legendre on `e^{−Λt} û`. Conserves `E₀` and `E₋₁` to round-off.
    LawsonGauss4,
    /// Classical RK4 on `e^{−Λt} û`.
    IntegratingFactorRk4,
    /// Exponential time differencing RK4 (Cox–Matthews).
    EtdRk4,
}

impl std::str::FromStr for Scheme {
    type Err = IlwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" | "lawson-gauss4" => Ok(Scheme::LawsonGauss4),
            "ifrk4" => Ok(Scheme::IntegratingFactorRk4),
            "etdrk4" => Ok(Scheme::EtdRk4),
            other => Err(IlwError::Domain(format!("unknown scheme {other:?} (gauss, ifrk4, etdrk4)"))),
        }
    }
}

/// Cap on fixed-point sweeps for the implicit Gauss stages.
const GAUSS_MAX_SWEEPS: usize = 200;

/// `φ_1, φ_2, φ_3` at `z`, with `φ_k(z) = Σ_j z^j/(j+k)!`.
fn phi_functions(z: Complex64) -> [Complex64; 3] {
    if z.norm() < 1.0 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            for i in 1..=k + 1 {
                term /= i as f64;
            }
            let mut sum = term;
            for j in 1..30 {
                term *= z / (j + k + 1) as f64;
                sum += term;
            }
            *slot = sum;
        }
        out
    } else {
        let ez = z.exp();
        let p1 = (ez - 1.0) / z;
        let p2 = (ez - 1.0 - z) / (z * z);
        let p3 = (ez - 1.0 - z - z * z / 2.0) / (z * z * z);
        [p1, p2, p3]
    }
}

/// Per-step-size coefficient tables.
#[derive(Debug, Clone)]
struct Tables {
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// ETDRK4 weights.
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    /// `e^{Λ c_i h}` at the two Gauss nodes.
    nodes: [Vec<Complex64>; 2],
}

const GAUSS_R: f64 = 0.288_675_134_594_812_9; // √3/6
const GAUSS_C: [f64; 2] = [0.5 - GAUSS_R, 0.5 + GAUSS_R];
const GAUSS_A: [[f64; 2]; 2] = [[0.25, 0.25 - GAUSS_R], [0.25 + GAUSS_R, 0.25]];

impl Tables {
    fn new(lambda: &[Complex64], dt: f64, scheme: Scheme) -> Self {
        let expo = |s: f64| -> Vec<Complex64> { lambda.iter().map(|l| (l * (s * dt)).exp()).collect() };
        let (mut q, mut f1, mut f2, mut f3) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        if scheme == Scheme::EtdRk4 {
            for l in lambda {
                let z = l * dt;
                let [p1h, _, _] = phi_functions(0.5 * z);
                let [p1, p2, p3] = phi_functions(z);
                q.push(0.5 * dt * p1h);
                f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
                f2.push(dt * (p2 - 2.0 * p3));
                f3.push(dt * (4.0 * p3 - p2));
            }
        }
        let nodes = if scheme == Scheme::LawsonGauss4 {
            [expo(GAUSS_C[0]), expo(GAUSS_C[1])]
        } else {
            [Vec::new(), Vec::new()]
        };
        Self { dt, half: expo(0.5), full: expo(1.0), q, f1, f2, f3, nodes }
    }
}

#[derive(Debug, Clone)]
struct Stepper {
    grid: Grid,
    ikappa: Vec<Complex64>,
    lambda: Vec<Complex64>,
    dealias: bool,
    nonlinear: bool,
    scheme: Scheme,
    tables: Option<Tables>,
}

impl Stepper {
    fn new(cfg: &SimConfig) -> Self {
        let g = cfg.grid;
        let ikappa: Vec<Complex64> = (0..g.len()).map(|j| Complex64::new(0.0, g.wavenumber(j))).collect();
        let lambda = (0..g.len()).map(|j| ikappa[j] * symbol_ilw(g.mode(j), g.period(), cfg.delta)).collect();
        Self {
            grid: g,
            ikappa,
            lambda,
            dealias: cfg.dealias,
            nonlinear: cfg.nonlinear,
            scheme: cfg.scheme,
            tables: None,
        }
    }

    fn tables(&mut self, dt: f64) -> Tables {
        match &self.tables {
            Some(t) if t.dt == dt => t.clone(),
            _ => {
                let t = Tables::new(&self.lambda, dt, self.scheme);
                self.tables = Some(t.clone());
                t
            }
        }
    }

    /// `−iκ (u²)^`.
    fn nonlinear_term(&self, u: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); u.len()];
        }
        let sq = square_coeffs(&self.grid, u, self.dealias);
        sq.iter().zip(&self.ikappa).map(|(s, ik)| -ik * s).collect()
    }

    fn step(&mut self, u: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        let t = self.tables(dt);
        Ok(match self.scheme {
            Scheme::LawsonGauss4 => self.step_gauss(u, dt, &t)?,
            Scheme::IntegratingFactorRk4 => self.step_if(u, dt, &t),
            Scheme::EtdRk4 => self.step_etd(u, &t),
        })
    }

    fn step_if(&self, u: &[Complex64], dt: f64, t: &Tables) -> Vec<Complex64> {
        let (e, e2) = (&t.half, &t.full);
        let n = u.len();
        let scaled = |v: Vec<Complex64>| -> Vec<Complex64> { v.into_iter().map(|x| x * dt).collect() };
        let a = scaled(self.nonlinear_term(u));
        let ua: Vec<Complex64> = (0..n).map(|j| e[j] * (u[j] + 0.5 * a[j])).collect();
        let b = scaled(self.nonlinear_term(&ua));
        let ub: Vec<Complex64> = (0..n).map(|j| e[j] * u[j] + 0.5 * b[j]).collect();
        let c = scaled(self.nonlinear_term(&ub));
        let uc: Vec<Complex64> = (0..n).map(|j| e2[j] * u[j] + e[j] * c[j]).collect();
        let d = scaled(self.nonlinear_term(&uc));
        (0..n).map(|j| e2[j] * u[j] + (e2[j] * a[j] + 2.0 * e[j] * (b[j] + c[j]) + d[j]) / 6.0).collect()
    }

    fn step_etd(&self, u: &[Complex64], t: &Tables) -> Vec<Complex64> {
        let n = u.len();
        let nu = self.nonlinear_term(u);
        let a: Vec<Complex64> = (0..n).map(|j| t.half[j] * u[j] + t.q[j] * nu[j]).collect();
        let na = self.nonlinear_term(&a);
        let b: Vec<Complex64> = (0..n).map(|j| t.half[j] * u[j] + t.q[j] * na[j]).collect();
        let nb = self.nonlinear_term(&b);
        let c: Vec<Complex64> = (0..n).map(|j| t.half[j] * a[j] + t.q[j] * (2.0 * nb[j] - nu[j])).collect();
        let nc = self.nonlinear_term(&c);
        (0..n).map(|j| t.full[j] * u[j] + t.f1[j] * nu[j] + 2.0 * t.f2[j] * (na[j] + nb[j]) + t.f3[j] * nc[j]).collect()
    }

    /// Stage slopes `K_i = e^{−Λc_ih} N(e^{Λc_ih} V_i)`, solved by fixed-point sweeps.
    fn step_gauss(&self, u: &[Complex64], dt: f64, t: &Tables) -> Result<Vec<Complex64>> {
        let n = u.len();
        let slope = |i: usize, v: &[Complex64]| -> Vec<Complex64> {
            let e = &t.nodes[i];
            let w: Vec<Complex64> = (0..n).map(|j| e[j] * v[j]).collect();
            let nw = self.nonlinear_term(&w);
            (0..n).map(|j| nw[j] / e[j]).collect()
        };
        let scale = u.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
        let mut k = [slope(0, u), slope(1, u)];
        let mut converged = false;
        for _ in 0..GAUSS_MAX_SWEEPS {
            let stage = |i: usize| -> Vec<Complex64> {
                (0..n).map(|j| u[j] + dt * (GAUSS_A[i][0] * k[0][j] + GAUSS_A[i][1] * k[1][j])).collect()
            };
            let next = [slope(0, &stage(0)), slope(1, &stage(1))];
            let change = next
                .iter()
                .zip(&k)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
                .fold(0.0f64, f64::max);
            k = next;
            if !change.is_finite() {
                break;
            }
            if dt * change <= 1e-15 * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(IlwError::Numerical(format!(
                "Gauss stage iteration did not converge in {GAUSS_MAX_SWEEPS} sweeps (dt = {dt:e})"
            )));
        }
        Ok((0..n).map(|j| t.full[j] * (u[j] + 0.5 * dt * (k[0][j] + k[1][j]))).collect())
    }
}

fn cfl_substeps(grid: &Grid, max_abs: f64, dt: f64) -> usize {
    let bound = CFL / (max_abs * grid.len() as f64 / grid.period());
    if !bound.is_finite() || dt <= bound {
        1
    } else {
        (dt / bound).ceil().min(usize::MAX as f64) as usize
    }
}

/// A running simulation; on error the last good state is kept.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    stepper: Stepper,
    state: SimState,
    coeffs: Vec<Complex64>,
    reference: Option<WaveProfile>,
    steps: usize,
}

impl Simulation {
    pub fn new(initial: SpectralField, config: SimConfig, reference: Option<WaveProfile>) -> Result<Self> {
        config.validate()?;
        if *initial.grid() != config.grid {
            return Err(IlwError::Shape { expected: config.grid.len(), got: initial.grid().len() });
        }
        let coeffs = initial.coeffs();
        let mut sim = Self {
            stepper: Stepper::new(&config),
            state: SimState::new(0.0, initial, config.delta),
            config,
            coeffs,
            reference,
            steps: 0,
        };
        sim.state.rho_w = sim.rho()?;
        Ok(sim)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn rho(&self) -> Result<Option<f64>> {
        match &self.reference {
            Some(r) => Ok(Some(orbit_distance(&self.state.field, r)?.1)),
            None => Ok(None),
        }
    }

    /// Advance by `dt` (clipped at `t_end`), splitting to respect the CFL bound.
    pub fn advance(&mut self) -> Result<()> {
        let dt = self.config.dt.min(self.config.t_end - self.state.t);
        if dt <= 0.0 {
            return Ok(());
        }
        let subs = cfl_substeps(&self.config.grid, self.state.field.max_abs(), dt);
        if subs > MAX_SUBSTEPS {
            return Err(IlwError::BlowUp { t: self.state.t });
        }
        let h = dt / subs as f64;
        let mut u = self.coeffs.clone();
        for _ in 0..subs {
            u = match self.stepper.step(&u, h) {
                Ok(next) => next,
                Err(_) => return Err(IlwError::BlowUp { t: self.state.t }),
            };
        }
        let t = self.state.t + dt;
        if u.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(IlwError::BlowUp { t });
        }
        let field = SpectralField::from_coeffs(self.config.grid, &u)?;
        if !field.samples().iter().all(|v| v.is_finite()) {
            return Err(IlwError::BlowUp { t });
        }
        self.coeffs = u;
        self.state = SimState::new(t, field, self.config.delta);
        self.steps += 1;
        Ok(())
    }

    pub fn finished(&self) -> bool {
        self.config.t_end - self.state.t <= 1e-12 * self.config.t_end
    }

    /// Run to `t_end`, returning the initial state and every `record_every`-th one
    /// (and the last).
    pub fn run(&mut self) -> Result<Vec<SimState>> {
        let mut out = vec![self.state.clone()];
        while !self.finished() {
            self.advance()?;
            if self.steps.is_multiple_of(self.config.record_every) || self.finished() {
                self.state.rho_w = self.rho()?;
                out.push(self.state.clone());
            }
        }
        Ok(out)
    }
}

/// One step of size `config.dt` from `state`.
pub fn step(state: &SimState, config: &SimConfig) -> Result<SimState> {
    let mut cfg = *config;
    cfg.t_end = state.t + config.dt;
    let mut sim = Simulation::new(state.field.clone(), cfg, None)?;
    sim.state.t = state.t;
    sim.advance()?;
    Ok(sim.state)
}

/// Translation `r* ∈ [0, L)` minimizing `‖u(·+r) − φ‖_W`, and that minimum.
pub fn orbit_distance(u: &SpectralField, reference: &WaveProfile) -> Result<(f64, f64)> {
    let g = *u.grid();
    if g != *reference.grid() {
        return Err(IlwError::Shape { expected: reference.grid().len(), got: g.len() });
    }
    let delta = reference.params.delta;
    let n = g.len();
    let uc = u.coeffs();
    let pc = reference.field.coeffs();
    let weight: Vec<f64> = (0..n).map(|j| 1.0 + symbol_ilw(g.mode(j), g.period(), delta)).collect();

    // coarse scan over grid shifts r_m = mL/N: cross term Σ w û conj(φ̂) e^{2πi n m/N}
    let mut cross: Vec<Complex64> = (0..n).map(|j| weight[j] * uc[j] * pc[j].conj()).collect();
    dft_in_place(&mut cross, false);
    let best = (0..n).max_by(|&a, &b| cross[a].re.total_cmp(&cross[b].re).then(b.cmp(&a))).unwrap_or(0);

    let dist2 = |r: f64| -> f64 {
        (0..n)
            .map(|j| {
                let arg = 2.0 * std::f64::consts::PI * g.mode(j) as f64 * r / g.period();
                let phase = if j == n / 2 { Complex64::new(arg.cos(), 0.0) } else { Complex64::from_polar(1.0, arg) };
                weight[j] * (uc[j] * phase - pc[j]).norm_sqr()
            })
            .sum()
    };
    let h = g.spacing();
    let centre = best as f64 * h;
    let (r, d2) = golden_section(&dist2, centre - h, centre + h, SHIFT_TOL);
    let (r, d2) = if dist2(centre) <= d2 { (centre, dist2(centre)) } else { (r, d2) };
    let r_star = r.rem_euclid(g.period());
    let r_star = if g.period() - r_star < SHIFT_TOL { 0.0 } else { r_star };
    Ok((r_star, d2.max(0.0).sqrt()))
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Mean-zero cosine perturbation `ε cos(2π m x / L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub mode: u32,
}

impl Perturbation {
    pub fn field(&self, grid: &Grid) -> SpectralField {
        let w = 2.0 * std::f64::consts::PI * self.mode as f64 / grid.period();
        grid.sample(|x| self.amplitude * (w * x).cos()).mean_free()
    }
}

/// Time series and drift summary of a perturbed-wave run.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub records: Vec<SimState>,
    pub mk: Vec<f64>,
    pub sup_rho: f64,
    /// Max relative drifts of `E₀`, `E₁`, `M_k` and absolute drift of `E₋₁`.
    pub drift_e0: f64,
    pub drift_e1: f64,
    pub drift_e_minus1: f64,
    pub drift_mk: f64,
}

/// Evolve `φ + perturbation` and track the distance to the wave's orbit.
pub fn stability_experiment(
    profile: &WaveProfile,
    perturbation: Perturbation,
    config: &SimConfig,
) -> Result<StabilityReport> {
    let p = &profile.params;
    let u0 = profile.field.axpy(1.0, &perturbation.field(profile.grid()))?;
    let mut sim = Simulation::new(u0, *config, Some(profile.clone()))?;
    let records = sim.run()?;
    let (dc, da) = (p.dc_dk()?, p.da_dk());
    let mk: Vec<f64> = records.iter().map(|s| compute_mk(&s.field, dc, da)).collect();
    let first = &records[0];
    let rel = |now: f64, then: f64| (now - then).abs() / then.abs().max(f64::MIN_POSITIVE);
    let fold = |f: &dyn Fn(&SimState) -> f64| records.iter().map(f).fold(0.0, f64::max);
    Ok(StabilityReport {
        sup_rho: fold(&|s| s.rho_w.unwrap_or(0.0)),
        drift_e0: fold(&|s| rel(s.e0, first.e0)),
        drift_e1: fold(&|s| rel(s.e1, first.e1)),
        drift_e_minus1: fold(&|s| (s.e_minus1 - first.e_minus1).abs()),
        drift_mk: mk.iter().map(|m| rel(*m, mk[0])).fold(0.0, f64::max),
        mk,
        records,
    })
}

/// Max-norm gap between the evolved wave and the exact translate `φ(x − cT)`.
pub fn propagation_error(profile: &WaveProfile, scheme: Scheme, dt: f64, t_end: f64) -> Result<f64> {
    let mut cfg = SimConfig::new(*profile.grid(), profile.params.delta, dt, t_end)?;
    cfg.scheme = scheme;
    let mut sim = Simulation::new(profile.field.clone(), cfg, None)?;
    while !sim.finished() {
        sim.advance()?;
    }
    let exact = profile.params.sample(profile.grid().len())?.translate(-profile.params.c * sim.state().t);
    Ok(sim.state().field.samples().iter().zip(exact.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
