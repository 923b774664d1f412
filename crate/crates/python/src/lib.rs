//! Python module `ilw`: wave construction, stability pipeline and evolution.

use ilw_core::evolve::{stability_experiment, Perturbation, Scheme, SimConfig};
use ilw_core::fourier::symbol_ilw;
use ilw_core::krein::krein_report;
use ilw_core::linop::{pf2_check_wave, spectrum_report};
use ilw_core::wave::{self, WaveParams, WaveProfile};
use ilw_core::IlwError;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: IlwError) -> PyErr {
    match e {
        IlwError::Domain(_) | IlwError::Admissibility(_) | IlwError::Shape { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Upper end k1 of the admissible moduli.
#[pyfunction]
fn admissible_kmax(period: f64, delta: f64) -> PyResult<f64> {
    wave::admissible_kmax(period, delta).map_err(to_py)
}

/// Modulus k0 where the wave speed vanishes.
#[pyfunction]
fn speed_root_k0(period: f64, delta: f64) -> PyResult<f64> {
    wave::speed_root_k0(period, delta).map_err(to_py)
}

/// Wave speed c(k).
#[pyfunction]
fn wave_speed(period: f64, delta: f64, k: f64) -> PyResult<f64> {
    wave::wave_speed(period, delta, k).map_err(to_py)
}

/// Symbol theta_delta(n) of the multiplier M_delta.
#[pyfunction]
fn symbol(n: i64, period: f64, delta: f64) -> f64 {
    symbol_ilw(n, period, delta)
}

/// A periodic traveling wave phi_c of period L.
#[pyclass(frozen)]
struct Wave {
    params: WaveParams,
}

#[pymethods]
impl Wave {
    #[new]
    fn new(period: f64, delta: f64, k: f64) -> PyResult<Self> {
        Ok(Self { params: WaveParams::new(period, delta, k).map_err(to_py)? })
    }

    #[getter]
    fn period(&self) -> f64 {
        self.params.period
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.params.delta
    }

    #[getter]
    fn k(&self) -> f64 {
        self.params.k
    }

    #[getter]
    fn kmax(&self) -> f64 {
        self.params.kmax
    }

    #[getter]
    fn c(&self) -> f64 {
        self.params.c
    }

    /// Integration constant A = N(k)/L.
    #[getter]
    fn a_const(&self) -> f64 {
        self.params.a_const
    }

    /// Galilean shift a and the shifted speed sigma.
    #[getter]
    fn shift(&self) -> f64 {
        self.params.shift
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.params.sigma
    }

    /// Squared L2 norm N(k).
    #[getter]
    fn norm_sq(&self) -> f64 {
        self.params.norm_sq
    }

    fn dc_dk(&self) -> PyResult<f64> {
        self.params.dc_dk().map_err(to_py)
    }

    fn dn_dk(&self) -> f64 {
        self.params.dn_dk()
    }

    /// phi_c(x) from the elliptic formula.
    fn profile(&self, x: f64) -> f64 {
        self.params.profile_elliptic(x)
    }

    fn fourier_coefficient(&self, m: i64) -> f64 {
        self.params.fourier_coefficient(m)
    }

    /// Values on n equispaced nodes x_j = jL/n.
    fn sample(&self, n: usize) -> PyResult<Vec<f64>> {
        Ok(self.params.sample(n).map_err(to_py)?.into_samples())
    }

    /// Max-norm residual of the traveling-wave equation on n nodes.
    fn residual(&self, n: usize) -> PyResult<f64> {
        wave::residual_travkdv(&self.params, n).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let p = &self.params;
        format!("Wave(L={}, delta={}, k={}, c={})", p.period, p.delta, p.k, p.c)
    }
}

fn profile(wave: &Wave, n: usize) -> PyResult<WaveProfile> {
    WaveProfile::new(wave.params.clone(), n).map_err(to_py)
}

/// Eigenvalue counts and kernel diagnostics of L on n nodes.
#[pyfunction]
#[pyo3(signature = (wave, n=256, rel_tol=1e-8))]
fn spectrum<'py>(py: Python<'py>, wave: &Wave, n: usize, rel_tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let s = spectrum_report(&profile(wave, n)?, n, rel_tol).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("eigenvalues", s.eigenvalues)?;
    d.set_item("n_neg", s.n_neg)?;
    d.set_item("n_zero", s.n_zero)?;
    d.set_item("n_pos", s.n_pos)?;
    d.set_item("kernel_cosine", s.kernel_cosine)?;
    d.set_item("kernel_residual", s.kernel_residual)?;
    d.set_item("truncation_drift", s.truncation_drift)?;
    Ok(d)
}

/// Full index count and verdict.
#[pyfunction]
#[pyo3(signature = (wave, n=256, rel_tol=1e-8))]
fn stability<'py>(py: Python<'py>, wave: &Wave, n: usize, rel_tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = krein_report(&profile(wave, n)?, n, rel_tol).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("n_l", r.n_l)?;
    d.set_item("n_i", r.n_i)?;
    d.set_item("n_d", r.n_d)?;
    d.set_item("k_ham", r.k_ham)?;
    d.set_item("i_direct", r.i_direct)?;
    d.set_item("i_closed", r.i_closed)?;
    d.set_item("d", r.d.iter().map(|row| row.to_vec()).collect::<Vec<_>>())?;
    d.set_item("det_d_direct", r.det_d_direct)?;
    d.set_item("det_d_closed", r.det_d_closed)?;
    d.set_item("p3_direct", r.p3.direct)?;
    d.set_item("p3_closed", r.p3.closed)?;
    d.set_item("reasons", r.reasons)?;
    Ok(d)
}

/// Windowed PF(2) test of the shifted wave's Fourier coefficients.
#[pyfunction]
#[pyo3(signature = (wave, window=40))]
fn pf2<'py>(py: Python<'py>, wave: &Wave, window: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = pf2_check_wave(&wave.params, window).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("pass", r.pass)?;
    d.set_item("minors_tested", r.minors_tested)?;
    d.set_item("violations", r.violations)?;
    d.set_item("log_min_minor", r.log_min_minor)?;
    Ok(d)
}

/// Evolve phi_c + epsilon cos(2 pi m x / L) and report rho_W and the invariants.
#[pyfunction]
#[pyo3(signature = (wave, n=256, dt=1e-3, t_end=1.0, epsilon=0.0, mode=2, scheme="gauss", record_every=10))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    wave: &Wave,
    n: usize,
    dt: f64,
    t_end: f64,
    epsilon: f64,
    mode: u32,
    scheme: &str,
    record_every: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let prof = profile(wave, n)?;
    let mut cfg = SimConfig::new(*prof.grid(), wave.params.delta, dt, t_end).map_err(to_py)?;
    cfg.scheme = scheme.parse::<Scheme>().map_err(to_py)?;
    cfg.record_every = record_every;
    cfg.validate().map_err(to_py)?;
    let r =
        py.detach(|| stability_experiment(&prof, Perturbation { amplitude: epsilon, mode }, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", r.records.iter().map(|s| s.t).collect::<Vec<_>>())?;
    d.set_item("rho_w", r.records.iter().map(|s| s.rho_w.unwrap_or(f64::NAN)).collect::<Vec<_>>())?;
    d.set_item("e0", r.records.iter().map(|s| s.e0).collect::<Vec<_>>())?;
    d.set_item("e1", r.records.iter().map(|s| s.e1).collect::<Vec<_>>())?;
    d.set_item("mk", r.mk)?;
    d.set_item("sup_rho", r.sup_rho)?;
    d.set_item("drift_e0", r.drift_e0)?;
    d.set_item("drift_e1", r.drift_e1)?;
    d.set_item("drift_e_minus1", r.drift_e_minus1)?;
    d.set_item("drift_mk", r.drift_mk)?;
    d.set_item("final_field", r.records.last().map(|s| s.field.samples().to_vec()).unwrap_or_default())?;
    Ok(d)
}

#[pymodule]
fn ilw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Wave>()?;
    m.add_function(wrap_pyfunction!(admissible_kmax, m)?)?;
    m.add_function(wrap_pyfunction!(speed_root_k0, m)?)?;
    m.add_function(wrap_pyfunction!(wave_speed, m)?)?;
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(pf2, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
