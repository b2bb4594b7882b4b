//! Python bindings: configs, presets, drift matrices, spectra and the
//! verification checks.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use omnr_core::cli::presets::{self, PresetName};
use omnr_core::dynamics::{build_bare, build_supermode, check_stability, Basis, DriftSystem};
use omnr_core::params::{self, GlMode, PhysicalConfig};
use omnr_core::spectra::{self, Decomposition, InputSpectra, SpectraPoint, SweepOptions};
use omnr_core::{verify, Error};

create_exception!(omnr, OmnrError, PyException);
create_exception!(omnr, UnstableError, OmnrError);
create_exception!(omnr, NumericalError, OmnrError);

fn to_py(e: Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    match e {
        Error::InvalidParameter { .. }
        | Error::UnknownKey { .. }
        | Error::Parse { .. }
        | Error::MissingKey(_)
        | Error::Precondition(_) => PyValueError::new_err(msg),
        Error::Unstable { .. } => UnstableError::new_err(msg),
        Error::Io(_) => OmnrError::new_err(msg),
        _ => NumericalError::new_err(msg),
    }
}

/// Physical parameters in units of `kappa_0`.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: PhysicalConfig,
}

#[pymethods]
impl PyConfig {
    /// `g_l=None` derives the counter-propagating coupling from backscattering.
    #[new]
    #[pyo3(signature = (
        omega_m, kappa_ex, j_s, j_m, gamma_0, gamma_in, g_r,
        kappa_0=1.0, delta_0=None, g_l=None, n_th=1e5, two_resonators=true
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        omega_m: f64,
        kappa_ex: f64,
        j_s: f64,
        j_m: f64,
        gamma_0: f64,
        gamma_in: f64,
        g_r: Complex64,
        kappa_0: f64,
        delta_0: Option<f64>,
        g_l: Option<Complex64>,
        n_th: f64,
        two_resonators: bool,
    ) -> PyResult<Self> {
        let inner = PhysicalConfig {
            omega_m,
            kappa_0,
            kappa_ex,
            delta_0: delta_0.unwrap_or(omega_m),
            j_s,
            j_m,
            gamma_0,
            gamma_in,
            g_r,
            g_l_mode: g_l.map_or(GlMode::Derived, GlMode::Explicit),
            n_th,
            two_resonators,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyConfig { inner })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        presets::by_name(name)
            .map(|p| PyConfig { inner: p.config })
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset `{name}`")))
    }

    /// Parses the `key = value` format used by `omnr --config`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        PhysicalConfig::parse(text).map(|inner| PyConfig { inner }).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_kv_string()
    }

    /// Copy with some fields replaced, e.g. `cfg.replace(j_s=0.45)`.
    #[pyo3(signature = (**kwargs))]
    fn replace(&self, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut c = self.inner;
        if let Some(kw) = kwargs {
            for (k, v) in kw.iter() {
                let key: String = k.extract()?;
                match key.as_str() {
                    "omega_m" => c.omega_m = v.extract()?,
                    "kappa_0" => c.kappa_0 = v.extract()?,
                    "kappa_ex" => c.kappa_ex = v.extract()?,
                    "delta_0" => c.delta_0 = v.extract()?,
                    "j_s" => c.j_s = v.extract()?,
                    "j_m" => c.j_m = v.extract()?,
                    "gamma_0" => c.gamma_0 = v.extract()?,
                    "gamma_in" => c.gamma_in = v.extract()?,
                    "g_r" => c.g_r = v.extract()?,
                    "g_l" => {
                        let g: Option<Complex64> = v.extract()?;
                        c.g_l_mode = g.map_or(GlMode::Derived, GlMode::Explicit);
                    }
                    "n_th" => c.n_th = v.extract()?,
                    "two_resonators" => c.two_resonators = v.extract()?,
                    other => return Err(PyValueError::new_err(format!("unknown field `{other}`"))),
                }
            }
        }
        c.validate().map_err(to_py)?;
        Ok(PyConfig { inner: c })
    }

    #[getter]
    fn omega_m(&self) -> f64 {
        self.inner.omega_m
    }
    #[getter]
    fn kappa_0(&self) -> f64 {
        self.inner.kappa_0
    }
    #[getter]
    fn kappa_ex(&self) -> f64 {
        self.inner.kappa_ex
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }
    #[getter]
    fn delta_0(&self) -> f64 {
        self.inner.delta_0
    }
    #[getter]
    fn j_s(&self) -> f64 {
        self.inner.j_s
    }
    #[getter]
    fn j_m(&self) -> f64 {
        self.inner.j_m
    }
    #[getter]
    fn gamma_0(&self) -> f64 {
        self.inner.gamma_0
    }
    #[getter]
    fn gamma_in(&self) -> f64 {
        self.inner.gamma_in
    }
    #[getter]
    fn gamma_m(&self) -> f64 {
        self.inner.gamma_m()
    }
    #[getter]
    fn g_r(&self) -> Complex64 {
        self.inner.g_r
    }
    /// Effective `G_L`, derived or explicit.
    #[getter]
    fn g_l(&self) -> Complex64 {
        self.inner.g_l()
    }
    #[getter]
    fn g_l_derived(&self) -> bool {
        self.inner.g_l_mode == GlMode::Derived
    }
    #[getter]
    fn n_th(&self) -> f64 {
        self.inner.n_th
    }
    #[getter]
    fn two_resonators(&self) -> bool {
        self.inner.two_resonators
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "Config(omega_m={}, kappa_ex={}, j_s={}, j_m={}, gamma_0={}, gamma_in={}, g_r={}, n_th={}, two_resonators={})",
            c.omega_m,
            c.kappa_ex,
            c.j_s,
            c.j_m,
            c.gamma_0,
            c.gamma_in,
            params::format_complex(c.g_r),
            c.n_th,
            if c.two_resonators { "True" } else { "False" }
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn basis(name: &str) -> PyResult<Basis> {
    match name {
        "bare" => Ok(Basis::Bare),
        "supermode" => Ok(Basis::Supermode),
        _ => Err(PyValueError::new_err(format!("basis must be `bare` or `supermode`, got `{name}`"))),
    }
}

fn system(cfg: &PyConfig, name: &str) -> PyResult<DriftSystem> {
    match basis(name)? {
        Basis::Bare => build_bare(&cfg.inner),
        Basis::Supermode => build_supermode(&cfg.inner),
    }
    .map_err(to_py)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    PresetName::ALL.iter().map(|p| p.name()).collect()
}

/// `G_L` induced by backscattering from `G_R`.
#[pyfunction]
fn derive_g_l(cfg: &PyConfig) -> Complex64 {
    params::derive_g_l(&cfg.inner)
}

/// Bose-Einstein occupation for an angular frequency in rad/s and a temperature in K.
#[pyfunction]
fn thermal_occupation(omega_m_si: f64, temperature: f64) -> PyResult<f64> {
    params::thermal_occupation(omega_m_si, temperature).map_err(to_py)
}

#[pyfunction]
fn isolation_db(t_r: f64, t_l: f64) -> f64 {
    spectra::isolation_db(t_r, t_l)
}

/// Drift matrix `M` as nested lists of complex numbers.
#[pyfunction]
#[pyo3(signature = (cfg, basis="bare"))]
fn drift_matrix(cfg: &PyConfig, basis: &str) -> PyResult<Vec<Vec<Complex64>>> {
    let m = system(cfg, basis)?.m;
    Ok((0..8).map(|i| (0..8).map(|j| m[(i, j)]).collect()).collect())
}

#[pyfunction]
#[pyo3(signature = (cfg, basis="bare"))]
fn stability<'py>(py: Python<'py>, cfg: &PyConfig, basis: &str) -> PyResult<Bound<'py, PyDict>> {
    let r = check_stability(&system(cfg, basis)?).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("stable", r.stable)?;
    d.set_item("min_real_part", r.min_real_part)?;
    d.set_item("eigenvalues", r.eigenvalues)?;
    Ok(d)
}

fn decomposition(p: &SpectraPoint) -> (&'static str, &'static str, f64, f64) {
    match p.decomposition {
        Decomposition::Paths { s1, s2 } => ("S1", "S2", s1, s2),
        Decomposition::Supermodes { s_plus, s_minus } => ("S_plus", "S_minus", s_plus, s_minus),
    }
}

fn point_dict<'py>(py: Python<'py>, p: &SpectraPoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let (k1, k2, d1, d2) = decomposition(p);
    for (k, v) in [
        ("omega", p.omega),
        ("T_R", p.t_r),
        ("T_L", p.t_l),
        ("R_R", p.r_r),
        ("R_L", p.r_l),
        ("S_R_th", p.s_r_th),
        ("S_L_th", p.s_l_th),
        (k1, d1),
        (k2, d2),
        ("S_R_vac", p.s_r_vac),
        ("S_L_vac", p.s_l_vac),
        ("S_R_out", p.s_r_out),
        ("S_L_out", p.s_l_out),
        ("isolation_db", p.isolation_db),
    ] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// All spectra at one frequency.
#[pyfunction]
#[pyo3(signature = (cfg, omega, basis="bare", s_r_in=0.0, s_l_in=0.0))]
fn spectra_at<'py>(
    py: Python<'py>,
    cfg: &PyConfig,
    omega: f64,
    basis: &str,
    s_r_in: f64,
    s_l_in: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = system(cfg, basis)?;
    let p = spectra::spectra_at(&sys, &cfg.inner, omega, InputSpectra { s_r_in, s_l_in }).map_err(to_py)?;
    point_dict(py, &p)
}

/// Sweep over `omegas`; returns a dict of equally long lists plus `basis`
/// and `unstable`.
#[pyfunction]
#[pyo3(signature = (cfg, omegas, basis="bare", allow_unstable=false, s_r_in=0.0, s_l_in=0.0))]
fn sweep<'py>(
    py: Python<'py>,
    cfg: &PyConfig,
    omegas: Vec<f64>,
    basis: &str,
    allow_unstable: bool,
    s_r_in: f64,
    s_l_in: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = system(cfg, basis)?;
    let opts = SweepOptions {
        allow_unstable,
        inputs: InputSpectra { s_r_in, s_l_in },
    };
    let b = py
        .detach(|| spectra::sweep(&sys, &cfg.inner, &omegas, opts))
        .map_err(to_py)?;
    let col = |f: &dyn Fn(&SpectraPoint) -> f64| b.points.iter().map(f).collect::<Vec<f64>>();
    let (k1, k2) = match b.basis {
        Basis::Bare => ("S1", "S2"),
        Basis::Supermode => ("S_plus", "S_minus"),
    };
    let d = PyDict::new(py);
    d.set_item("basis", b.basis.name())?;
    d.set_item("unstable", b.unstable)?;
    d.set_item("omega", col(&|p| p.omega))?;
    d.set_item("T_R", col(&|p| p.t_r))?;
    d.set_item("T_L", col(&|p| p.t_l))?;
    d.set_item("R_R", col(&|p| p.r_r))?;
    d.set_item("R_L", col(&|p| p.r_l))?;
    d.set_item("S_R_th", col(&|p| p.s_r_th))?;
    d.set_item("S_L_th", col(&|p| p.s_l_th))?;
    d.set_item(k1, col(&|p| decomposition(p).2))?;
    d.set_item(k2, col(&|p| decomposition(p).3))?;
    d.set_item("S_R_vac", col(&|p| p.s_r_vac))?;
    d.set_item("S_L_vac", col(&|p| p.s_l_vac))?;
    d.set_item("S_R_out", col(&|p| p.s_r_out))?;
    d.set_item("S_L_out", col(&|p| p.s_l_out))?;
    d.set_item("isolation_db", col(&|p| p.isolation_db))?;
    Ok(d)
}

/// Steady-state covariance from the Lyapunov equation; `occupations[k]` is
/// `<V_k^dag V_k>` for the four annihilation modes.
#[pyfunction]
#[pyo3(signature = (cfg, basis="bare"))]
fn lyapunov_covariance<'py>(py: Python<'py>, cfg: &PyConfig, basis: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = verify::lyapunov_covariance(&system(cfg, basis)?).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

/// Frequency-integrated spectra against the Lyapunov diagonal.
#[pyfunction]
#[pyo3(signature = (cfg, basis="bare"))]
fn parseval_check<'py>(py: Python<'py>, cfg: &PyConfig, basis: &str) -> PyResult<Bound<'py, PyAny>> {
    let sys = system(cfg, basis)?;
    let r = py.detach(|| verify::parseval_default(&sys)).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
fn limit_check_single_mode<'py>(py: Python<'py>, cfg: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let r = verify::limit_check_single_mode(&cfg.inner).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
fn basis_consistency<'py>(py: Python<'py>, cfg: &PyConfig) -> PyResult<Bound<'py, PyAny>> {
    let r = verify::basis_consistency(&cfg.inner).map_err(to_py)?;
    json_to_py(py, &r.to_json())
}

#[pymodule]
fn omnr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("OmnrError", py.get_type::<OmnrError>())?;
    m.add("UnstableError", py.get_type::<UnstableError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(derive_g_l, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_occupation, m)?)?;
    m.add_function(wrap_pyfunction!(isolation_db, m)?)?;
    m.add_function(wrap_pyfunction!(drift_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(spectra_at, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(parseval_check, m)?)?;
    m.add_function(wrap_pyfunction!(limit_check_single_mode, m)?)?;
    m.add_function(wrap_pyfunction!(basis_consistency, m)?)?;
    Ok(())
}
