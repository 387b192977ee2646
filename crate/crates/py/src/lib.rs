use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hardy_core::construct::{self as construct, HardyPair};
use hardy_core::decay::{self as decay, consistency_matrix};
use hardy_core::fields::{parse_expr, DomainSpec, ProblemSpec, RadialProfile};
use hardy_core::quad::{weighted_mass, IntegralVerdict};
use hardy_core::rayleigh::{self as rayleigh, RayleighError};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solver_error(e: RayleighError) -> PyErr {
    match e {
        RayleighError::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        other => value_error(other),
    }
}

/// A closed-form radial function on `(r_min, r_max)`.
#[pyclass(name = "Profile", module = "hardy", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProfile {
    inner: RadialProfile,
}

#[pymethods]
impl PyProfile {
    #[new]
    #[pyo3(signature = (expr, r_min = 0.0, r_max = f64::INFINITY))]
    fn new(expr: &str, r_min: f64, r_max: f64) -> PyResult<Self> {
        let form = parse_expr(expr).map_err(value_error)?;
        Ok(PyProfile { inner: RadialProfile::new(form, r_min, r_max).map_err(value_error)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyProfile { inner: RadialProfile::from_json(text).map_err(value_error)? })
    }

    fn __call__(&self, r: f64) -> PyResult<f64> {
        self.inner.eval(r).map_err(value_error)
    }

    fn slope(&self, r: f64) -> f64 {
        self.inner.slope(r)
    }

    #[getter]
    fn r_min(&self) -> f64 {
        self.inner.r_min()
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.inner.r_max()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Profile({}, r_min={}, r_max={})", self.inner, self.inner.r_min(), self.inner.r_max())
    }
}

fn verdict_dict<'py>(py: Python<'py>, v: &IntegralVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("kind", v.kind())?;
    match v {
        IntegralVerdict::Convergent { value, error_bound } => {
            d.set_item("value", value)?;
            d.set_item("error_bound", error_bound)?;
        }
        IntegralVerdict::Divergent { rate } => {
            d.set_item("rate", serde_json::to_string(rate).map_err(value_error)?)?;
        }
        IntegralVerdict::Inconclusive { partials } => d.set_item("partials", partials.clone())?,
    }
    Ok(d)
}

/// A Hardy-weight paired with its reference function.
#[pyclass(name = "Pair", module = "hardy", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPair {
    inner: HardyPair,
}

#[pymethods]
impl PyPair {
    /// The catalogue entry with this id.
    #[staticmethod]
    fn catalogue(id: &str) -> PyResult<Self> {
        construct::catalogue_entry(id)
            .map(|inner| PyPair { inner })
            .ok_or_else(|| PyKeyError::new_err(id.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPair { inner: serde_json::from_str(text).map_err(value_error)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn role(&self) -> &'static str {
        self.inner.role.as_str()
    }

    #[getter]
    fn expected(&self) -> Option<&'static str> {
        self.inner.expected.map(|e| e.as_str())
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.problem.p
    }

    #[getter]
    fn dimension(&self) -> u32 {
        self.inner.problem.domain.dimension()
    }

    #[getter]
    fn hardy_constant(&self) -> f64 {
        self.inner.hardy_constant
    }

    #[getter]
    fn weight(&self) -> PyProfile {
        PyProfile { inner: self.inner.weight.clone() }
    }

    #[getter]
    fn reference(&self) -> PyProfile {
        PyProfile { inner: self.inner.reference.clone() }
    }

    fn with_scaled_weight(&self, c: f64) -> PyResult<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(PyValueError::new_err("scale must be positive"));
        }
        Ok(PyPair { inner: self.inner.with_scaled_weight(c) })
    }

    /// Tail verdict of `∫ W φ^p` beyond `rho` (the pair's own by default).
    #[pyo3(signature = (rho = None))]
    fn weighted_mass<'py>(&self, py: Python<'py>, rho: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let rho = rho.unwrap_or(self.inner.rho);
        let verdict = py.detach(|| weighted_mass(&self.inner, rho)).map_err(value_error)?;
        verdict_dict(py, &verdict)
    }

    /// Discrete best constant of the shape `W/C` on a support of log-width `width`.
    #[pyo3(signature = (width, n, rho = None))]
    fn best_constant(&self, py: Python<'_>, width: f64, n: usize, rho: Option<f64>) -> PyResult<f64> {
        let settings = decay::probe_settings(&self.inner, width, n)
            .ok_or_else(|| PyValueError::new_err("pair has no supported tail"))?;
        let rho = rho.unwrap_or(self.inner.rho);
        let pair = &self.inner;
        py.detach(|| {
            let mesh = settings.mesh(&pair.problem, rho)?;
            rayleigh::best_constant_with(&pair.problem, &pair.shape(), &mesh, &settings.options)
        })
        .map(|r| r.lambda_h)
        .map_err(solver_error)
    }

    /// `(rho, λ_h)` for best constants of `W` beyond each radius.
    #[pyo3(signature = (rhos, width = 200.0, n = 8192))]
    fn lambda_infinity(&self, py: Python<'_>, rhos: Vec<f64>, width: f64, n: usize) -> PyResult<Vec<(f64, f64)>> {
        let settings = decay::probe_settings(&self.inner, width, n)
            .ok_or_else(|| PyValueError::new_err("pair has no supported tail"))?;
        let pair = &self.inner;
        let points = py
            .detach(|| rayleigh::lambda_infinity_probe(&pair.problem, &pair.weight, &rhos, &settings))
            .map_err(solver_error)?;
        Ok(points.into_iter().map(|p| (p.rho, p.lambda_h)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Pair({}, role={}, N={}, p={})", self.inner.label, self.role(), self.dimension(), self.p())
    }
}

#[pyfunction]
fn catalogue_ids() -> Vec<String> {
    construct::catalogue_ids()
}

#[pyfunction]
fn alpha_exponent(lambda: f64, p: f64) -> PyResult<f64> {
    rayleigh::alpha_exponent(lambda, p).map_err(value_error)
}

/// `Q[φ_n]` of the logarithmic cut-off with log-width `width` in `ℝ^N`, `p = N`.
#[pyfunction]
#[pyo3(signature = (n, width, plateau = std::f64::consts::E))]
fn null_sequence_q(n: u32, width: f64, plateau: f64) -> PyResult<f64> {
    let problem = ProblemSpec::laplacian(n as f64, DomainSpec::PuncturedSpace { n }).map_err(value_error)?;
    rayleigh::null_sequence_q(&problem, &rayleigh::NullSequenceSpec { plateau, width }).map_err(value_error)
}

/// Newtonian potential of a radial density supported in `[0, radius]`.
#[pyfunction]
fn green_potential(density: &str, n: u32, radius: f64, r: f64) -> PyResult<f64> {
    let rho = RadialProfile::new(parse_expr(density).map_err(value_error)?, 0.0, radius).map_err(value_error)?;
    let g = construct::green_potential_radial(&rho, n).map_err(value_error)?;
    g.value(r).map_err(value_error)
}

/// `(v1, v, W)` for a profile with limits `gamma1` at `r_min` and `gamma2` at infinity.
#[pyfunction]
#[pyo3(signature = (g, p, gamma1, gamma2 = f64::INFINITY))]
fn construct_weight(g: &PyProfile, p: f64, gamma1: f64, gamma2: f64) -> PyResult<(PyProfile, PyProfile, PyProfile)> {
    let spec = construct::HarmonicProfileSpec::new(g.inner.clone(), gamma1, gamma2).map_err(value_error)?;
    let s = if gamma1.is_infinite() || gamma2.is_infinite() {
        construct::supersolution_weight_infinite(&spec, p)
    } else {
        construct::supersolution_weight_finite(&spec, p)
    }
    .map_err(value_error)?;
    Ok((PyProfile { inner: s.v1 }, PyProfile { inner: s.v }, PyProfile { inner: s.weight }))
}

/// The full verdict table as CSV.
#[pyfunction]
fn consistency_matrix_csv(py: Python<'_>) -> String {
    py.detach(|| consistency_matrix().to_csv())
}

#[pymodule]
fn hardy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_class::<PyPair>()?;
    m.add_function(wrap_pyfunction!(catalogue_ids, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(null_sequence_q, m)?)?;
    m.add_function(wrap_pyfunction!(green_potential, m)?)?;
    m.add_function(wrap_pyfunction!(construct_weight, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_matrix_csv, m)?)?;
    Ok(())
}
