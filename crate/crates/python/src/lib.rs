//! Python bindings for `dnls-core`.

use dnls_core::cole_hopf::{self, GaugeState};
use dnls_core::dynamics::{self, Trajectory as CoreTrajectory};
use dnls_core::spectral::{self, FLParams, Representation};
use dnls_core::{blowup, invariants, normal_form, Error};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

create_exception!(dnls, DnlsError, PyRuntimeError);
create_exception!(dnls, GaugeSingularError, DnlsError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_) | Error::IndexOutOfRange { .. } | Error::ZeroFrequency => {
            PyValueError::new_err(err.to_string())
        }
        Error::GaugeSingular { .. } => GaugeSingularError::new_err(err.to_string()),
        _ => DnlsError::new_err(err.to_string()),
    }
}

fn params(s: f64, p: f64) -> PyResult<FLParams> {
    FLParams::new(s, p).map_err(to_py)
}

fn parse_repr(name: &str) -> PyResult<Representation> {
    match name {
        "physical" => Ok(Representation::Physical),
        "interaction" => Ok(Representation::Interaction),
        other => Err(PyValueError::new_err(format!("unknown representation `{other}`"))),
    }
}

/// Serializes through JSON so reports arrive as plain dicts.
fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| DnlsError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Fourier coefficients on `1 <= |k| <= K`.
#[pyclass(name = "SpectralState", module = "dnls", from_py_object)]
#[derive(Clone)]
struct PySpectralState {
    inner: spectral::SpectralState,
}

#[pymethods]
impl PySpectralState {
    #[new]
    #[pyo3(signature = (modes, k_max, time = 0.0, representation = "physical"))]
    fn new(modes: Vec<(i64, Complex64)>, k_max: usize, time: f64, representation: &str) -> PyResult<Self> {
        let inner =
            spectral::SpectralState::from_modes(modes, k_max, time, parse_repr(representation)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (k_max, time = 0.0, representation = "physical"))]
    fn zeros(k_max: usize, time: f64, representation: &str) -> PyResult<Self> {
        Ok(Self {
            inner: spectral::SpectralState::zeros(k_max, time, parse_repr(representation)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    #[getter]
    fn k_max(&self) -> usize {
        self.inner.k_max()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn representation(&self) -> &'static str {
        match self.inner.repr() {
            Representation::Physical => "physical",
            Representation::Interaction => "interaction",
        }
    }

    fn get(&self, k: i64) -> Complex64 {
        self.inner.get(k)
    }

    /// `(k, c_k)` pairs ordered `-K, ..., -1, 1, ..., K`.
    fn modes(&self) -> Vec<(i64, Complex64)> {
        let mut modes: Vec<_> = self.inner.modes().collect();
        modes.sort_by_key(|&(k, _)| k);
        modes
    }

    fn to_physical(&self) -> Self {
        Self {
            inner: self.inner.to_physical(),
        }
    }

    fn to_interaction(&self) -> Self {
        Self {
            inner: self.inner.to_interaction(),
        }
    }

    fn l2_norm(&self) -> f64 {
        spectral::l2_norm(&self.inner)
    }

    #[pyo3(signature = (s = 0.0, p = 2.0))]
    fn fl_norm(&self, s: f64, p: f64) -> PyResult<f64> {
        Ok(spectral::fl_norm(&self.inner, &params(s, p)?))
    }

    /// Samples on the uniform grid of `n` points.
    fn to_grid(&self, n: usize) -> PyResult<Vec<Complex64>> {
        let field = spectral::grid_transform(&self.inner.to_physical(), n).map_err(to_py)?;
        Ok(field.samples().to_vec())
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.sub(&other.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectralState(k_max={}, time={}, representation='{}')",
            self.inner.k_max(),
            self.inner.time(),
            self.representation()
        )
    }
}

/// Sampled solution: states, times and the scheme that produced them.
#[pyclass(name = "Trajectory", module = "dnls")]
struct PyTrajectory {
    inner: CoreTrajectory,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    fn states(&self) -> Vec<PySpectralState> {
        self.inner
            .states()
            .iter()
            .map(|s| PySpectralState { inner: s.clone() })
            .collect()
    }

    fn last(&self) -> PySpectralState {
        PySpectralState {
            inner: self.inner.last().clone(),
        }
    }

    fn to_physical(&self) -> Self {
        Self {
            inner: self.inner.to_physical(),
        }
    }

    /// Largest discrete residual of the equation along the samples.
    fn residual<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &dynamics::dnls_residual(&self.inner.to_physical()).map_err(to_py)?)
    }

    fn galilean(&self, c: f64) -> PyResult<Self> {
        let inner = dynamics::galilean_transform(&self.inner.to_physical(), c).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// `Q_k` traces for `1 <= |k| <= K/2`.
    #[pyo3(signature = (n_max = 10))]
    fn invariants<'py>(&self, py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
        let traces = invariants::compute_q_lower_band(&self.inner, n_max).map_err(to_py)?;
        to_dict(py, &invariants::summarize(&traces))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

/// Gauge field `W` on a uniform grid.
#[pyclass(name = "Gauge", module = "dnls")]
struct PyGauge {
    inner: GaugeState,
}

#[pymethods]
impl PyGauge {
    #[getter]
    fn min_modulus(&self) -> f64 {
        self.inner.min_modulus()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    fn get(&self, k: i64) -> Complex64 {
        self.inner.get(k)
    }

    fn propagate(&self, dt: f64) -> Self {
        Self {
            inner: self.inner.propagate(dt),
        }
    }

    fn winding_number(&self) -> PyResult<i64> {
        Ok(cole_hopf::winding_number(&self.inner).map_err(to_py)?.index)
    }

    /// Recovers `u = 2i W' / W`.
    #[pyo3(signature = (w_min = cole_hopf::W_MIN))]
    fn inverse(&self, w_min: f64) -> PyResult<PySpectralState> {
        let inner = cole_hopf::inverse_gauge(&self.inner, w_min).map_err(to_py)?;
        Ok(PySpectralState { inner })
    }
}

/// Solver that propagates the gauge freely and inverts it.
#[pyclass(name = "ExactSolver", module = "dnls")]
struct PyExactSolver {
    inner: cole_hopf::ExactSolver,
}

#[pymethods]
impl PyExactSolver {
    #[new]
    #[pyo3(signature = (phi, allow_truncation = false))]
    fn new(phi: &PySpectralState, allow_truncation: bool) -> PyResult<Self> {
        let inner = cole_hopf::ExactSolver::new(&phi.inner)
            .map_err(to_py)?
            .truncating(allow_truncation);
        Ok(Self { inner })
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.inner.margin()
    }

    fn gauge_at(&self, t: f64) -> PyGauge {
        PyGauge {
            inner: self.inner.gauge_at(t),
        }
    }

    fn solve(&self, t: f64) -> PyResult<PySpectralState> {
        let inner = self.inner.solve(t).map_err(to_py)?;
        Ok(PySpectralState { inner })
    }

    fn trajectory(&self, t_final: f64, n_samples: usize) -> PyResult<PyTrajectory> {
        let inner = self.inner.trajectory(t_final, n_samples).map_err(to_py)?;
        Ok(PyTrajectory { inner })
    }
}

/// RK4 in the interaction frame; samples are returned in the physical frame.
#[pyfunction]
#[pyo3(signature = (phi, t_final, dt, max_samples = 4096))]
fn integrate_rk4(phi: &PySpectralState, t_final: f64, dt: f64, max_samples: usize) -> PyResult<PyTrajectory> {
    let opts = dynamics::Rk4Options {
        max_samples,
        ..dynamics::Rk4Options::default()
    };
    let traj = dynamics::integrate_rk4_with(&phi.inner.to_interaction(), t_final, dt, &opts).map_err(to_py)?;
    Ok(PyTrajectory {
        inner: traj.to_physical(),
    })
}

/// Picard iteration on the reduced integral equation.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (phi, t_final, n_max = 10, quad_nodes = 257, tol = 1e-13, max_iter = 100, allow_large_data = false))]
fn picard_solve<'py>(
    py: Python<'py>,
    phi: &PySpectralState,
    t_final: f64,
    n_max: usize,
    quad_nodes: usize,
    tol: f64,
    max_iter: usize,
    allow_large_data: bool,
) -> PyResult<(PyTrajectory, Bound<'py, PyAny>)> {
    let opts = normal_form::PicardOptions {
        allow_large_data,
        ..normal_form::PicardOptions::default()
    };
    let (traj, report) =
        normal_form::picard_solve_with(&phi.inner, t_final, n_max, quad_nodes, tol, max_iter, &opts).map_err(to_py)?;
    Ok((
        PyTrajectory {
            inner: traj.to_physical(),
        },
        to_dict(py, &report)?,
    ))
}

#[pyfunction]
fn exact_solve(phi: &PySpectralState, t: f64) -> PyResult<PySpectralState> {
    let inner = cole_hopf::exact_solve(&phi.inner, t).map_err(to_py)?;
    Ok(PySpectralState { inner })
}

#[pyfunction]
fn gauge0(phi: &PySpectralState) -> PyResult<PyGauge> {
    let inner = cole_hopf::gauge0(&phi.inner.to_physical()).map_err(to_py)?;
    Ok(PyGauge { inner })
}

#[pyfunction]
#[pyo3(signature = (phi, s = 0.0, p = 2.0))]
fn check_conditions<'py>(py: Python<'py>, phi: &PySpectralState, s: f64, p: f64) -> PyResult<Bound<'py, PyAny>> {
    let report = cole_hopf::check_conditions(&phi.inner, &params(s, p)?).map_err(to_py)?;
    to_dict(py, &report)
}

/// `N^n(t)(v)` for an interaction-frame state.
#[pyfunction]
#[pyo3(signature = (v, t, n, direct = false))]
fn boundary_term(v: &PySpectralState, t: f64, n: usize, direct: bool) -> PyResult<PySpectralState> {
    let method = if direct {
        normal_form::Method::Direct
    } else {
        normal_form::Method::Fast
    };
    let inner = normal_form::boundary_term(&v.inner, t, n, method).map_err(to_py)?;
    Ok(PySpectralState { inner })
}

/// `I^n(t)(v)` for an interaction-frame state.
#[pyfunction]
#[pyo3(signature = (v, t, n, direct = false))]
fn remainder_term(v: &PySpectralState, t: f64, n: usize, direct: bool) -> PyResult<PySpectralState> {
    let method = if direct {
        normal_form::Method::Direct
    } else {
        normal_form::Method::Fast
    };
    let inner = normal_form::remainder_term(&v.inner, t, n, method).map_err(to_py)?;
    Ok(PySpectralState { inner })
}

#[pyfunction]
fn q_reference(phi: &PySpectralState, k: i64) -> PyResult<Complex64> {
    invariants::q_reference(&phi.inner, k).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (s = 0.0, p = 2.0))]
fn young_constant(s: f64, p: f64) -> PyResult<f64> {
    spectral::young_constant(&params(s, p)?).map_err(to_py)
}

/// Small-data threshold of the contraction argument.
#[pyfunction]
#[pyo3(signature = (s = 0.0, p = 2.0))]
fn smallness_threshold(s: f64, p: f64) -> PyResult<f64> {
    Ok(normal_form::ContractionConstants::new(&params(s, p)?)
        .map_err(to_py)?
        .smallness)
}

#[pyfunction]
fn alpha_threshold() -> f64 {
    cole_hopf::alpha_threshold()
}

/// Closed-form blowup solution at time `t`, truncated to `|k| <= k_max`.
#[pyfunction]
fn blowup_state(t: f64, k_max: usize) -> PyResult<PySpectralState> {
    let inner = blowup::blowup_state(t, k_max).map_err(to_py)?;
    Ok(PySpectralState { inner })
}

#[pyfunction]
#[pyo3(signature = (t, n = 1024))]
fn blowup_gauge(t: f64, n: usize) -> PyResult<PyGauge> {
    let inner = blowup::blowup_gauge(t, n).map_err(to_py)?;
    Ok(PyGauge { inner })
}

#[pyfunction]
#[pyo3(signature = (t, dt = 1e-5, k_max = 64))]
fn blowup_residual(t: f64, dt: f64, k_max: usize) -> PyResult<f64> {
    Ok(blowup::blowup_residual(t, dt, k_max).map_err(to_py)?.residual)
}

/// `(eps, ||u(t* - eps)||_p)` pairs; `p = inf` gives the sup norm.
#[pyfunction]
fn blowup_norm_curve(p: f64, eps_list: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let curve = blowup::blowup_norm_curve(p, &eps_list).map_err(to_py)?;
    Ok(curve.iter().map(|point| (point.eps, point.value)).collect())
}

#[pymodule]
fn dnls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DnlsError", m.py().get_type::<DnlsError>())?;
    m.add("GaugeSingularError", m.py().get_type::<GaugeSingularError>())?;
    m.add("BLOWUP_TIME", blowup::BLOWUP_TIME)?;
    m.add_class::<PySpectralState>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyGauge>()?;
    m.add_class::<PyExactSolver>()?;
    m.add_function(wrap_pyfunction!(integrate_rk4, m)?)?;
    m.add_function(wrap_pyfunction!(picard_solve, m)?)?;
    m.add_function(wrap_pyfunction!(exact_solve, m)?)?;
    m.add_function(wrap_pyfunction!(gauge0, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_term, m)?)?;
    m.add_function(wrap_pyfunction!(remainder_term, m)?)?;
    m.add_function(wrap_pyfunction!(q_reference, m)?)?;
    m.add_function(wrap_pyfunction!(young_constant, m)?)?;
    m.add_function(wrap_pyfunction!(smallness_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_state, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_gauge, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_residual, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_norm_curve, m)?)?;
    Ok(())
}
