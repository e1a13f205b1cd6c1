//! Python bindings for the kicked harmonic oscillator simulator.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use kho_core::fock::{self, FockVector};
use kho_core::lattice::{self, LatticeState};
use kho_core::model::{self, SystemParams};
use kho_core::verify::{self, Level, VerifyOptions};
use kho_core::{Error, C64};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Eigen(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => pyo3::exceptions::PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for kho_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Dimensionless system parameters (r, q, κ, η²).
#[pyclass(name = "SystemParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystemParams(SystemParams);

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (r=1, q=4, kappa=-0.8, eta_sq=std::f64::consts::PI))]
    fn new(r: u32, q: u32, kappa: f64, eta_sq: f64) -> PyResult<Self> {
        SystemParams::new(r, q, kappa, eta_sq).py().map(Self)
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r()
    }
    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa()
    }
    #[getter]
    fn eta_sq(&self) -> f64 {
        self.0.eta_sq()
    }
    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau()
    }
    #[getter]
    fn zeta(&self) -> f64 {
        self.0.zeta()
    }

    /// Resonance classification as a JSON string.
    fn classify(&self) -> String {
        model::classify(self.0.eta_sq(), self.0.q()).to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemParams(r={}, q={}, kappa={}, eta_sq={})",
            self.0.r(),
            self.0.q(),
            self.0.kappa(),
            self.0.eta_sq()
        )
    }
}

/// State vector in a truncated number basis.
#[pyclass(name = "FockVector", skip_from_py_object)]
#[derive(Clone)]
struct PyFockVector(FockVector);

#[pymethods]
impl PyFockVector {
    #[new]
    fn new(amps: Vec<C64>) -> PyResult<Self> {
        FockVector::from_amps(amps).py().map(Self)
    }

    #[staticmethod]
    fn ground(dim: usize) -> PyResult<Self> {
        FockVector::ground(dim).py().map(Self)
    }

    #[staticmethod]
    fn number(n: usize, dim: usize) -> PyResult<Self> {
        FockVector::number(n, dim).py().map(Self)
    }

    #[staticmethod]
    fn coherent(alpha: C64, dim: usize) -> PyResult<Self> {
        FockVector::coherent(alpha, dim).py().map(Self)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn amps(&self) -> Vec<C64> {
        self.0.amps().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn mean_energy(&self) -> f64 {
        self.0.mean_energy()
    }

    fn fidelity(&self, other: &PyFockVector) -> PyResult<f64> {
        if other.0.dim() != self.0.dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(self.0.fidelity(&other.0))
    }

    fn tail_weight(&self) -> f64 {
        self.0.tail_weight()
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }
}

/// Repeated application of one Floquet matrix.
#[pyclass(name = "Propagator", frozen)]
struct PyPropagator(fock::Propagator);

#[pymethods]
impl PyPropagator {
    #[new]
    fn new(params: &PySystemParams, dim: usize) -> PyResult<Self> {
        fock::Propagator::new(&params.0, dim).py().map(Self)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn step(&self, state: &PyFockVector) -> PyResult<PyFockVector> {
        self.0.step(&state.0).py().map(PyFockVector)
    }
}

/// Propagate `n_kicks` kicks; returns (final state, energies for N = 0..n,
/// truncation_unsafe).
#[pyfunction]
fn evolve(
    state: &PyFockVector,
    params: &PySystemParams,
    n_kicks: usize,
) -> PyResult<(PyFockVector, Vec<f64>, bool)> {
    let ev = fock::evolve(&state.0, &params.0, n_kicks).py()?;
    Ok((PyFockVector(ev.state), ev.energies, ev.truncation_unsafe))
}

/// Husimi Q function on a square window; rows are ascending Im α.
#[pyfunction]
#[pyo3(signature = (state, radius=20.0, n=201))]
fn q_function(state: &PyFockVector, radius: f64, n: usize) -> PyResult<Vec<Vec<f64>>> {
    let spec = fock::QGridSpec::square(radius, n).py()?;
    let grid = fock::q_function(&state.0, &spec).py()?;
    Ok(grid.values.chunks(spec.n_re).map(<[f64]>::to_vec).collect())
}

/// Eigenphases and ground-state overlaps, sorted by phase.
#[pyfunction]
fn quasienergy_spectrum(params: &PySystemParams, dim: usize) -> PyResult<Vec<(f64, f64)>> {
    let s = fock::quasienergy_spectrum(&params.0, dim).py()?;
    Ok(s.records
        .iter()
        .map(|r| (r.phi, r.ground_overlap))
        .collect())
}

/// Sparse lattice-coefficient state.
#[pyclass(name = "LatticeState", skip_from_py_object)]
#[derive(Clone)]
struct PyLatticeState(LatticeState);

#[pymethods]
impl PyLatticeState {
    #[staticmethod]
    #[pyo3(signature = (params, alpha=C64::new(0.0, 0.0)))]
    fn from_params(params: &PySystemParams, alpha: C64) -> PyResult<Self> {
        LatticeState::init_from_params(&params.0, alpha)
            .py()
            .map(Self)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        LatticeState::from_json(text).py().map(Self)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().py()
    }

    #[getter]
    fn kicks(&self) -> u64 {
        self.0.j()
    }

    fn step(&self, n: Option<u64>) -> PyResult<Self> {
        lattice::step_n(&self.0, n.unwrap_or(1)).py().map(Self)
    }

    fn coeff(&self, m: i64, n: i64) -> C64 {
        self.0.coeff(m, n)
    }

    fn coeffs(&self) -> Vec<((i64, i64), C64)> {
        self.0.coeffs().iter().map(|(&k, &v)| (k, v)).collect()
    }

    fn to_fock(&self, dim: usize) -> PyResult<PyFockVector> {
        lattice::to_fock(&self.0, dim)
            .py()
            .map(|c| PyFockVector(c.state))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Parse η² expressions such as `pi`, `2pi/sqrt3`, `phi*pi`.
#[pyfunction]
fn parse_eta_sq(text: &str) -> PyResult<f64> {
    model::parse_eta_sq(text).py()
}

#[pyfunction]
fn principal_value(q: u32) -> Option<f64> {
    model::principal_value(q)
}

#[pyfunction]
fn sine_moduli(q: u32) -> Vec<f64> {
    model::sine_moduli(q)
}

#[pyfunction]
fn bessel_j(n: i64, x: f64) -> PyResult<f64> {
    kho_core::specfun::bessel_j(n, x).py()
}

/// Run the verification suite; returns (all passed, report text).
#[pyfunction]
#[pyo3(signature = (level="quick"))]
fn run_verify(py: Python<'_>, level: &str) -> PyResult<(bool, String)> {
    let level: Level = level.parse().py()?;
    let report = py.detach(|| verify::run(&VerifyOptions::new(level))).py()?;
    Ok((report.all_passed(), report.to_string()))
}

#[pymodule]
fn kho(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyFockVector>()?;
    m.add_class::<PyPropagator>()?;
    m.add_class::<PyLatticeState>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(quasienergy_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(parse_eta_sq, m)?)?;
    m.add_function(wrap_pyfunction!(principal_value, m)?)?;
    m.add_function(wrap_pyfunction!(sine_moduli, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
