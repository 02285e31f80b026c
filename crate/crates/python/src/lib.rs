//! Python bindings for the `telegraph` crate.
//!
//! Build with `--features extension-module` to produce an importable
//! `telegraph_py` module; see `python/smoke_test.py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use telegraph::estimate::{estimate_replicated_at_level, estimate_single_result, EstimateResult};
use telegraph::process::{simulate_batch, SwitchTrajectory};
use telegraph::validate::{run_experiment, ExperimentConfig};
use telegraph::{law, specfun, LawDecomposition, ModelParams};

fn py_err(e: telegraph::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model(theta: f64, c: f64) -> PyResult<ModelParams> {
    ModelParams::new(theta, c).map_err(py_err)
}

/// Model parameters: switching rate scale `theta` and speed `c`.
#[pyclass(name = "Params", frozen)]
struct PyParams(ModelParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (theta, c=1.0))]
    fn new(theta: f64, c: f64) -> PyResult<Self> {
        model(theta, c).map(Self)
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c()
    }

    /// `theta tanh(theta t)`.
    fn intensity(&self, t: f64) -> PyResult<f64> {
        self.0.lambda_at(t).map_err(py_err)
    }

    /// `ln cosh(theta t)`, the mean number of switches on `[0, t]`.
    fn cumulative_intensity(&self, t: f64) -> PyResult<f64> {
        self.0.big_lambda_at(t).map_err(py_err)
    }

    fn inverse_cumulative_intensity(&self, u: f64) -> PyResult<f64> {
        self.0.big_lambda_inv(u).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Params(theta={}, c={})", self.0.theta(), self.0.c())
    }
}

/// Law of the position at a fixed time: two atoms at `+-ct` plus a density.
#[pyclass(name = "Law", frozen)]
struct PyLaw(LawDecomposition);

#[pymethods]
impl PyLaw {
    #[new]
    #[pyo3(signature = (theta, t, c=1.0))]
    fn new(theta: f64, t: f64, c: f64) -> PyResult<Self> {
        LawDecomposition::new(model(theta, c)?, t).map(Self).map_err(py_err)
    }

    #[getter]
    fn reach(&self) -> f64 {
        self.0.reach()
    }

    /// Mass of each of the two atoms.
    #[getter]
    fn atom_mass(&self) -> f64 {
        self.0.atom_mass()
    }

    #[getter]
    fn continuous_mass(&self) -> f64 {
        self.0.continuous_mass()
    }

    fn density(&self, x: f64) -> f64 {
        self.0.density(x)
    }

    fn densities(&self, xs: Vec<f64>) -> Vec<f64> {
        xs.into_iter().map(|x| self.0.density(x)).collect()
    }

    /// `P(X(t) <= x)`.
    fn cdf(&self, x: f64) -> PyResult<f64> {
        self.0.cdf(x).map_err(py_err)
    }

    /// `P(X(t) < x)`.
    fn cdf_left(&self, x: f64) -> PyResult<f64> {
        self.0.cdf_left(x).map_err(py_err)
    }
}

/// One simulated path on `[0, T]`.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: SwitchTrajectory,
    seed: u64,
    index: u64,
}

#[pymethods]
impl PyTrajectory {
    /// Initial direction, `+1` or `-1`.
    #[getter]
    fn sign(&self) -> i8 {
        self.inner.sign().into()
    }

    #[getter]
    fn events(&self) -> Vec<f64> {
        self.inner.events().times().to_vec()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon()
    }

    fn position(&self, t: f64) -> PyResult<f64> {
        self.inner.position_at(t).map_err(py_err)
    }

    fn velocity(&self, t: f64) -> PyResult<f64> {
        self.inner.velocity_at(t).map_err(py_err)
    }

    fn final_position(&self) -> f64 {
        self.inner.final_position()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_record(self.seed, self.index))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pyclass(name = "Estimate", frozen, get_all)]
struct PyEstimate {
    theta_hat: f64,
    pi_hat: f64,
    std_error: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    level: Option<f64>,
    n: usize,
    horizon: f64,
    scheme: String,
    degenerate: bool,
}

impl From<EstimateResult> for PyEstimate {
    fn from(r: EstimateResult) -> Self {
        let scheme = match r.scheme {
            telegraph::Scheme::Single => "single",
            telegraph::Scheme::Replicated => "replicated",
        };
        Self {
            theta_hat: r.theta_hat,
            pi_hat: r.pi_hat,
            std_error: r.std_error,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            level: r.level,
            n: r.n,
            horizon: r.horizon,
            scheme: scheme.to_string(),
            degenerate: r.degenerate,
        }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate(theta_hat={}, n={}, scheme={})", self.theta_hat, self.n, self.scheme)
    }
}

#[pyfunction]
#[pyo3(signature = (theta, t, x, c=1.0))]
fn density(theta: f64, t: f64, x: f64, c: f64) -> PyResult<f64> {
    law::density(&model(theta, c)?, t, x).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (theta, t, x, c=1.0))]
fn cdf(theta: f64, t: f64, x: f64, c: f64) -> PyResult<f64> {
    law::cdf(&model(theta, c)?, t, x).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (theta, t, c=1.0))]
fn atom_mass(theta: f64, t: f64, c: f64) -> PyResult<f64> {
    law::atom_mass(&model(theta, c)?, t).map_err(py_err)
}

/// `(P(V(t) = V(0)), P(V(t) = -V(0)))`.
#[pyfunction]
#[pyo3(signature = (theta, t, c=1.0))]
fn velocity_transition(theta: f64, t: f64, c: f64) -> PyResult<(f64, f64)> {
    law::velocity_transition(&model(theta, c)?, t).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (theta, s, t, c=1.0))]
fn velocity_covariance(theta: f64, s: f64, t: f64, c: f64) -> PyResult<f64> {
    law::velocity_covariance(&model(theta, c)?, s, t).map_err(py_err)
}

#[pyfunction]
fn bessel_i0(z: f64) -> PyResult<f64> {
    specfun::bessel_i0(z).map_err(py_err)
}

#[pyfunction]
fn bessel_i1(z: f64) -> PyResult<f64> {
    specfun::bessel_i1(z).map_err(py_err)
}

#[pyfunction]
fn log_cosh(y: f64) -> f64 {
    specfun::log_cosh(y)
}

#[pyfunction]
fn acosh_exp(u: f64) -> PyResult<f64> {
    specfun::acosh_exp(u).map_err(py_err)
}

/// `n` trajectories; trajectory `i` uses stream `i` of `seed`, matching the
/// command-line `simulate`.
#[pyfunction]
#[pyo3(signature = (theta, horizon, n, c=1.0, seed=0))]
fn simulate(
    py: Python<'_>,
    theta: f64,
    horizon: f64,
    n: usize,
    c: f64,
    seed: u64,
) -> PyResult<Vec<PyTrajectory>> {
    let params = model(theta, c)?;
    let batch = py.detach(|| simulate_batch(&params, horizon, n, seed)).map_err(py_err)?;
    Ok(batch
        .into_iter()
        .enumerate()
        .map(|(i, inner)| PyTrajectory { inner, seed, index: i as u64 })
        .collect())
}

/// Replicated-scheme estimate from switch counts observed on `[0, horizon]`.
#[pyfunction]
#[pyo3(signature = (counts, horizon, level=0.95))]
fn estimate(counts: Vec<u64>, horizon: f64, level: f64) -> PyResult<PyEstimate> {
    estimate_replicated_at_level(&counts, horizon, level).map(Into::into).map_err(py_err)
}

/// Point estimate from the switch count of a single trajectory.
#[pyfunction]
fn estimate_single(switches: u64, horizon: f64) -> PyResult<PyEstimate> {
    estimate_single_result(switches, horizon).map(Into::into).map_err(py_err)
}

/// Runs the verification harness. `config` is a JSON document (omitted
/// fields take defaults); returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn validate(py: Python<'_>, config: Option<&str>) -> PyResult<(bool, String)> {
    let config = match config {
        Some(text) => ExperimentConfig::from_json(text).map_err(py_err)?,
        None => ExperimentConfig::default(),
    };
    let report = py.detach(|| run_experiment(&config)).map_err(py_err)?;
    Ok((report.passed, report.to_json().map_err(py_err)?))
}

#[pymodule]
fn telegraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyLaw>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(cdf, m)?)?;
    m.add_function(wrap_pyfunction!(atom_mass, m)?)?;
    m.add_function(wrap_pyfunction!(velocity_transition, m)?)?;
    m.add_function(wrap_pyfunction!(velocity_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i0, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i1, m)?)?;
    m.add_function(wrap_pyfunction!(log_cosh, m)?)?;
    m.add_function(wrap_pyfunction!(acosh_exp, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_single, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
