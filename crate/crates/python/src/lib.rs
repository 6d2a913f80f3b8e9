//! Python bindings for the spectral-action toolkit.
//!
//! Structured results cross the boundary as Python objects decoded from JSON.

use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use spectral_action::clifford::{Dims, Element, Generator};
use spectral_action::commands::{self, exit, Command, RunConfig};
use spectral_action::curvature::{CurvatureFile, CurvaturePoint};
use spectral_action::cutoff::Cutoff;
use spectral_action::heat::{density_closed_formula, density_closed_generic};
use spectral_action::internal::{sm_coefficients, sm_reassembled, SMParams, SignPolicy};
use spectral_action::scalar::Scalar;
use spectral_action::torus::{torus_count_action, torus_heat_trace, TorusSpec};
use spectral_action::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Resource(msg) => PyMemoryError::new_err(msg),
        Error::Io(err) => PyRuntimeError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py_obj<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

fn dims(p: usize, q: usize) -> PyResult<Dims> {
    Dims::new(p, q).map_err(to_py_err)
}

fn parse_generator(kind: &str, index: usize) -> PyResult<Generator> {
    match kind {
        "f" => Ok(Generator::leaf(index)),
        "h" => Ok(Generator::normal(index)),
        "hat" => Ok(Generator::hat(index)),
        _ => Err(PyValueError::new_err(format!("generator kind must be f, h or hat, got {kind:?}"))),
    }
}

/// Trace of a product of generators, as `(re, im)`.
///
/// `word` is a list of `(kind, index)` pairs with kind `f`, `h` or `hat`
/// and 1-based index.
#[pyfunction]
fn word_trace(p: usize, q: usize, word: Vec<(String, usize)>) -> PyResult<(f64, f64)> {
    let d = dims(p, q)?;
    let gens = word
        .iter()
        .map(|(k, i)| parse_generator(k, *i))
        .collect::<PyResult<Vec<_>>>()?;
    let e = Element::word(d, &gens, Scalar::from_int(1)).map_err(to_py_err)?;
    let z = e.trace().to_complex();
    Ok((z.re, z.im))
}

/// Curvature data at a point of a foliated manifold.
#[pyclass(name = "Curvature", module = "spectral_action_py")]
struct PyCurvature {
    inner: CurvaturePoint,
}

#[pymethods]
impl PyCurvature {
    #[staticmethod]
    fn random(seed: u64, p: usize, q: usize) -> PyResult<Self> {
        Ok(PyCurvature { inner: CurvaturePoint::random(seed, dims(p, q)?) })
    }

    #[staticmethod]
    fn flat(p: usize, q: usize) -> PyResult<Self> {
        Ok(PyCurvature { inner: CurvaturePoint::flat(dims(p, q)?) })
    }

    #[staticmethod]
    fn constant(kappa: f64, p: usize, q: usize) -> PyResult<Self> {
        Ok(PyCurvature { inner: CurvaturePoint::constant_curvature(kappa, dims(p, q)?) })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: CurvatureFile =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCurvature { inner: file.point().map_err(to_py_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&CurvatureFile::from_point(&self.inner))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.dims.p()
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.dims.q()
    }

    #[getter]
    fn scalar_curvature(&self) -> f64 {
        self.inner.scalar_curvature
    }

    fn invariants(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py_obj(py, &self.inner.invariants())
    }

    /// Heat density of order 0, 2 or 4 as `(generic, closed_form)`.
    #[pyo3(signature = (order, include_total_derivatives = false))]
    fn density(&self, order: u8, include_total_derivatives: bool) -> PyResult<(f64, f64)> {
        let generic =
            density_closed_generic(&self.inner, order, include_total_derivatives).map_err(to_py_err)?;
        let formula = density_closed_formula(&self.inner, order).map_err(to_py_err)?;
        Ok((generic, formula))
    }

    fn __repr__(&self) -> String {
        format!(
            "Curvature(p={}, q={}, r_M={})",
            self.inner.dims.p(),
            self.inner.dims.q(),
            self.inner.scalar_curvature
        )
    }
}

/// Moments `[F_0, .., F_4]` of a named cut-off (`sharp`, `zero`, `ramp:<a>`).
#[pyfunction]
fn cutoff_moments(name: &str) -> PyResult<[f64; 5]> {
    let m = Cutoff::named(name).map_err(to_py_err)?.moments();
    Ok([m.f0, m.f1, m.f2, m.f3, m.f4])
}

fn sm_params(params: Option<&str>) -> PyResult<SMParams> {
    match params {
        None => Ok(SMParams::default()),
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string())),
    }
}

/// Standard-Model heat coefficients for `(p, q) = (1, 2)`.
///
/// `params` is a JSON object of Standard-Model parameters; missing fields
/// default to zero.
#[pyfunction]
#[pyo3(signature = (params = None, oracle_corrected_signs = false))]
fn sm(py: Python<'_>, params: Option<&str>, oracle_corrected_signs: bool) -> PyResult<Py<PyAny>> {
    let p = sm_params(params)?;
    let policy = if oracle_corrected_signs { SignPolicy::OracleCorrected } else { SignPolicy::Printed };
    let c = sm_coefficients(&p, dims(1, 2)?, policy).map_err(to_py_err)?;
    to_py_obj(py, &c)
}

/// `(a_2, a_4)` reassembled from the generic integrand and internal traces.
#[pyfunction]
#[pyo3(signature = (params = None))]
fn sm_reassembled_coefficients(params: Option<&str>) -> PyResult<(f64, f64)> {
    sm_reassembled(&sm_params(params)?, dims(1, 2)?).map_err(to_py_err)
}

fn torus(p: usize, q: usize, periods: Option<[f64; 4]>) -> PyResult<TorusSpec> {
    let mut t = TorusSpec::unit(dims(p, q)?);
    if let Some(l) = periods {
        t.periods = l;
    }
    t.validate().map_err(to_py_err)?;
    Ok(t)
}

/// Heat trace `Tr exp(-t D²)` on a flat four-torus.
#[pyfunction]
#[pyo3(signature = (time, p = 1, q = 2, periods = None))]
fn torus_heat(time: f64, p: usize, q: usize, periods: Option<[f64; 4]>) -> PyResult<f64> {
    torus_heat_trace(&torus(p, q, periods)?, time).map_err(to_py_err)
}

/// Number of eigenvalues of `D²` not exceeding `Λ²` on a flat four-torus.
#[pyfunction]
#[pyo3(signature = (lam, p = 1, q = 2, periods = None))]
fn torus_count(lam: f64, p: usize, q: usize, periods: Option<[f64; 4]>) -> PyResult<u64> {
    torus_count_action(&torus(p, q, periods)?, lam).map_err(to_py_err)
}

fn parse_command(name: &str) -> PyResult<Command> {
    match name {
        "verify" => Ok(Command::Verify),
        "coeff" => Ok(Command::Coeff),
        "action" => Ok(Command::Action),
        "sm" => Ok(Command::Sm),
        "torus" => Ok(Command::Torus),
        _ => Err(PyValueError::new_err(format!("unknown command {name:?}"))),
    }
}

/// Runs a command-line subcommand; returns `(exit_code, report_json)`.
///
/// Input and resource errors yield exit codes 2 and 3 with a JSON error body.
#[pyfunction]
#[pyo3(signature = (
    command = "verify",
    p = 1,
    q = 2,
    seed = 1,
    trials = 100,
    tol = 1e-9,
    input = None,
    lam = None,
    cutoff = None,
    time = None,
    boundary = false,
    include_total_derivatives = false,
    oracle_corrected_signs = false,
))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    command: &str,
    p: usize,
    q: usize,
    seed: u64,
    trials: usize,
    tol: f64,
    input: Option<String>,
    lam: Option<f64>,
    cutoff: Option<String>,
    time: Option<f64>,
    boundary: bool,
    include_total_derivatives: bool,
    oracle_corrected_signs: bool,
) -> PyResult<(i32, String)> {
    let cfg = RunConfig {
        command: parse_command(command)?,
        p,
        q,
        seed,
        trials,
        tol,
        input: input.map(Into::into),
        output: None,
        lambda: lam,
        cutoff,
        time,
        boundary,
        include_total_derivatives,
        oracle_corrected_signs,
    };
    let outcome = py.detach(|| {
        commands::run(&cfg).and_then(|report| {
            let text = commands::report_json(&report)?;
            Ok((commands::exit_code(&report), text))
        })
    });
    Ok(match outcome {
        Ok(pair) => pair,
        Err(e) => {
            let code = commands::exit_code_for(&e);
            (code, serde_json::json!({ "error": e.to_string(), "exit_code": code }).to_string())
        }
    })
}

#[pymodule]
fn spectral_action_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(word_trace, m)?)?;
    m.add_function(wrap_pyfunction!(cutoff_moments, m)?)?;
    m.add_function(wrap_pyfunction!(sm, m)?)?;
    m.add_function(wrap_pyfunction!(sm_reassembled_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(torus_heat, m)?)?;
    m.add_function(wrap_pyfunction!(torus_count, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_class::<PyCurvature>()?;
    m.add("EXIT_OK", exit::OK)?;
    m.add("EXIT_IDENTITY_FAILURE", exit::IDENTITY_FAILURE)?;
    m.add("EXIT_INPUT_ERROR", exit::INPUT_ERROR)?;
    m.add("EXIT_RESOURCE_ERROR", exit::RESOURCE_ERROR)?;
    Ok(())
}
