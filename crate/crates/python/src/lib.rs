//! Python bindings. Measures and reports cross the boundary as JSON text,
//! scalars as strings (`"3/4"`, `"0.25"`) so that exact values survive.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bergerkit_core::algebra::{self, SqrtOutcome};
use bergerkit_core::measure::Measure;
use bergerkit_core::oracle::{self, QuadratureMoments, DEFAULT_QUAD_TOL};
use bergerkit_core::shift::MomentSequence;
use bergerkit_core::subnormality;
use bergerkit_core::Scalar;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn measure(json: &str) -> PyResult<Measure> {
    Measure::from_json(json).map_err(err)
}

fn scalar(s: &str) -> PyResult<Scalar> {
    s.parse::<Scalar>().map_err(err)
}

/// Square of a measure in the density family, as JSON.
#[pyfunction]
fn square(measure_json: &str) -> PyResult<String> {
    let nu = measure(measure_json)?;
    algebra::square_measure(&nu).and_then(|m| m.to_json()).map_err(err)
}

/// Moments `γ_0 … γ_n` as strings, exact where rational.
#[pyfunction]
#[pyo3(signature = (measure_json, n, digits = 30))]
fn moments(measure_json: &str, n: u32, digits: usize) -> PyResult<Vec<String>> {
    let mu = measure(measure_json)?;
    Ok((0..=n).map(|k| moment_text(&mu.moment(k), digits)).collect())
}

fn moment_text(g: &Scalar, digits: usize) -> String {
    if g.is_exact() {
        g.to_string()
    } else {
        g.to_decimal(digits)
    }
}

/// Moments by quadrature, as floats.
#[pyfunction]
#[pyo3(signature = (measure_json, n, tol = DEFAULT_QUAD_TOL))]
fn quad_moments(measure_json: &str, n: u32, tol: f64) -> PyResult<Vec<f64>> {
    let mu = measure(measure_json)?;
    (0..=n).map(|k| oracle::quad_measure_moment(&mu, k, tol).map_err(err)).collect()
}

/// Square root of a finitely atomic measure. Returns the root as JSON, or
/// `None` with the reason when no atomic root exists.
#[pyfunction]
#[pyo3(signature = (measure_json, tol = "1e-10"))]
fn sqrt_atomic(measure_json: &str, tol: &str) -> PyResult<(Option<String>, String)> {
    let mu = measure(measure_json)?;
    match algebra::sqrt_atomic(&mu, &scalar(tol)?).map_err(err)? {
        SqrtOutcome::Root(r) => Ok((Some(r.measure().to_json().map_err(err)?), format!("path difference {:e}", r.path_difference))),
        SqrtOutcome::NoRoot(f) => Ok((None, f.to_string())),
    }
}

/// Catalog measure by name; `param` is `q`, `j` or a series term count.
#[pyfunction]
#[pyo3(signature = (name, param = None))]
fn catalog(name: &str, param: Option<&str>) -> PyResult<String> {
    let p = param.map(scalar).transpose()?;
    let c = algebra::catalog(name, p.as_ref()).map_err(err)?;
    c.measure.to_json().map_err(err)
}

/// Checks `γ_n(μ) = γ_n(ν)²` for `n ≤ n_max`; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (mu_json, nu_json, n_max = 20, tol = "1e-10", quad = false))]
fn verify_square(mu_json: &str, nu_json: &str, n_max: u32, tol: &str, quad: bool) -> PyResult<String> {
    let (mu, nu) = (measure(mu_json)?, measure(nu_json)?);
    let tol = scalar(tol)?;
    let report = if quad {
        let q = QuadratureMoments { measure: &mu, tol: DEFAULT_QUAD_TOL };
        oracle::verify_square(&q, &nu, n_max, &tol)
    } else {
        oracle::verify_square(&mu, &nu, n_max, &tol)
    };
    report.and_then(|r| r.to_json()).map_err(err)
}

/// k-hyponormality of a moment sequence over base indices `0..=m_max`.
#[pyfunction]
#[pyo3(signature = (moments, k, m_max, tol = subnormality::DEFAULT_TOL))]
fn is_k_hyponormal(moments: Vec<String>, k: usize, m_max: usize, tol: f64) -> PyResult<bool> {
    let g = moment_sequence(&moments)?;
    Ok(subnormality::hankel_sweep(&g, k, m_max, &Scalar::real(tol)).map_err(err)?.passed)
}

/// n-contractivity of a moment sequence over base indices `0..=m_max`.
#[pyfunction]
fn is_n_contractive(moments: Vec<String>, n: usize, m_max: usize) -> PyResult<bool> {
    let g = moment_sequence(&moments)?;
    Ok(subnormality::is_n_contractive(&g, n, m_max).map_err(err)?.passed)
}

fn moment_sequence(values: &[String]) -> PyResult<MomentSequence> {
    let v = values.iter().map(|s| scalar(s)).collect::<PyResult<Vec<_>>>()?;
    MomentSequence::new(v).map_err(err)
}

#[pymodule]
fn bergerkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(square, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(quad_moments, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_atomic, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(verify_square, m)?)?;
    m.add_function(wrap_pyfunction!(is_k_hyponormal, m)?)?;
    m.add_function(wrap_pyfunction!(is_n_contractive, m)?)?;
    Ok(())
}
