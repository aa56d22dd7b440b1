//! Python bindings. Rationals cross the boundary as `"p/q"` strings and reports as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use susle::loewner_sde::{simulate_classical, DriverConfig, PathOptions};
use susle::martingale::{build_model, drift_is_null, mc_martingale, observable_mc, McOptions, ModelParams, ModelTag};
use susle::superalgebra::{parse_algebra, VermaModule, VermaVector, Weights};
use susle::superseries::{expmap_coordinates, expmap_forward, PowerSeries};
use susle::{Rational, C64};

fn err(e: susle::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(err)
}

fn opt_rational(s: Option<&str>) -> PyResult<Option<Rational>> {
    s.map(rational).transpose()
}

fn model_tag(s: &str) -> PyResult<ModelTag> {
    s.parse().map_err(err)
}

#[allow(clippy::too_many_arguments)]
fn params(
    kappa: Option<&str>,
    c: Option<&str>,
    h: Option<&str>,
    alpha: Option<&str>,
    t: Option<&str>,
    a: Option<&str>,
) -> PyResult<ModelParams> {
    Ok(ModelParams {
        kappa: opt_rational(kappa)?,
        c: opt_rational(c)?,
        h: opt_rational(h)?,
        alpha: opt_rational(alpha)?,
        t: opt_rational(t)?,
        a: opt_rational(a)?,
    })
}

/// `(c, h)` of the Virasoro parameter map.
#[pyfunction]
fn virasoro_weights(kappa: &str) -> PyResult<(String, String)> {
    let (c, h) = susle::martingale::virasoro_weights(&rational(kappa)?).map_err(err)?;
    Ok((c.to_string(), h.to_string()))
}

/// `(c, h)` of the N=1 parameter map.
#[pyfunction]
fn ns1_weights(kappa: &str) -> PyResult<(String, String)> {
    let (c, h) = susle::martingale::ns1_weights(&rational(kappa)?).map_err(err)?;
    Ok((c.to_string(), h.to_string()))
}

/// Whether `Σ coeff · monomial |c, h[, alpha]⟩` is a nonzero singular vector.
#[pyfunction]
#[pyo3(signature = (algebra, c, h, terms, alpha = None))]
fn is_singular(algebra: &str, c: &str, h: &str, terms: Vec<(String, String)>, alpha: Option<&str>) -> PyResult<bool> {
    let alg = parse_algebra(algebra).map_err(err)?;
    let w = Weights::with_alpha(rational(c)?, rational(h)?, opt_rational(alpha)?.unwrap_or_else(|| Rational::integer(0)));
    let owned: Vec<(String, Rational)> = terms.iter().map(|(m, x)| Ok((m.clone(), rational(x)?))).collect::<PyResult<_>>()?;
    let borrowed: Vec<(&str, Rational)> = owned.iter().map(|(m, x)| (m.as_str(), x.clone())).collect();
    let v = VermaVector::from_rational_terms(alg, &borrowed).map_err(err)?;
    Ok(VermaModule::new(alg, w).is_singular(&v).map_err(err)?.pass)
}

/// Drift-null report as JSON.
#[pyfunction]
#[pyo3(signature = (model, kappa = None, c = None, h = None, alpha = None, t = None, a = None))]
fn drift_check(
    model: &str,
    kappa: Option<&str>,
    c: Option<&str>,
    h: Option<&str>,
    alpha: Option<&str>,
    t: Option<&str>,
    a: Option<&str>,
) -> PyResult<String> {
    let m = build_model(model_tag(model)?, &params(kappa, c, h, alpha, t, a)?).map_err(err)?;
    Ok(drift_is_null(&m).map_err(err)?.to_json().to_string())
}

/// Classical paths, one list of complex values per starting point.
#[pyfunction]
#[pyo3(signature = (kappa, points, dt, steps, seed = 0, trial = 0))]
fn simulate(kappa: f64, points: Vec<C64>, dt: f64, steps: usize, seed: u64, trial: u64) -> PyResult<Vec<Vec<C64>>> {
    let d = DriverConfig::new(seed, dt, steps, 1).map_err(err)?;
    let paths = simulate_classical(kappa, &points, &d, trial, &PathOptions::default()).map_err(err)?;
    Ok(paths.into_iter().map(|p| p.values).collect())
}

/// Monte Carlo martingale report as JSON; `level` may be half-integral, e.g. `"5/2"`.
#[pyfunction]
#[pyo3(signature = (model, kappa, level, dt, horizon, trials, seed = 0))]
fn martingale_mc(model: &str, kappa: &str, level: &str, dt: f64, horizon: f64, trials: usize, seed: u64) -> PyResult<String> {
    let m = build_model(model_tag(model)?, &ModelParams::kappa(rational(kappa)?)).map_err(err)?;
    let twice = rational(level)? * Rational::integer(2);
    if !twice.is_integer() {
        return Err(PyValueError::new_err("level must be a multiple of 1/2"));
    }
    let d = DriverConfig::with_horizon(seed, dt, horizon, m.noise.len()).map_err(err)?;
    let rep = mc_martingale(&m, twice.to_f64() as i32, &d, trials, &McOptions::default()).map_err(err)?;
    Ok(rep.to_json().to_string())
}

/// Constancy test of the classical observable, as JSON.
#[pyfunction]
#[pyo3(signature = (kappa, z, dt, horizon, trials, seed = 0))]
fn observable(kappa: &str, z: C64, dt: f64, horizon: f64, trials: usize, seed: u64) -> PyResult<String> {
    let d = DriverConfig::with_horizon(seed, dt, horizon, 1).map_err(err)?;
    Ok(observable_mc(&rational(kappa)?, z, &d, trials).map_err(err)?.to_json().to_string())
}

/// Exponential coordinates `{"v0": ..., "v": {...}, "round_trip_exact": bool}` of a series given as JSON.
#[pyfunction]
fn expmap(series_json: &str) -> PyResult<String> {
    let v: serde_json::Value = serde_json::from_str(series_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let rho = PowerSeries::<Rational>::from_json(&v).map_err(err)?;
    let coords = expmap_coordinates(&rho).map_err(err)?;
    let back = expmap_forward(&coords, rho.trunc()).map_err(err)?;
    let exact = back.checked_sub(&rho).map_err(err)?.is_zero();
    let vs: serde_json::Map<String, serde_json::Value> = coords.v.iter().map(|(i, g)| (i.to_string(), g.to_json())).collect();
    Ok(serde_json::json!({"v0": coords.v0.to_json(), "v": vs, "round_trip_exact": exact}).to_string())
}

#[pymodule]
fn susle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(virasoro_weights, m)?)?;
    m.add_function(wrap_pyfunction!(ns1_weights, m)?)?;
    m.add_function(wrap_pyfunction!(is_singular, m)?)?;
    m.add_function(wrap_pyfunction!(drift_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_mc, m)?)?;
    m.add_function(wrap_pyfunction!(observable, m)?)?;
    m.add_function(wrap_pyfunction!(expmap, m)?)?;
    Ok(())
}
