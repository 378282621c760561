//! Python module `mlrelax`. Parameter errors raise `ParameterError`
//! (a `ValueError`), numerical failures raise `NumericalError`
//! (a `RuntimeError`); messages start with the error name.

use mlrelax::laplace::PrabhakarKernel;
use mlrelax::levy::{self, HRoute, LevyQuery};
use mlrelax::mlfun::{self, MLParams};
use mlrelax::series::DEFAULT_TOL;
use mlrelax::spectral::{cole_cole_coupling, default_omega_grid, jonscher_exponents, spectrum};
use mlrelax::verify;
use mlrelax::volterra::{relaxation_curve, SolveMethod, VolterraProblem};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(mlrelax, ParameterError, PyValueError);
create_exception!(mlrelax, NumericalError, PyRuntimeError);

fn to_py(e: mlrelax::Error) -> PyErr {
    let msg = format!("{}: {e}", e.name());
    if e.is_parameter_error() {
        ParameterError::new_err(msg)
    } else {
        NumericalError::new_err(msg)
    }
}

fn kernel(alpha: f64, mu: Option<f64>, nu: f64, a: f64) -> mlrelax::Result<PrabhakarKernel> {
    PrabhakarKernel::new(alpha, nu, mu.unwrap_or(alpha), a)
}

/// E^ν_{α,μ}(x); `route` is "auto" or "series".
pub fn ml_value(alpha: f64, mu: f64, nu: f64, x: f64, route: &str, tol: f64) -> mlrelax::Result<f64> {
    let p = MLParams::new(alpha, mu, nu)?;
    match route {
        "auto" => mlfun::ml3_eval(&p, x, tol),
        "series" => mlfun::ml3(&p, x, tol),
        other => Err(mlrelax::Error::InvalidParam(format!("unknown route {other}"))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_values(
    t: &[f64],
    alpha: f64,
    b: f64,
    mu: Option<f64>,
    nu: f64,
    a: f64,
    f0: f64,
    method: &str,
) -> mlrelax::Result<Vec<f64>> {
    let method: SolveMethod = method.parse()?;
    let p = VolterraProblem::new(kernel(alpha, mu, nu, a)?, b)?.with_f0(f0)?;
    Ok(relaxation_curve(&p, t, method)?.values)
}

pub fn spectral_values(
    omega: Option<Vec<f64>>,
    alpha: f64,
    mu: Option<f64>,
    nu: f64,
    a: f64,
    b: Option<f64>,
    tau: f64,
) -> mlrelax::Result<(Vec<f64>, Vec<Complex64>)> {
    let k = kernel(alpha, mu, nu, a)?;
    let b = b.unwrap_or_else(|| cole_cole_coupling(k.mu, tau));
    let grid = match omega {
        Some(w) => w,
        None => default_omega_grid(tau)?,
    };
    let s = spectrum(&k, b, &grid)?;
    Ok((s.omega_grid, s.values))
}

#[pyfunction]
#[pyo3(signature = (alpha, x, mu = 1.0, nu = 1.0, route = "auto", tol = DEFAULT_TOL))]
fn ml(alpha: f64, x: f64, mu: f64, nu: f64, route: &str, tol: f64) -> PyResult<f64> {
    ml_value(alpha, mu, nu, x, route, tol).map_err(to_py)
}

/// t^{μ-1} E^ν_{α,μ}(a t^α)
#[pyfunction]
#[pyo3(signature = (alpha, a, t, mu = 1.0, nu = 1.0))]
fn prabhakar(alpha: f64, a: f64, t: f64, mu: f64, nu: f64) -> PyResult<f64> {
    mlfun::prabhakar(&MLParams::new(alpha, mu, nu).map_err(to_py)?, a, t).map_err(to_py)
}

/// E^{-n}_{α,1+d}(x)
#[pyfunction]
fn ml_poly(alpha: f64, d: f64, n: u32, x: f64) -> f64 {
    mlfun::ml_poly(alpha, d, n, x)
}

/// h_{α,λ}(u, t) and the route that produced it.
#[pyfunction]
#[pyo3(signature = (alpha, u, t, lam = 0.0, route = "auto"))]
fn h_function(alpha: f64, u: f64, t: f64, lam: f64, route: &str) -> PyResult<(f64, String)> {
    let q = LevyQuery::new(alpha, u, t, lam).map_err(to_py)?;
    let (v, r) = if route == "auto" {
        levy::h_function_auto(&q).map_err(to_py)?
    } else {
        let r: HRoute = route.parse().map_err(to_py)?;
        (levy::h_function(&q, r).map_err(to_py)?, r)
    };
    Ok((v, r.to_string()))
}

#[pyfunction]
fn levy_density(alpha: f64, u: f64, t: f64) -> PyResult<f64> {
    levy::levy_density(alpha, u, t).map_err(to_py)
}

#[pyfunction]
fn levy_primitive(alpha: f64, u: f64, t: f64) -> PyResult<f64> {
    levy::levy_primitive(alpha, u, t).map_err(to_py)
}

/// Relaxation f(t) on the given times; μ defaults to α.
#[pyfunction]
#[pyo3(signature = (t, alpha, b, mu = None, nu = 1.0, a = 0.0, f0 = 1.0, method = "series"))]
#[allow(clippy::too_many_arguments)]
fn solve(
    t: Vec<f64>,
    alpha: f64,
    b: f64,
    mu: Option<f64>,
    nu: f64,
    a: f64,
    f0: f64,
    method: &str,
) -> PyResult<Vec<f64>> {
    solve_values(&t, alpha, b, mu, nu, a, f0, method).map_err(to_py)
}

/// (omega, φ̂(iω)) on `omega` or the default grid around 1/τ. B defaults to τ^{-μ}.
#[pyfunction]
#[pyo3(signature = (alpha, omega = None, mu = None, nu = 1.0, a = 0.0, b = None, tau = 1.0))]
fn spectral(
    alpha: f64,
    omega: Option<Vec<f64>>,
    mu: Option<f64>,
    nu: f64,
    a: f64,
    b: Option<f64>,
    tau: f64,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    spectral_values(omega, alpha, mu, nu, a, b, tau).map_err(to_py)
}

/// (m, 1 - n) fitted on the default grid.
#[pyfunction]
#[pyo3(signature = (alpha, mu = None, nu = 1.0, a = 0.0, b = None, tau = 1.0))]
fn jonscher(alpha: f64, mu: Option<f64>, nu: f64, a: f64, b: Option<f64>, tau: f64) -> PyResult<(f64, f64)> {
    let (w, v) = spectral_values(None, alpha, mu, nu, a, b, tau).map_err(to_py)?;
    let s = mlrelax::spectral::ComplexSpectrum::new(w, v).map_err(to_py)?;
    jonscher_exponents(&s, tau).map_err(to_py)
}

/// Rows (t, f_τ=0.2, ..., f_τ=1.0).
#[pyfunction]
#[pyo3(signature = (t = None))]
fn fig1(t: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    verify::fig1(&t.unwrap_or_else(verify::fig1_default_grid)).map_err(to_py)
}

/// One (id, name, passed, worst_ratio, detail) tuple per criterion.
#[pyfunction]
fn run_verify() -> Vec<(u32, String, bool, f64, String)> {
    verify::run_all()
        .into_iter()
        .map(|r| (r.id, r.name.to_string(), r.passed, r.worst_ratio, r.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "mlrelax")]
fn mlrelax_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParameterError", m.py().get_type::<ParameterError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(ml, m)?)?;
    m.add_function(wrap_pyfunction!(prabhakar, m)?)?;
    m.add_function(wrap_pyfunction!(ml_poly, m)?)?;
    m.add_function(wrap_pyfunction!(h_function, m)?)?;
    m.add_function(wrap_pyfunction!(levy_density, m)?)?;
    m.add_function(wrap_pyfunction!(levy_primitive, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(spectral, m)?)?;
    m.add_function(wrap_pyfunction!(jonscher, m)?)?;
    m.add_function(wrap_pyfunction!(fig1, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_forward_to_core() {
        assert_eq!(
            ml_value(1.0, 1.0, 1.0, 1.0, "auto", DEFAULT_TOL).unwrap(),
            std::f64::consts::E
        );
        assert!(ml_value(1.0, 1.0, 1.0, 1.0, "fast", DEFAULT_TOL)
            .unwrap_err()
            .is_parameter_error());
        let f = solve_values(&[0.0, 1.0], 0.75, 1.0, None, 1.0, 0.0, 1.0, "closed").unwrap();
        assert_eq!(f[0], 1.0);
        assert!((f[1] - 0.39310830281575406).abs() < 1e-13);
        let (w, v) = spectral_values(Some(vec![1.0]), 0.5, None, 1.0, 0.0, None, 1.0).unwrap();
        assert_eq!(w, vec![1.0]);
        assert!((v[0].re - 0.5).abs() < 1e-15);
    }
}
