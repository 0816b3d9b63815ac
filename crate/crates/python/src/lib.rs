//! Python bindings: ensembles, density evolution, scaling coefficients and
//! simulation.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ldpc_scaling as core;
use ldpc_scaling::{DegreeDistribution, LimitOptions, LimitOutcome, PrecisionConfig, RecursionVariant};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn precision(prec_bits: usize, double: bool) -> PyResult<PrecisionConfig> {
    if double {
        Ok(PrecisionConfig::double())
    } else {
        PrecisionConfig::from_bits(prec_bits).map_err(err)
    }
}

fn variant(name: &str) -> PyResult<RecursionVariant> {
    RecursionVariant::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown recursion variant {name:?}")))
}

/// Degree-distribution pair (λ, ρ) in edge perspective.
#[pyclass(name = "Ensemble", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnsemble(DegreeDistribution);

#[pymethods]
impl PyEnsemble {
    #[staticmethod]
    fn regular(l: u32, r: u32) -> PyResult<Self> {
        DegreeDistribution::regular(l, r).map(PyEnsemble).map_err(err)
    }

    /// `{"regular": [l, r]}` or `{"lambda": {...}, "rho": {...}}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        DegreeDistribution::from_json(text).map(PyEnsemble).map_err(err)
    }

    #[staticmethod]
    fn from_coefficients(lambda_: BTreeMap<u32, f64>, rho: BTreeMap<u32, f64>) -> PyResult<Self> {
        DegreeDistribution::from_edge_perspective(&lambda_, &rho)
            .map(PyEnsemble)
            .map_err(err)
    }

    #[getter]
    fn lambda_(&self) -> BTreeMap<u32, f64> {
        self.0.lambda_coeffs().clone()
    }

    #[getter]
    fn rho(&self) -> BTreeMap<u32, f64> {
        self.0.rho_coeffs().clone()
    }

    #[getter]
    fn regular_degrees(&self) -> Option<(u32, u32)> {
        self.0.as_regular()
    }

    #[getter]
    fn design_rate(&self) -> f64 {
        self.0.design_rate()
    }

    fn threshold(&self) -> f64 {
        core::threshold(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Ensemble({})", self.0)
    }
}

/// β, γ and α = β + γ at one (ε, t).
#[pyclass(name = "AlphaResult", frozen, get_all)]
struct PyAlphaResult {
    epsilon: f64,
    t: usize,
    beta: f64,
    gamma: f64,
    alpha: f64,
    working_bits: usize,
}

impl From<core::AlphaResult> for PyAlphaResult {
    fn from(r: core::AlphaResult) -> Self {
        PyAlphaResult {
            epsilon: r.epsilon,
            t: r.t,
            beta: r.beta.to_f64(),
            gamma: r.gamma.to_f64(),
            alpha: r.alpha.to_f64(),
            working_bits: r.working_bits,
        }
    }
}

#[pymethods]
impl PyAlphaResult {
    fn __repr__(&self) -> String {
        format!(
            "AlphaResult(epsilon={}, t={}, beta={:e}, gamma={:e}, alpha={})",
            self.epsilon, self.t, self.beta, self.gamma, self.alpha
        )
    }
}

/// Incremental recursion tables for one (ensemble, ε), valid up to `capacity`.
#[pyclass(name = "ScalingContext", unsendable)]
struct PyScalingContext(core::ScalingContext);

#[pymethods]
impl PyScalingContext {
    #[new]
    #[pyo3(signature = (ensemble, epsilon, capacity, prec_bits = 256, double = false, recursion_variant = "a"))]
    fn new(
        ensemble: &PyEnsemble,
        epsilon: f64,
        capacity: usize,
        prec_bits: usize,
        double: bool,
        recursion_variant: &str,
    ) -> PyResult<Self> {
        let prec = precision(prec_bits, double)?;
        core::ScalingContext::new(&ensemble.0, epsilon, capacity, prec, variant(recursion_variant)?)
            .map(PyScalingContext)
            .map_err(err)
    }

    #[getter]
    fn capacity(&self) -> usize {
        self.0.capacity()
    }

    #[getter]
    fn working_bits(&self) -> usize {
        self.0.working_bits()
    }

    fn gamma(&mut self, t: usize) -> PyResult<f64> {
        self.0.gamma(t).map(|v| v.to_f64()).map_err(err)
    }

    fn beta(&self, t: usize) -> PyResult<f64> {
        self.0.beta(t).map(|v| v.to_f64()).map_err(err)
    }

    fn alpha(&mut self, t: usize) -> PyResult<PyAlphaResult> {
        self.0.alpha(t).map(Into::into).map_err(err)
    }
}

/// Density evolution; returns `(P, Q)` indexed by iteration, with `P[0] = 1`
/// and `Q[0] = None`.
#[pyfunction]
fn density_evolution(ensemble: &PyEnsemble, epsilon: f64, iters: usize) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
    let trace = core::evolve(&ensemble.0, epsilon, iters).map_err(err)?;
    let q = std::iter::once(None).chain(trace.q_values().iter().copied().map(Some));
    Ok((trace.p_values().to_vec(), q.collect()))
}

#[pyfunction]
fn pb_infinite(ensemble: &PyEnsemble, epsilon: f64, iters: usize) -> PyResult<f64> {
    core::pb_infinite(&ensemble.0, epsilon, iters).map_err(err)
}

#[pyfunction]
fn threshold(ensemble: &PyEnsemble) -> f64 {
    core::threshold(&ensemble.0)
}

#[pyfunction]
#[pyo3(signature = (ensemble, epsilon, t, prec_bits = 256, double = false))]
fn alpha(py: Python<'_>, ensemble: &PyEnsemble, epsilon: f64, t: usize, prec_bits: usize, double: bool) -> PyResult<PyAlphaResult> {
    let prec = precision(prec_bits, double)?;
    let ens = ensemble.0.clone();
    py.detach(|| core::alpha(&ens, epsilon, t, prec))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (ensemble, epsilon, t, prec_bits = 256, double = false))]
fn gamma(py: Python<'_>, ensemble: &PyEnsemble, epsilon: f64, t: usize, prec_bits: usize, double: bool) -> PyResult<f64> {
    let prec = precision(prec_bits, double)?;
    let ens = ensemble.0.clone();
    py.detach(|| core::gamma(&ens, epsilon, t, prec))
        .map(|v| v.to_f64())
        .map_err(err)
}

/// α(ε, t) for t = 0..=t_max from one set of tables.
#[pyfunction]
#[pyo3(signature = (ensemble, epsilon, t_max, prec_bits = 256, double = false))]
fn alpha_sweep(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    epsilon: f64,
    t_max: usize,
    prec_bits: usize,
    double: bool,
) -> PyResult<Vec<PyAlphaResult>> {
    let prec = precision(prec_bits, double)?;
    let ens = ensemble.0.clone();
    let rows = py
        .detach(|| core::alpha_sweep(&ens, epsilon, t_max, prec, RecursionVariant::AsPrinted))
        .map_err(err)?;
    Ok(rows.into_iter().map(Into::into).collect())
}

/// Large-t limit of α. Returns `(status, alpha, t)`, status one of
/// `"converged"`, `"diverged"`, `"inconclusive"`.
#[pyfunction]
#[pyo3(signature = (ensemble, epsilon, t_max = 400, rel_tol = 1e-8, abs_tol = 1e-12, prec_bits = 256))]
fn alpha_limit(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    epsilon: f64,
    t_max: usize,
    rel_tol: f64,
    abs_tol: f64,
    prec_bits: usize,
) -> PyResult<(&'static str, f64, usize)> {
    let prec = precision(prec_bits, false)?;
    let opts = LimitOptions {
        t_max,
        rel_tol,
        abs_tol,
        ..LimitOptions::default()
    };
    let ens = ensemble.0.clone();
    let res = py.detach(|| core::alpha_limit(&ens, epsilon, prec, opts)).map_err(err)?;
    let status = match res.outcome {
        LimitOutcome::Converged(_) => "converged",
        LimitOutcome::Diverged { .. } => "diverged",
        LimitOutcome::Inconclusive => "inconclusive",
    };
    let last = res.last();
    Ok((status, last.alpha.to_f64(), last.t))
}

#[pyfunction]
fn errorfloor_coefficient(ensemble: &PyEnsemble, epsilon: f64) -> PyResult<f64> {
    core::errorfloor_coefficient(&ensemble.0, epsilon).map_err(err)
}

/// Monte Carlo bit erasure rate; returns `(pb_hat, stderr)` indexed by iteration.
#[pyfunction]
#[pyo3(signature = (ensemble, n, epsilon, t, trials = 10_000, seed = 1))]
fn simulate(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    n: usize,
    epsilon: f64,
    t: usize,
    trials: u64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let ens = ensemble.0.clone();
    let res = py
        .detach(|| core::monte_carlo(&ens, n, epsilon, t, trials, seed))
        .map_err(err)?;
    Ok((res.pb_hat, res.stderr))
}

/// Exact ensemble average of the bit erasure rate for a tiny (l, r)-regular code.
#[pyfunction]
fn exact(l: u32, r: u32, n: usize, epsilon: f64, t: usize) -> PyResult<f64> {
    core::exact_small_ensemble(l, r, n, epsilon, t).map_err(err)
}

#[pymodule]
pub fn ldpc_scaling_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyAlphaResult>()?;
    m.add_class::<PyScalingContext>()?;
    m.add_function(wrap_pyfunction!(density_evolution, m)?)?;
    m.add_function(wrap_pyfunction!(pb_infinite, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_limit, m)?)?;
    m.add_function(wrap_pyfunction!(errorfloor_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(exact, m)?)?;
    Ok(())
}
