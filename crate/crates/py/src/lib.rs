//! Python bindings. Circuits cross the boundary as JSON strings and
//! distributions as `{bitstring: probability}` dicts. `lam` is the noise
//! rate (`lambda` is a Python keyword).

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nisqlab_lib::algorithms as alg;
use nisqlab_lib::codes::{code_lemma_checks, BaseCode};
use nisqlab_lib::error::Error;
use nisqlab_lib::metrics::{check_info_decay, CheckReport};
use nisqlab_lib::oracles::{make_bv, GroverOracle, PauliString};
use nisqlab_lib::qsim::{self, NoiseRate, NoisyCircuit, OracleBindings};

create_exception!(nisqlab, CapacityError, PyException, "Problem exceeds a backend's size limit.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Capacity { .. } => CapacityError::new_err(e.to_string()),
        Error::InvalidParameter(_)
        | Error::QubitOutOfRange { .. }
        | Error::DepthViolation { .. }
        | Error::NotUnitary { .. }
        | Error::WireMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::DimensionMismatch(..)
        | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for Result<T, Error> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn rate(lam: f64) -> PyResult<NoiseRate> {
    NoiseRate::new(lam).py()
}

fn circuit(json: &str, lam: Option<f64>) -> PyResult<NoisyCircuit> {
    let mut c = NoisyCircuit::from_json(json).py()?;
    if let Some(l) = lam {
        c.set_lambda(rate(l)?);
    }
    Ok(c)
}

fn report_dict<'py>(py: Python<'py>, r: &CheckReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("claim", &r.claim)?;
    d.set_item("lhs", r.lhs)?;
    d.set_item("rhs", r.rhs)?;
    d.set_item("holds", r.holds)?;
    d.set_item("tolerance", r.tolerance)?;
    d.set_item("note", r.note.clone())?;
    Ok(d)
}

/// Exact output distribution of an oracle-free circuit.
#[pyfunction]
#[pyo3(signature = (circuit_json, lam=None))]
fn exact_distribution(py: Python<'_>, circuit_json: &str, lam: Option<f64>) -> PyResult<BTreeMap<String, f64>> {
    let c = circuit(circuit_json, lam)?;
    let d = py.detach(|| qsim::exact_output_distribution(&c, &OracleBindings::new())).py()?;
    Ok(d.to_labeled())
}

/// Empirical distribution of `shots` noisy trajectories.
#[pyfunction]
#[pyo3(signature = (circuit_json, shots, seed, lam=None))]
fn sample_distribution(
    py: Python<'_>,
    circuit_json: &str,
    shots: usize,
    seed: u64,
    lam: Option<f64>,
) -> PyResult<BTreeMap<String, f64>> {
    let c = circuit(circuit_json, lam)?;
    let d = py.detach(|| qsim::sample_distribution(&c, &OracleBindings::new(), shots, seed)).py()?;
    Ok(d.to_labeled())
}

/// JSON of a random circuit of depth-1 two-qubit layers.
#[pyfunction]
fn random_circuit_json(n: usize, depth: usize, lam: f64, seed: u64) -> PyResult<String> {
    let c = qsim::random::random_circuit(n, depth, rate(lam)?, &mut qsim::trajectory_rng(seed, 0)).py()?;
    Ok(c.to_json())
}

/// `(t, information, bound)` after each noise layer of an oracle-free circuit.
#[pyfunction]
fn info_decay(circuit_json: &str) -> PyResult<Vec<(usize, f64, f64)>> {
    let c = circuit(circuit_json, None)?;
    let r = check_info_decay(&c, &OracleBindings::new()).py()?;
    Ok(r.rows.iter().map(|x| (x.t, x.information, x.bound)).collect())
}

/// `(M, guaranteed_regime)` for automatic BV repetitions.
#[pyfunction]
fn bv_repetitions(n: usize, lam: f64, delta: f64) -> PyResult<(usize, bool)> {
    let r = alg::bv_repetitions(&alg::BvRunConfig {
        n,
        lambda: rate(lam)?,
        delta,
        m: 0,
    })
    .py()?;
    Ok((r.m, r.guaranteed_regime))
}

/// One noisy BV run; `m = 0` picks the repetitions automatically.
#[pyfunction]
#[pyo3(signature = (secret, n, lam, seed, delta=0.01, m=0))]
fn run_noisy_bv<'py>(
    py: Python<'py>,
    secret: u64,
    n: usize,
    lam: f64,
    seed: u64,
    delta: f64,
    m: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = alg::BvRunConfig {
        n,
        lambda: rate(lam)?,
        delta,
        m,
    };
    let oracle = make_bv(secret, n).py()?;
    let out = py.detach(|| alg::run_noisy_bv(&cfg, &oracle, seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("estimate", out.estimate)?;
    d.set_item("repetitions", out.repetitions)?;
    d.set_item("queries", out.queries)?;
    d.set_item("guaranteed_regime", out.guaranteed_regime)?;
    Ok(d)
}

/// `sin^2((2T + 1) arcsin(N^{-1/2}))`.
#[pyfunction]
fn grover_closed_form(n_search: u64, t: usize) -> f64 {
    alg::grover_closed_form(n_search, t)
}

/// Exact success probability of noisy Grover search with marked element `marked` (1..=N).
#[pyfunction]
fn exact_grover_success(n_search: u64, marked: u64, lam: f64, t: usize) -> PyResult<f64> {
    let g = GroverOracle::new(n_search, marked).py()?;
    alg::exact_grover_success(&g, rate(lam)?, t).py()
}

/// Sampled noisy Grover search: success rate, standard error, depth and total queries.
#[pyfunction]
fn run_noisy_grover<'py>(
    py: Python<'py>,
    n_search: u64,
    marked: u64,
    lam: f64,
    t: usize,
    shots: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let g = GroverOracle::new(n_search, marked).py()?;
    let lambda = rate(lam)?;
    let r = py.detach(|| alg::run_noisy_grover(&g, lambda, t, shots, seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("success", r.success)?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("depth", r.depth)?;
    d.set_item("queries", r.queries)?;
    Ok(d)
}

/// Distinguishing `(I + P)/2^n` from `I/2^n` with `queries` noisy copies;
/// exact unless `shots` is given.
#[pyfunction]
#[pyo3(signature = (pauli, lam, queries=1, shots=None, seed=0))]
fn shadow_distinguish<'py>(
    py: Python<'py>,
    pauli: &str,
    lam: f64,
    queries: usize,
    shots: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let p: PauliString = pauli.parse().py()?;
    let mode = match shots {
        Some(shots) => alg::ShadowMode::Sampled { shots },
        None => alg::ShadowMode::Exact,
    };
    let r = alg::shadow_distinguish(&p, rate(lam)?, queries, alg::ShadowStrategy::PauliParity, mode, seed).py()?;
    let d = PyDict::new(py);
    d.set_item("advantage", r.advantage)?;
    d.set_item("trace_distance", r.trace_distance_per_query)?;
    d.set_item("q1", r.q1)?;
    d.set_item("q0", r.q0)?;
    Ok(d)
}

/// Exact output TV between the lifted Simon oracle and the identity.
#[pyfunction]
#[pyo3(signature = (n, lam, secret, queries=1, seed=0))]
fn lifted_simon_tv<'py>(
    py: Python<'py>,
    n: usize,
    lam: f64,
    secret: u64,
    queries: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = alg::lifted_simon_tv_for(n, rate(lam)?, queries, secret, seed).py()?;
    let d = PyDict::new(py);
    d.set_item("tv", r.tv)?;
    d.set_item("bound", r.bound)?;
    d.set_item("holds", r.holds)?;
    Ok(d)
}

/// Noisy parity samples from BV circuits, then brute-force recovery.
#[pyfunction]
fn noisy_parity<'py>(
    py: Python<'py>,
    n: usize,
    secret: u64,
    lam: f64,
    k: usize,
    w_max: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let source = alg::ParitySource::Bv(make_bv(secret, n).py()?);
    let lambda = rate(lam)?;
    let (inst, rec) = py
        .detach(|| {
            let inst = alg::generate_noisy_parity(&source, secret, lambda, k, w_max, samples, seed)?;
            let rec = alg::solve_noisy_parity_bruteforce(&inst, k, w_max)?;
            Ok((inst, rec))
        })
        .py()?;
    let d = PyDict::new(py);
    d.set_item("estimate", rec.estimate)?;
    d.set_item("eta", inst.eta)?;
    d.set_item("recovered", rec.estimate == Some(secret))?;
    Ok(d)
}

/// Structural checks of the concatenated Hamming code sets.
#[pyfunction]
#[pyo3(signature = (trials=10_000, seed=0))]
fn code_checks(py: Python<'_>, trials: usize, seed: u64) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let reports = py.detach(|| code_lemma_checks(&BaseCode::hamming_7_4(), trials, seed)).py()?;
    reports.iter().map(|r| report_dict(py, r)).collect()
}

/// `sum_i ||phi_i - phi_0||^2` against `4 T^2` for the Grover template.
#[pyfunction]
fn zalka_grover(py: Python<'_>, n_search: u64, t: usize) -> PyResult<Bound<'_, PyDict>> {
    let template = alg::grover_template(n_search, t).py()?;
    let r = alg::check_zalka_sum(&template, alg::GROVER_ORACLE, n_search).py()?;
    report_dict(py, &r)
}

#[pymodule]
fn nisqlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add_function(wrap_pyfunction!(exact_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(random_circuit_json, m)?)?;
    m.add_function(wrap_pyfunction!(info_decay, m)?)?;
    m.add_function(wrap_pyfunction!(bv_repetitions, m)?)?;
    m.add_function(wrap_pyfunction!(run_noisy_bv, m)?)?;
    m.add_function(wrap_pyfunction!(grover_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(exact_grover_success, m)?)?;
    m.add_function(wrap_pyfunction!(run_noisy_grover, m)?)?;
    m.add_function(wrap_pyfunction!(shadow_distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(lifted_simon_tv, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_parity, m)?)?;
    m.add_function(wrap_pyfunction!(code_checks, m)?)?;
    m.add_function(wrap_pyfunction!(zalka_grover, m)?)?;
    Ok(())
}
