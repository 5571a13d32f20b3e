use rand::Rng;

use super::grover::{grover_circuit, GROVER_ORACLE};
use crate::error::{Error, Result};
use crate::metrics::CheckReport;
use crate::oracles::{make_grover_phase, GroverOracle};
use crate::qsim::random::random_layer;
use crate::qsim::{noiseless_state, CircuitStep, NoiseRate, NoisyCircuit, OracleBindings};

/// Noiseless output states for every Grover oracle `O_0 ... O_N` plugged into
/// `template` under `oracle_id`, and `sum_i ||phi_i - phi_0||^2` against `4 T^2`.
pub fn check_zalka_sum(template: &NoisyCircuit, oracle_id: &str, n_search: u64) -> Result<CheckReport> {
    let t = template
        .steps()
        .iter()
        .filter(|s| matches!(s, CircuitStep::Oracle(c) if c.id == oracle_id))
        .count();
    let state = |marked: u64| -> Result<_> {
        let g = GroverOracle::new(n_search, marked)?;
        noiseless_state(template, &OracleBindings::new().with(oracle_id, make_grover_phase(&g)))
    };
    let phi0 = state(0)?;
    let mut sum = 0.0;
    for i in 1..=n_search {
        let phi = state(i)?;
        sum += phi
            .amplitudes()
            .iter()
            .zip(phi0.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
    }
    let bound = 4.0 * (t * t) as f64;
    Ok(CheckReport::le("sum_i ||phi_i - phi_0||^2 <= 4 T^2", sum, bound, 1e-9)
        .with_note(format!("N = {n_search}, T = {t}")))
}

/// Noiseless Grover template with `t` queries.
pub fn grover_template(n_search: u64, t: usize) -> Result<NoisyCircuit> {
    let g = GroverOracle::new(n_search, 0)?;
    grover_circuit(&g, t, NoiseRate::ZERO)
}

/// Random layers interleaved with `t` oracle calls on the first
/// `ceil(log2 N)` qubits of an `n_qubits` register.
pub fn random_query_template<R: Rng + ?Sized>(
    n_search: u64,
    n_qubits: usize,
    t: usize,
    rng: &mut R,
) -> Result<NoisyCircuit> {
    let k = GroverOracle::new(n_search, 0)?.wires();
    if n_qubits < k {
        return Err(Error::invalid(format!("template needs at least {k} qubits")));
    }
    let mut c = NoisyCircuit::new(n_qubits, NoiseRate::ZERO)?;
    c.push_layer(random_layer(n_qubits, rng))?;
    for _ in 0..t {
        c.oracle(GROVER_ORACLE, (0..k).collect())?;
        c.push_layer(random_layer(n_qubits, rng))?;
    }
    Ok(c)
}
