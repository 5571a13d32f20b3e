use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::{make_grover_phase, GroverOracle};
use crate::qsim::{
    exact_output_distribution, sample_shots, Gate, GateLayer, NoiseRate, NoisyCircuit, OracleBindings,
};

/// Oracle id used by [`grover_circuit`].
pub const GROVER_ORACLE: &str = "grover";

/// Packs gates into depth-1 layers as early as their qubits allow, keeping
/// the relative order of gates that share a qubit.
pub fn schedule_asap(n: usize, gates: Vec<Gate>) -> Result<Vec<GateLayer>> {
    let mut free_at = vec![0usize; n];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for g in gates {
        let slot = g.targets().iter().map(|&q| free_at[q]).max().unwrap_or(0);
        for &q in g.targets() {
            free_at[q] = slot + 1;
        }
        if layers.len() <= slot {
            layers.resize_with(slot + 1, Vec::new);
        }
        layers[slot].push(g);
    }
    layers.into_iter().map(GateLayer::new).collect()
}

/// Gates for `Z` controlled on all of `qubits`, from the phase polynomial
/// `pi x_1 ... x_k = sum_S (-1)^(|S|+1) pi / 2^(k-1) parity_S(x)`.
///
/// Each parity term folds its CNOT ladder into one two-qubit parity phase.
pub fn multi_controlled_z(qubits: &[usize]) -> Vec<Gate> {
    let k = qubits.len();
    match k {
        0 => return Vec::new(),
        1 => return vec![Gate::z(qubits[0])],
        2 => return vec![Gate::cz(qubits[0], qubits[1])],
        _ => {}
    }
    let scale = PI / (1u64 << (k - 1)) as f64;
    let mut gates = Vec::new();
    for mask in 1u32..1 << k {
        let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| qubits[i]).collect();
        let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };
        let theta = sign * scale;
        match members.as_slice() {
            [q] => gates.push(Gate::phase(*q, theta)),
            [rest @ .., a, t] => {
                for &c in rest {
                    gates.push(Gate::cnot(c, *t));
                }
                gates.push(Gate::parity_phase(*a, *t, theta));
                for &c in rest.iter().rev() {
                    gates.push(Gate::cnot(c, *t));
                }
            }
            [] => unreachable!(),
        }
    }
    gates
}

/// Standard Grover circuit on `k = ceil(log2 N)` qubits with `t` iterations.
///
/// One iteration is the phase oracle followed by the diffusion
/// `H X . MCZ . X H`, with the multi-controlled `Z` scheduled into layers.
pub fn grover_circuit(g: &GroverOracle, t: usize, lambda: NoiseRate) -> Result<NoisyCircuit> {
    let k = g.wires();
    let reg: Vec<usize> = (0..k).collect();
    let mut c = NoisyCircuit::new(k, lambda)?;
    c.layer(reg.iter().map(|&q| Gate::h(q)).collect())?;
    let mcz = schedule_asap(k, multi_controlled_z(&reg))?;
    for _ in 0..t {
        c.oracle(GROVER_ORACLE, reg.clone())?;
        c.layer(reg.iter().map(|&q| Gate::h(q).then(&Gate::x(q))).collect::<Result<_>>()?)?;
        for layer in &mcz {
            c.push_layer(layer.clone())?;
        }
        c.layer(reg.iter().map(|&q| Gate::x(q).then(&Gate::h(q))).collect::<Result<_>>()?)?;
    }
    Ok(c)
}

/// `sin^2((2T + 1) arcsin(N^(-1/2)))`.
pub fn grover_closed_form(n_search: u64, t: usize) -> f64 {
    ((2 * t + 1) as f64 * (1.0 / (n_search as f64).sqrt()).asin()).sin().powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroverResult {
    pub success: f64,
    /// Binomial standard error of `success`.
    pub std_error: f64,
    pub shots: usize,
    pub iterations: usize,
    /// Circuit depth including oracle calls.
    pub depth: usize,
    pub queries: u64,
}

fn check_power_of_two(g: &GroverOracle) -> Result<u64> {
    if !g.n_search.is_power_of_two() {
        return Err(Error::invalid(format!("search size {} is not a power of two", g.n_search)));
    }
    g.marked_state().ok_or_else(|| Error::invalid("success needs a marked element"))
}

/// Fraction of `shots` trajectories that measure the marked element.
pub fn run_noisy_grover(g: &GroverOracle, lambda: NoiseRate, t: usize, shots: usize, seed: u64) -> Result<GroverResult> {
    let target = check_power_of_two(g)?;
    let circuit = grover_circuit(g, t, lambda)?;
    let oracle = make_grover_phase(g);
    let bindings = OracleBindings::new().with(GROVER_ORACLE, oracle.clone());
    let samples = sample_shots(&circuit, &bindings, shots, seed)?;
    let success = samples.iter().filter(|&&x| x == target).count() as f64 / shots as f64;
    Ok(GroverResult {
        success,
        std_error: (success * (1.0 - success) / shots as f64).sqrt(),
        shots,
        iterations: t,
        depth: circuit.depth(),
        queries: oracle.counter().get(),
    })
}

/// Exact success probability from the density-matrix backend.
pub fn exact_grover_success(g: &GroverOracle, lambda: NoiseRate, t: usize) -> Result<f64> {
    let target = check_power_of_two(g)?;
    let circuit = grover_circuit(g, t, lambda)?;
    let bindings = OracleBindings::new().with(GROVER_ORACLE, make_grover_phase(g));
    Ok(exact_output_distribution(&circuit, &bindings)?.prob(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::PureState;

    #[test]
    fn mcz_flips_only_all_ones() {
        for k in 1..=5 {
            let qubits: Vec<usize> = (0..k).collect();
            let layers = schedule_asap(k, multi_controlled_z(&qubits)).unwrap();
            for x in 0..1u64 << k {
                let mut s = PureState::basis(k, x).unwrap();
                for l in &layers {
                    s.apply_layer(l).unwrap();
                }
                let amp = s.amplitudes()[x as usize];
                let expected = if x == (1 << k) - 1 { -1.0 } else { 1.0 };
                assert!((amp.re - expected).abs() < 1e-12 && amp.im.abs() < 1e-12, "k={k} x={x} {amp}");
            }
        }
    }

    #[test]
    fn noiseless_matches_closed_form() {
        for (n, t) in [(4u64, 1usize), (8, 2), (16, 3), (16, 1)] {
            for marked in [1, n / 2, n] {
                let g = GroverOracle::new(n, marked).unwrap();
                let p = exact_grover_success(&g, NoiseRate::ZERO, t).unwrap();
                assert!((p - grover_closed_form(n, t)).abs() < 1e-10, "N={n} T={t} p={p}");
            }
        }
        assert!((grover_closed_form(4, 1) - 1.0).abs() < 1e-12);
        assert!((grover_closed_form(16, 3) - 0.9613).abs() < 1e-4);
    }

    #[test]
    fn noise_degrades_and_queries_counted() {
        let g = GroverOracle::new(16, 7).unwrap();
        let clean = exact_grover_success(&g, NoiseRate::ZERO, 3).unwrap();
        let noisy = exact_grover_success(&g, NoiseRate::new(0.1).unwrap(), 3).unwrap();
        assert!(noisy < clean);
        let r = run_noisy_grover(&g, NoiseRate::ZERO, 2, 200, 1).unwrap();
        assert_eq!(r.queries, 400);
        assert!(run_noisy_grover(&GroverOracle::new(6, 1).unwrap(), NoiseRate::ZERO, 1, 10, 1).is_err());
    }
}
