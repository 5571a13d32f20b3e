use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fault, CircuitStep, NoisyCircuit, OracleBindings, OutcomeDistribution, PureState};
use crate::error::Result;

/// Independent RNG stream `index` of a master seed.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Applies one unravelled noise layer: per qubit one uniform draw `u`, with
/// X, Y, Z for `u` below `lambda/4`, `lambda/2`, `3 lambda/4` respectively.
pub(crate) fn pauli_noise_draw<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u8 {
    let u: f64 = rng.random();
    let quarter = lambda / 4.0;
    if u < quarter {
        1
    } else if u < 2.0 * quarter {
        2
    } else if u < 3.0 * quarter {
        3
    } else {
        0
    }
}

fn noise_layer<R: Rng + ?Sized>(state: &mut PureState, rng: &mut R, lambda: f64) {
    for q in 0..state.n_qubits() {
        let p = pauli_noise_draw(rng, lambda);
        if p != 0 {
            state.apply_pauli(q, p);
        }
    }
}

/// Runs one trajectory with a caller-provided RNG and returns the outcome.
pub fn sample_with_rng(circuit: &NoisyCircuit, bindings: &OracleBindings, rng: &mut dyn RngCore) -> Result<u64> {
    let lambda = fault::effective_lambda(circuit.lambda().value());
    let mut state = PureState::new(circuit.n_qubits())?;
    noise_layer(&mut state, rng, lambda);
    for step in circuit.steps() {
        match step {
            CircuitStep::Layer { gates } => state.apply_layer(gates)?,
            CircuitStep::Oracle(call) => bindings.get(&call.id)?.apply_pure(&mut state, &call.wires, rng)?,
        }
        noise_layer(&mut state, rng, lambda);
    }
    Ok(state.measure(rng))
}

/// One sample from stream 0 of `seed`.
pub fn sample_trajectory(circuit: &NoisyCircuit, bindings: &OracleBindings, seed: u64) -> Result<u64> {
    sample_with_rng(circuit, bindings, &mut trajectory_rng(seed, 0))
}

/// `shots` samples; shot `k` uses stream `k`, so results do not depend on
/// thread scheduling.
pub fn sample_shots(circuit: &NoisyCircuit, bindings: &OracleBindings, shots: usize, seed: u64) -> Result<Vec<u64>> {
    circuit.validate()?;
    for step in circuit.steps() {
        if let CircuitStep::Oracle(call) = step {
            bindings.get(&call.id)?;
        }
    }
    PureState::new(circuit.n_qubits())?;
    (0..shots as u64)
        .into_par_iter()
        .map(|k| sample_with_rng(circuit, bindings, &mut trajectory_rng(seed, k)))
        .collect()
}

/// Empirical output distribution from `shots` trajectories.
pub fn sample_distribution(
    circuit: &NoisyCircuit,
    bindings: &OracleBindings,
    shots: usize,
    seed: u64,
) -> Result<OutcomeDistribution> {
    let samples = sample_shots(circuit, bindings, shots, seed)?;
    OutcomeDistribution::from_samples(circuit.n_qubits(), &samples)
}

/// Final state of the circuit with noise switched off.
pub fn noiseless_state(circuit: &NoisyCircuit, bindings: &OracleBindings) -> Result<PureState> {
    let mut rng = trajectory_rng(0, 0);
    let mut state = PureState::new(circuit.n_qubits())?;
    for step in circuit.steps() {
        match step {
            CircuitStep::Layer { gates } => state.apply_layer(gates)?,
            CircuitStep::Oracle(call) => bindings.get(&call.id)?.apply_pure(&mut state, &call.wires, &mut rng)?,
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{exact_output_distribution, Gate, NoiseRate};

    fn bell(lambda: f64) -> NoisyCircuit {
        let mut c = NoisyCircuit::new(2, NoiseRate::new(lambda).unwrap()).unwrap();
        c.layer(vec![Gate::h(0)]).unwrap();
        c.layer(vec![Gate::cnot(0, 1)]).unwrap();
        c
    }

    #[test]
    fn deterministic_given_seed() {
        let c = bell(0.3);
        let b = OracleBindings::new();
        let a = sample_shots(&c, &b, 500, 11).unwrap();
        assert_eq!(a, sample_shots(&c, &b, 500, 11).unwrap());
        assert_eq!(a[0], sample_trajectory(&c, &b, 11).unwrap());
        assert_ne!(a, sample_shots(&c, &b, 500, 12).unwrap());
    }

    #[test]
    fn noiseless_bell_only_correlated_outcomes() {
        let samples = sample_shots(&bell(0.0), &OracleBindings::new(), 2000, 1).unwrap();
        assert!(samples.iter().all(|&s| s == 0 || s == 3));
        let ones = samples.iter().filter(|&&s| s == 3).count() as f64 / 2000.0;
        assert!((ones - 0.5).abs() < 0.05);
    }

    #[test]
    fn pauli_weights_reproduce_channel() {
        // Per-qubit flip rate of an unravelled layer is lambda/2 (X or Y).
        let mut rng = trajectory_rng(5, 0);
        let lambda = 0.6;
        let n = 200_000;
        let counts = (0..n).fold([0usize; 4], |mut acc, _| {
            acc[pauli_noise_draw(&mut rng, lambda) as usize] += 1;
            acc
        });
        for (p, &count) in counts.iter().enumerate().skip(1) {
            let f = count as f64 / n as f64;
            assert!((f - lambda / 4.0).abs() < 0.005, "pauli {p}: {f}");
        }
    }

    #[test]
    fn matches_exact_on_bell() {
        let c = bell(0.2);
        let b = OracleBindings::new();
        let exact = exact_output_distribution(&c, &b).unwrap();
        let emp = sample_distribution(&c, &b, 40_000, 3).unwrap();
        assert!(exact.tv(&emp).unwrap() < 0.02);
    }
}
