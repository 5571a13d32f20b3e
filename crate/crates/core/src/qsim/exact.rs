use super::{CircuitStep, DensityMatrix, NoisyCircuit, OracleBindings, OutcomeDistribution};
use crate::error::Result;

/// Evolves the density matrix through the circuit, calling `observe(t, rho)`
/// after the `t`-th noise layer (`t = 1..=depth + 1`).
pub fn evolve_density(
    circuit: &NoisyCircuit,
    bindings: &OracleBindings,
    mut observe: impl FnMut(usize, &DensityMatrix),
) -> Result<DensityMatrix> {
    circuit.validate()?;
    let lambda = circuit.lambda();
    // resolve every id first so an unbound oracle fails before any work
    for step in circuit.steps() {
        if let CircuitStep::Oracle(call) = step {
            bindings.get(&call.id)?;
        }
    }
    let mut rho = DensityMatrix::new(circuit.n_qubits())?;
    rho.depolarize_all(lambda);
    observe(1, &rho);
    for (t, step) in circuit.steps().iter().enumerate() {
        match step {
            CircuitStep::Layer { gates } => rho.apply_layer(gates)?,
            CircuitStep::Oracle(call) => bindings.get(&call.id)?.apply_density(&mut rho, &call.wires)?,
        }
        rho.depolarize_all(lambda);
        observe(t + 2, &rho);
    }
    Ok(rho)
}

/// Density matrix just before measurement.
pub fn final_density(circuit: &NoisyCircuit, bindings: &OracleBindings) -> Result<DensityMatrix> {
    evolve_density(circuit, bindings, |_, _| {})
}

/// The exact output distribution of a noisy circuit.
pub fn exact_output_distribution(circuit: &NoisyCircuit, bindings: &OracleBindings) -> Result<OutcomeDistribution> {
    let rho = final_density(circuit, bindings)?;
    OutcomeDistribution::from_dense(circuit.n_qubits(), &rho.diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::qsim::{Gate, NoiseRate};

    #[test]
    fn empty_circuit_noiseless() {
        let c = NoisyCircuit::new(3, NoiseRate::ZERO).unwrap();
        let d = exact_output_distribution(&c, &OracleBindings::new()).unwrap();
        assert_eq!(d.prob(0), 1.0);
    }

    #[test]
    fn empty_circuit_single_noise_layer() {
        // T = 0 steps gives exactly one noise layer: p(1) = lambda / 2.
        let c = NoisyCircuit::new(1, NoiseRate::new(0.4).unwrap()).unwrap();
        let d = exact_output_distribution(&c, &OracleBindings::new()).unwrap();
        assert!((d.prob(0) - 0.8).abs() < 1e-15);
        assert!((d.prob(1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn two_noise_layers_compose() {
        // One identity step: two layers, flip probability 2 p (1 - p) with p = lambda/2.
        let mut c = NoisyCircuit::new(1, NoiseRate::new(0.4).unwrap()).unwrap();
        c.layer(vec![Gate::id(0)]).unwrap();
        let d = exact_output_distribution(&c, &OracleBindings::new()).unwrap();
        assert!((d.prob(1) - 0.32).abs() < 1e-15);
    }

    #[test]
    fn unbound_oracle_fails() {
        let mut c = NoisyCircuit::new(1, NoiseRate::ZERO).unwrap();
        c.oracle("missing", vec![0]).unwrap();
        let err = exact_output_distribution(&c, &OracleBindings::new()).unwrap_err();
        assert!(matches!(err, Error::UnboundOracle(_)));
    }

    #[test]
    fn full_noise_gives_uniform() {
        let mut c = NoisyCircuit::new(2, NoiseRate::new(1.0).unwrap()).unwrap();
        c.layer(vec![Gate::h(0), Gate::x(1)]).unwrap();
        let d = exact_output_distribution(&c, &OracleBindings::new()).unwrap();
        for k in 0..4 {
            assert!((d.prob(k) - 0.25).abs() < 1e-15);
        }
    }
}
