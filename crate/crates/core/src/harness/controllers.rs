use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;

use super::{Action, Controller, OracleAccess, Transcript};
use crate::algorithms::{bv_circuit, majority_vote, BV_ORACLE};
use crate::error::{Error, Result};
use crate::oracles::{lift_to_unitary, ClassicalOracle};
use crate::qsim::random::{haar_unitary, random_layer};
use crate::qsim::{trajectory_rng, GateOracle, NoiseRate, NoisyCircuit, OracleBindings};

/// Runs a fixed list of circuits and answers with the last outcome (0 if none).
#[derive(Clone, Debug)]
pub struct FixedCircuitController {
    circuits: Vec<NoisyCircuit>,
}

impl FixedCircuitController {
    pub fn new(circuits: Vec<NoisyCircuit>) -> Self {
        FixedCircuitController { circuits }
    }
}

impl Controller for FixedCircuitController {
    fn next_action(&self, t: &Transcript, _: u64) -> Result<Action> {
        let k = t.circuit_runs();
        Ok(match self.circuits.get(k) {
            Some(c) => Action::RunCircuit(c.clone()),
            None => Action::Output(t.outcomes().last().copied().unwrap_or(0)),
        })
    }
}

/// Noisy Bernstein-Vazirani as a controller: `m` one-query runs, then a
/// per-bit majority over the data bits.
#[derive(Clone, Debug)]
pub struct BvController {
    n: usize,
    m: usize,
    circuit: NoisyCircuit,
}

impl BvController {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Ok(BvController {
            n,
            m,
            circuit: bv_circuit(n, NoiseRate::ZERO)?,
        })
    }

    /// Binds `oracle` under the id the BV circuit uses.
    pub fn access(oracle: &ClassicalOracle) -> OracleAccess {
        OracleAccess {
            classical: Some(oracle.clone()),
            bindings: OracleBindings::new().with(BV_ORACLE, lift_to_unitary(oracle)),
        }
    }
}

impl Controller for BvController {
    fn next_action(&self, t: &Transcript, _: u64) -> Result<Action> {
        if t.circuit_runs() < self.m {
            return Ok(Action::RunCircuit(self.circuit.clone()));
        }
        let data: Vec<u64> = t.outcomes().iter().map(|x| x >> 1).collect();
        Ok(Action::Output(majority_vote(&data, self.n)))
    }
}

/// Oracle id used by [`RandomDepth2Controller`].
pub const GATE_ORACLE: &str = "g";

/// Two adaptive circuit runs: the second circuit is drawn from a stream
/// chosen by the first outcome. Each circuit is `depth` random layers with
/// one call to a `width`-qubit gate oracle in the middle. The answer is the
/// XOR of the two outcomes.
#[derive(Clone, Debug)]
pub struct RandomDepth2Controller {
    n: usize,
    depth: usize,
    width: usize,
}

impl RandomDepth2Controller {
    pub fn new(n: usize, depth: usize, width: usize) -> Self {
        RandomDepth2Controller { n, depth, width }
    }

    /// The circuit run at the node `t`.
    pub fn circuit(&self, t: &Transcript, controller_seed: u64) -> Result<NoisyCircuit> {
        if self.width == 0 || self.width > 2 || self.width > self.n {
            return Err(Error::invalid(format!("oracle width {} on {} qubits", self.width, self.n)));
        }
        let stream = t.outcomes().first().map_or(0, |&s| 1 + s);
        let mut rng = trajectory_rng(controller_seed, stream);
        let mut c = NoisyCircuit::new(self.n, NoiseRate::ZERO)?;
        let a = rng.random_range(0..self.n);
        let wires = if self.width == 1 {
            vec![a]
        } else {
            vec![a, (a + 1 + rng.random_range(0..self.n - 1)) % self.n]
        };
        for i in 0..self.depth.max(1) {
            c.push_layer(random_layer(self.n, &mut rng))?;
            if i == self.depth.max(1) / 2 {
                c.oracle(GATE_ORACLE, wires.clone())?;
            }
        }
        Ok(c)
    }

    fn matrix(&self, seed: u64) -> Vec<C64> {
        haar_unitary(1 << self.width, &mut trajectory_rng(seed, u64::MAX - 1))
    }

    fn bind(&self, matrix: Vec<C64>) -> Result<OracleAccess> {
        let g = GateOracle::new(GATE_ORACLE, self.width, matrix)?;
        Ok(OracleAccess::quantum(OracleBindings::new().with(GATE_ORACLE, Arc::new(g))))
    }

    /// Haar-random gate oracle.
    pub fn random_access(&self, seed: u64) -> Result<OracleAccess> {
        self.bind(self.matrix(seed))
    }

    /// The oracle of [`Self::random_access`] multiplied by `diag(e^{i theta k})`.
    pub fn perturbed_access(&self, seed: u64, theta: f64) -> Result<OracleAccess> {
        let dim = 1usize << self.width;
        let mut m = self.matrix(seed);
        for (idx, v) in m.iter_mut().enumerate() {
            *v *= C64::from_polar(1.0, theta * (idx / dim) as f64);
        }
        self.bind(m)
    }
}

impl Controller for RandomDepth2Controller {
    fn next_action(&self, t: &Transcript, controller_seed: u64) -> Result<Action> {
        let outs = t.outcomes();
        if outs.len() < 2 {
            return Ok(Action::RunCircuit(self.circuit(t, controller_seed)?));
        }
        Ok(Action::Output(outs[0] ^ outs[1]))
    }
}
