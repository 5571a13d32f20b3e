//! Hybrid algorithms run as learning trees.
//!
//! A [`Controller`] looks at the transcript so far and either queries the
//! classical oracle, launches a noisy circuit, or stops with an answer. The
//! harness executes those actions against an [`OracleAccess`], records each
//! edge, and counts queries: one per classical query and one per oracle call
//! inside every circuit run.
//!
//! [`run_controller`] samples a single root-to-leaf path. The `k`-th circuit
//! run draws from stream `k` of the master seed, which is what lets a
//! controller reproduce the standalone algorithms bit for bit.
//! [`exact_leaf_distribution`] enumerates the whole tree instead.

mod controllers;
mod tree;

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::oracles::ClassicalOracle;
use crate::qsim::{sample_with_rng, trajectory_rng, NoiseRate, NoisyCircuit, OracleBindings};

pub use controllers::{BvController, FixedCircuitController, RandomDepth2Controller};
pub use tree::{
    exact_leaf_distribution, lecam_advantage, perturbation_check, sampled_leaf_distribution, LeCamMode, LeCamReport,
    Leaf, LeafDistribution, PerturbationReport, LECAM_THRESHOLD, MAX_LEAVES,
};

/// Default cap on actions along one path.
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// What the controller does next.
#[derive(Clone, Debug)]
pub enum Action {
    ClassicalQuery(u64),
    RunCircuit(NoisyCircuit),
    Output(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Edge {
    Classical { x: u64, y: u64 },
    Circuit { circuit_id: String, outcome: u64 },
}

/// Edges of one root-to-leaf path, in execution order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transcript {
    edges: Vec<Edge>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn push(&mut self, edge: Edge) {
        self.edges.push(edge);
    }

    /// Number of circuit runs so far.
    pub fn circuit_runs(&self) -> usize {
        self.edges.iter().filter(|e| matches!(e, Edge::Circuit { .. })).count()
    }

    /// Outcomes of the circuit runs so far.
    pub fn outcomes(&self) -> Vec<u64> {
        self.edges
            .iter()
            .filter_map(|e| match e {
                Edge::Circuit { outcome, .. } => Some(*outcome),
                Edge::Classical { .. } => None,
            })
            .collect()
    }

    fn extended(&self, edge: Edge) -> Self {
        let mut t = self.clone();
        t.push(edge);
        t
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match e {
                Edge::Classical { x, y } => write!(f, "q({x})={y}")?,
                Edge::Circuit { circuit_id, outcome } => write!(f, "c[{circuit_id}]={outcome}")?,
            }
        }
        Ok(())
    }
}

/// Step function of a hybrid algorithm. Must be deterministic in
/// `(transcript, controller_seed)`.
pub trait Controller: Send + Sync {
    fn next_action(&self, transcript: &Transcript, controller_seed: u64) -> Result<Action>;
}

impl<F> Controller for F
where
    F: Fn(&Transcript, u64) -> Result<Action> + Send + Sync,
{
    fn next_action(&self, transcript: &Transcript, controller_seed: u64) -> Result<Action> {
        self(transcript, controller_seed)
    }
}

/// The oracle an algorithm is run against: a classical function for direct
/// queries and quantum bindings for circuit oracle steps.
#[derive(Clone, Debug, Default)]
pub struct OracleAccess {
    pub classical: Option<ClassicalOracle>,
    pub bindings: OracleBindings,
}

impl OracleAccess {
    pub fn quantum(bindings: OracleBindings) -> Self {
        OracleAccess {
            classical: None,
            bindings,
        }
    }

    fn answer(&self, x: u64) -> Result<u64> {
        self.classical
            .as_ref()
            .map(|o| o.peek(x))
            .ok_or_else(|| Error::invalid("controller made a classical query but no classical oracle is bound"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Noise rate applied to every circuit the controller launches.
    pub lambda: NoiseRate,
    pub seed: u64,
    pub controller_seed: u64,
    pub step_budget: usize,
    /// Circuits deeper than this are rejected; `None` means no cap.
    pub max_depth: Option<usize>,
}

impl RunConfig {
    pub fn new(lambda: NoiseRate, seed: u64) -> Self {
        RunConfig {
            lambda,
            seed,
            controller_seed: 0,
            step_budget: DEFAULT_STEP_BUDGET,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub transcript: Transcript,
    pub answer: u64,
    /// Classical queries plus oracle calls inside circuits.
    pub queries: u64,
    /// One unit per classical query plus `n * depth` per circuit run.
    pub query_time: u64,
}

/// Truncated SHA-256 of the circuit's JSON form.
pub fn circuit_id(circuit: &NoisyCircuit) -> String {
    let digest = Sha256::digest(circuit.to_json().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// The circuit with the run's noise rate, after checking the depth cap.
fn prepare(circuit: NoisyCircuit, cfg: &RunConfig) -> Result<NoisyCircuit> {
    if let Some(cap) = cfg.max_depth {
        if circuit.depth() > cap {
            return Err(Error::Capacity {
                backend: "harness depth cap",
                max: cap,
                requested: circuit.depth(),
            });
        }
    }
    Ok(circuit.with_lambda(cfg.lambda))
}

/// Executes one path of the learning tree, sampling circuit outcomes with
/// state-vector trajectories.
pub fn run_controller(c: &dyn Controller, access: &OracleAccess, cfg: &RunConfig) -> Result<RunRecord> {
    let mut transcript = Transcript::new();
    let (mut queries, mut query_time) = (0u64, 0u64);
    for _ in 0..cfg.step_budget {
        match c.next_action(&transcript, cfg.controller_seed)? {
            Action::Output(answer) => {
                return Ok(RunRecord {
                    transcript,
                    answer,
                    queries,
                    query_time,
                })
            }
            Action::ClassicalQuery(x) => {
                let y = access.answer(x)?;
                if let Some(o) = &access.classical {
                    o.counter().increment();
                }
                transcript.push(Edge::Classical { x, y });
                queries += 1;
                query_time += 1;
            }
            Action::RunCircuit(circuit) => {
                let circuit = prepare(circuit, cfg)?;
                let mut rng = trajectory_rng(cfg.seed, transcript.circuit_runs() as u64);
                let outcome = sample_with_rng(&circuit, &access.bindings, &mut rng as &mut dyn RngCore)?;
                queries += circuit.oracle_calls() as u64;
                query_time += (circuit.n_qubits() * circuit.depth()) as u64;
                transcript.push(Edge::Circuit {
                    circuit_id: circuit_id(&circuit),
                    outcome,
                });
            }
        }
    }
    Err(Error::BudgetExhausted(cfg.step_budget))
}
