//! Noisy circuit simulation.
//!
//! A [`NoisyCircuit`] starts in `|0...0>`, applies a layer of single-qubit
//! depolarizing noise `D(rho) = (1 - lambda) rho + lambda I/2` to every qubit,
//! and then alternates steps (gate layers or oracle calls) with further noise
//! layers before a computational-basis measurement. Qubit 0 is the most
//! significant bit of every outcome index.
//!
//! Three backends produce the same output distribution:
//!
//! * [`exact_output_distribution`] evolves a [`DensityMatrix`];
//! * [`sample_trajectory`] and friends unravel each noise layer into random
//!   Paulis applied to a [`PureState`];
//! * [`FrameSampler`] tracks only the Pauli error frame and works for Clifford
//!   circuits whose noiseless output is a known basis state.

mod circuit;
mod density;
mod distribution;
mod exact;
#[doc(hidden)]
pub mod fault;
mod frame;
mod gates;
pub(crate) mod kernels;
pub mod linalg;
mod oracle;
pub mod random;
mod state;
mod trajectory;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

pub use circuit::{CircuitStep, NoisyCircuit, OracleCall};
pub use density::{DensityMatrix, DENSITY_TOL};
pub use distribution::{OutcomeDistribution, MASS_TOL};
pub use exact::{evolve_density, exact_output_distribution, final_density};
pub use frame::FrameSampler;
pub use gates::{unitarity_deviation, Gate, GateLayer, UNITARY_TOL};
pub use oracle::{check_wires, GateOracle, LinearXor, OracleBindings, QuantumOracle, TableOracle};
pub use state::{check_distinct as check_register, PureState, NORM_TOL};
pub use trajectory::{
    noiseless_state, sample_distribution, sample_shots, sample_trajectory, sample_with_rng, trajectory_rng,
};

/// Largest register the density-matrix backend accepts.
pub const MAX_DENSITY_QUBITS: usize = 11;
/// Largest register the state-vector backend accepts.
pub const MAX_PURE_QUBITS: usize = 24;

/// Depolarizing rate `lambda` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct NoiseRate(f64);

impl NoiseRate {
    pub const ZERO: NoiseRate = NoiseRate(0.0);

    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(NoiseRate(lambda))
        } else {
            Err(Error::invalid(format!("noise rate {lambda} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for NoiseRate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        NoiseRate::new(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<f64> for NoiseRate {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        NoiseRate::new(v)
    }
}
