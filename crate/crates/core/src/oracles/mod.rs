//! Classical and quantum oracles, with unitary liftings usable by [`crate::qsim`].
//!
//! Every oracle carries a [`QueryCounter`] that increments once per classical
//! query or quantum application. Counters are atomic, so one oracle can be
//! shared across parallel trajectories.

mod classical;
mod grover;
mod shuffling;
mod simon;
mod state_oracle;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::QuantumOracle;

pub use classical::{lift_to_unitary, make_bv, make_lifted_simon, ClassicalOracle, LiftedOracle};
pub use grover::{make_grover_phase, GroverOracle, GroverPhase};
pub use shuffling::{Shuffle, ShufflingOracle, DEFAULT_SAMPLES, MAX_LEVEL_BITS};
pub use simon::{make_simon, SimonSpec, TABLE_BITS};
pub use state_oracle::{PauliString, StateKind, StateOracle};

/// Shared, atomically incremented query count.
#[derive(Clone, Debug, Default)]
pub struct QueryCounter(Arc<AtomicU64>);

impl QueryCounter {
    pub fn increment(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn add(&self, k: u64) {
        self.0.fetch_add(k, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Serializable oracle description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OracleSpec {
    Simon {
        n: usize,
        secret: u64,
        #[serde(default)]
        seed: u64,
    },
    Bv {
        n: usize,
        secret: u64,
        #[serde(default)]
        seed: u64,
    },
    Grover {
        n_search: u64,
        marked: u64,
        #[serde(default)]
        seed: u64,
    },
    LiftedSimon {
        n: usize,
        secret: u64,
        #[serde(default)]
        seed: u64,
    },
    State {
        state: StateKind,
        #[serde(default)]
        seed: u64,
    },
    /// Slot `level` of a shuffled Simon function, or every slot when absent.
    Shuffling {
        n: usize,
        secret: u64,
        d: usize,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        level: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
}

impl OracleSpec {
    /// The classical function behind the spec, when there is one.
    pub fn classical(&self) -> Result<Option<ClassicalOracle>> {
        Ok(match *self {
            OracleSpec::Simon { n, secret, seed } => Some(make_simon(&SimonSpec::new(n, secret, seed)?)?),
            OracleSpec::Bv { n, secret, .. } => Some(make_bv(secret, n)?),
            OracleSpec::LiftedSimon { n, secret, seed } => {
                Some(make_lifted_simon(&make_simon(&SimonSpec::new(n, secret, seed)?)?)?)
            }
            _ => None,
        })
    }

    /// The quantum oracle applied at circuit oracle steps.
    pub fn build(&self) -> Result<Arc<dyn QuantumOracle>> {
        match self {
            OracleSpec::Grover { n_search, marked, .. } => {
                Ok(make_grover_phase(&GroverOracle::new(*n_search, *marked)?))
            }
            OracleSpec::State { state, .. } => Ok(Arc::new(StateOracle::new(state.clone())?)),
            OracleSpec::Shuffling {
                n,
                secret,
                d,
                samples,
                level,
                seed,
            } => {
                let f = make_simon(&SimonSpec::new(*n, *secret, *seed)?)?;
                let so = Arc::new(ShufflingOracle::new(&f, *d, *samples, *seed)?);
                match level {
                    Some(i) => so.slot_view(*i),
                    None => Ok(so.full_view()),
                }
            }
            other => other
                .classical()?
                .map(|c| lift_to_unitary(&c))
                .ok_or_else(|| Error::invalid("oracle spec has no quantum form")),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle specs always serialize")
    }
}
