//! Noisy quantum circuit simulation and experiments on hybrid
//! quantum-classical algorithms under depolarizing noise.
//!
//! Modules, bottom-up:
//!
//! * [`qsim`]: exact and sampled simulation of noisy circuits;
//! * [`metrics`]: distances, entropies and decay checks;
//! * [`oracles`]: classical and quantum oracle constructions;
//! * [`codes`]: concatenated classical codes and their decoders;
//! * [`algorithms`]: noisy Bernstein-Vazirani, Grover, shadow and parity experiments;
//! * [`harness`]: hybrid controllers run as learning trees.

pub mod algorithms;
pub mod bits;
pub mod codes;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod oracles;
pub mod qsim;

pub use error::{Error, Result};
