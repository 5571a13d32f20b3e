use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::QueryCounter;
use crate::error::{Error, Result};
use crate::qsim::{check_wires, DensityMatrix, PureState, QuantumOracle};

/// Search problem over `1..=n_search` with one marked element, or none when
/// `marked = 0`.
///
/// Element `i` lives on the basis state `|i mod 2^k>` of a `k = ceil(log2 N)`
/// qubit register, so `i = N` (for power-of-two `N`) is `|0...0>`. Basis
/// states above `N` are padding and are never marked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverOracle {
    pub n_search: u64,
    pub marked: u64,
}

impl GroverOracle {
    pub fn new(n_search: u64, marked: u64) -> Result<Self> {
        if n_search < 2 || n_search > 1 << 24 {
            return Err(Error::invalid(format!("search size {n_search} outside 2..=2^24")));
        }
        if marked > n_search {
            return Err(Error::invalid(format!("marked element {marked} exceeds {n_search}")));
        }
        Ok(GroverOracle { n_search, marked })
    }

    /// Register width.
    pub fn wires(&self) -> usize {
        (64 - (self.n_search - 1).leading_zeros()) as usize
    }

    /// The marked basis state, if any.
    pub fn marked_state(&self) -> Option<u64> {
        (self.marked != 0).then(|| self.marked % (1 << self.wires()))
    }
}

/// Diagonal phase oracle `(-1)^{[x = i]}`.
pub struct GroverPhase {
    spec: GroverOracle,
    counter: QueryCounter,
}

impl GroverPhase {
    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    fn phase(&self) -> impl Fn(u64) -> C64 {
        let target = self.spec.marked_state();
        move |x| if Some(x) == target { C64::new(-1.0, 0.0) } else { C64::new(1.0, 0.0) }
    }
}

pub fn make_grover_phase(g: &GroverOracle) -> Arc<GroverPhase> {
    Arc::new(GroverPhase {
        spec: *g,
        counter: QueryCounter::default(),
    })
}

impl QuantumOracle for GroverPhase {
    fn n_wires(&self) -> usize {
        self.spec.wires()
    }

    fn apply_pure(&self, state: &mut PureState, wires: &[usize], _rng: &mut dyn RngCore) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        self.counter.increment();
        if self.spec.marked == 0 {
            return crate::qsim::check_register(wires, state.n_qubits());
        }
        state.apply_diagonal(wires, self.phase())
    }

    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        self.counter.increment();
        if self.spec.marked == 0 {
            return crate::qsim::check_register(wires, rho.n_qubits());
        }
        rho.apply_diagonal(wires, self.phase())
    }

    fn label(&self) -> String {
        format!("grover({}, {})", self.spec.n_search, self.spec.marked)
    }
}
