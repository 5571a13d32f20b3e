//! Oracle calls inside circuits.
//!
//! A circuit refers to oracles by string id; the concrete implementations are
//! supplied at run time through [`OracleBindings`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use num_complex::Complex64 as C64;

use super::density::DensityMatrix;
use super::gates::Gate;
use super::state::PureState;
use crate::error::{Error, Result};

/// XOR-linear structure of an oracle: output wire `o` is flipped by input wire
/// `i` for every pair `(i, o)`. Local wire numbering, `x` register first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearXor {
    pub pairs: Vec<(usize, usize)>,
}

/// A quantum operation usable as a circuit step.
pub trait QuantumOracle: Send + Sync {
    /// Number of circuit wires the oracle acts on.
    fn n_wires(&self) -> usize;

    /// Applies the oracle in a pure-state trajectory. Channels that are not
    /// unitary may sample a Kraus branch from `rng`.
    fn apply_pure(&self, state: &mut PureState, wires: &[usize], rng: &mut dyn RngCore) -> Result<()>;

    /// Applies the oracle channel exactly.
    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()>;

    /// `Some` if the oracle is a CNOT network, enabling Pauli-frame sampling.
    fn as_linear(&self) -> Option<LinearXor> {
        None
    }

    fn label(&self) -> String;
}

impl fmt::Debug for dyn QuantumOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuantumOracle({})", self.label())
    }
}

/// Maps oracle ids used in circuits to implementations.
#[derive(Clone, Default, Debug)]
pub struct OracleBindings {
    map: BTreeMap<String, Arc<dyn QuantumOracle>>,
}

impl OracleBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: impl Into<String>, oracle: Arc<dyn QuantumOracle>) -> Self {
        self.insert(id, oracle);
        self
    }

    pub fn insert(&mut self, id: impl Into<String>, oracle: Arc<dyn QuantumOracle>) {
        self.map.insert(id.into(), oracle);
    }

    pub fn get(&self, id: &str) -> Result<&Arc<dyn QuantumOracle>> {
        self.map.get(id).ok_or_else(|| Error::UnboundOracle(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

/// Oracle given by an explicit signed permutation of its local basis.
pub struct TableOracle {
    label: String,
    n_wires: usize,
    table: Vec<(u64, f64)>,
    linear: Option<LinearXor>,
}

impl TableOracle {
    /// `table[l] = (image, sign)` must be a permutation with `sign = +-1`.
    pub fn new(label: impl Into<String>, n_wires: usize, table: Vec<(u64, f64)>) -> Result<Self> {
        if table.len() != 1usize << n_wires {
            return Err(Error::DimensionMismatch(1 << n_wires, table.len()));
        }
        let mut hit = vec![false; table.len()];
        for &(dst, sign) in &table {
            if sign.abs() != 1.0 || dst as usize >= table.len() || std::mem::replace(&mut hit[dst as usize], true) {
                return Err(Error::invalid("oracle table is not a signed permutation"));
            }
        }
        Ok(TableOracle {
            label: label.into(),
            n_wires,
            table,
            linear: None,
        })
    }

    /// Declares the table's XOR-linear structure (trusted by the caller).
    pub fn with_linear(mut self, linear: LinearXor) -> Self {
        self.linear = Some(linear);
        self
    }

    pub fn table(&self) -> &[(u64, f64)] {
        &self.table
    }
}

impl QuantumOracle for TableOracle {
    fn n_wires(&self) -> usize {
        self.n_wires
    }

    fn apply_pure(&self, state: &mut PureState, wires: &[usize], _rng: &mut dyn RngCore) -> Result<()> {
        check_wires(self.n_wires, wires)?;
        state.apply_basis_map(wires, &self.table)
    }

    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        check_wires(self.n_wires, wires)?;
        rho.apply_basis_map(wires, &self.table)
    }

    fn as_linear(&self) -> Option<LinearXor> {
        self.linear.clone()
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// A fixed one- or two-qubit unitary used as an oracle.
#[derive(Clone, Debug)]
pub struct GateOracle {
    label: String,
    n_wires: usize,
    matrix: Vec<C64>,
}

impl GateOracle {
    pub fn new(label: impl Into<String>, n_wires: usize, matrix: Vec<C64>) -> Result<Self> {
        if !(1..=2).contains(&n_wires) {
            return Err(Error::invalid("gate oracles act on one or two wires"));
        }
        // validates shape and unitarity once
        Gate::unitary((0..n_wires).collect(), matrix.clone())?;
        Ok(GateOracle {
            label: label.into(),
            n_wires,
            matrix,
        })
    }

    fn gate(&self, wires: &[usize]) -> Result<Gate> {
        check_wires(self.n_wires, wires)?;
        Gate::unitary(wires.to_vec(), self.matrix.clone())
    }
}

impl QuantumOracle for GateOracle {
    fn n_wires(&self) -> usize {
        self.n_wires
    }

    fn apply_pure(&self, state: &mut PureState, wires: &[usize], _rng: &mut dyn RngCore) -> Result<()> {
        state.apply_gate(&self.gate(wires)?)
    }

    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        rho.apply_gate(&self.gate(wires)?)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Errors unless `wires.len() == expected`.
pub fn check_wires(expected: usize, wires: &[usize]) -> Result<()> {
    if wires.len() != expected {
        return Err(Error::WireMismatch {
            expected,
            got: wires.len(),
        });
    }
    Ok(())
}
