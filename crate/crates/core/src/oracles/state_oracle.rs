use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::QueryCounter;
use crate::error::{Error, Result};
use crate::qsim::{check_wires, DensityMatrix, Gate, PureState, QuantumOracle};

/// A tensor product of single-qubit Paulis, `0 = I`, `1 = X`, `2 = Y`, `3 = Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<u8>);

impl PauliString {
    pub fn new(ops: Vec<u8>) -> Result<Self> {
        if ops.is_empty() || ops.iter().any(|&p| p > 3) {
            return Err(Error::invalid("Pauli string needs at least one entry, each in 0..=3"));
        }
        Ok(PauliString(ops))
    }

    /// `Z` on every one of `n` qubits.
    pub fn all_z(n: usize) -> Self {
        PauliString(vec![3; n])
    }

    /// `Z` on the first `weight` qubits and identity on the rest.
    pub fn z_prefix(n: usize, weight: usize) -> Self {
        PauliString((0..n).map(|q| if q < weight { 3 } else { 0 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[u8] {
        &self.0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != 0).count()
    }

    /// `P |c> = phase(c) |c xor flip_mask>`; returns `(flip_mask, phase)`.
    pub fn act(&self, c: u64) -> (u64, C64) {
        let n = self.0.len();
        let mut mask = 0u64;
        let mut phase = C64::new(1.0, 0.0);
        for (q, &p) in self.0.iter().enumerate() {
            let b = 1u64 << (n - 1 - q);
            let bit = c & b != 0;
            match p {
                1 => mask |= b,
                2 => {
                    mask |= b;
                    phase *= if bit { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
                }
                3 if bit => phase = -phase,
                _ => {}
            }
        }
        (mask, phase)
    }

    /// Dense row-major matrix.
    pub fn matrix(&self) -> Vec<C64> {
        let dim = 1usize << self.0.len();
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            let (mask, phase) = self.act(c as u64);
            m[(c ^ mask as usize) * dim + c] = phase;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &p in &self.0 {
            f.write_str(["I", "X", "Y", "Z"][p as usize])?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                _ => Err(Error::invalid(format!("invalid Pauli {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(ops)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The state an oracle loads into its register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    MaximallyMixed { n: usize },
    /// `(I + sign * P) / 2^n` with `sign` in `{0, 1}`.
    Pauli { sign: u8, pauli: PauliString },
}

/// Channel that traces out its register and loads a fresh copy of a state.
pub struct StateOracle {
    kind: StateKind,
    counter: QueryCounter,
}

impl StateOracle {
    pub fn new(kind: StateKind) -> Result<Self> {
        match &kind {
            StateKind::MaximallyMixed { n } if *n == 0 => return Err(Error::invalid("empty state register")),
            StateKind::Pauli { sign, pauli } => {
                if *sign > 1 {
                    return Err(Error::invalid("sign must be 0 or 1"));
                }
                if *sign == 1 && pauli.weight() == 0 {
                    return Err(Error::invalid("(I + I)/2^n is not a state"));
                }
            }
            _ => {}
        }
        Ok(StateOracle {
            kind,
            counter: QueryCounter::default(),
        })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        StateOracle::new(StateKind::MaximallyMixed { n })
    }

    pub fn pauli(sign: u8, pauli: PauliString) -> Result<Self> {
        StateOracle::new(StateKind::Pauli { sign, pauli })
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            StateKind::MaximallyMixed { n } => *n,
            StateKind::Pauli { pauli, .. } => pauli.len(),
        }
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    /// The loaded state as a density matrix.
    pub fn density(&self) -> Result<DensityMatrix> {
        match &self.kind {
            StateKind::Pauli { sign: 1, pauli } => {
                let dim = 1usize << pauli.len();
                let mut m = pauli.matrix();
                for (i, v) in m.iter_mut().enumerate() {
                    if i / dim == i % dim {
                        *v += 1.0;
                    }
                    *v /= dim as f64;
                }
                DensityMatrix::from_matrix(pauli.len(), m)
            }
            _ => DensityMatrix::maximally_mixed(self.n()),
        }
    }
}

impl QuantumOracle for StateOracle {
    fn n_wires(&self) -> usize {
        self.n()
    }

    /// Measures and resets the register, then prepares a uniformly random
    /// element of an eigenbasis of the loaded state (all eigenvalues equal).
    fn apply_pure(&self, state: &mut PureState, wires: &[usize], rng: &mut dyn RngCore) -> Result<()> {
        check_wires(self.n(), wires)?;
        let n = wires.len();
        let outcome = state.measure_wires(wires, rng)?;
        let mut z: u64 = rng.random::<u64>() & crate::bits::low_mask(n);
        let support: Vec<usize> = match &self.kind {
            StateKind::Pauli { sign: 1, pauli } => (0..n).filter(|&j| pauli.ops()[j] != 0).collect(),
            _ => Vec::new(),
        };
        if let Some(&first) = support.first() {
            let parity = support.iter().map(|&j| (z >> (n - 1 - j)) & 1).sum::<u64>() & 1;
            z ^= parity << (n - 1 - first);
        }
        for (j, &w) in wires.iter().enumerate() {
            if ((outcome ^ z) >> (n - 1 - j)) & 1 == 1 {
                state.apply_pauli(w, 1);
            }
        }
        if let StateKind::Pauli { sign: 1, pauli } = &self.kind {
            for &j in &support {
                let w = wires[j];
                match pauli.ops()[j] {
                    1 => state.apply_gate(&Gate::h(w))?,
                    2 => {
                        state.apply_gate(&Gate::h(w))?;
                        state.apply_gate(&Gate::s(w))?;
                    }
                    _ => {}
                }
            }
        }
        self.counter.increment();
        Ok(())
    }

    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        check_wires(self.n(), wires)?;
        *rho = rho.replace_register(wires, &self.density()?)?;
        self.counter.increment();
        Ok(())
    }

    fn label(&self) -> String {
        match &self.kind {
            StateKind::MaximallyMixed { n } => format!("state(I/2^{n})"),
            StateKind::Pauli { sign, pauli } => format!("state((I + {sign} {pauli})/2^n)"),
        }
    }
}
