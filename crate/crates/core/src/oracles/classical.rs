use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use super::QueryCounter;
use crate::bits::{index_bit, low_mask};
use crate::error::{Error, Result};
use crate::qsim::kernels::{gather, scatter};
use crate::qsim::{check_wires, DensityMatrix, LinearXor, PureState, QuantumOracle};

type EvalFn = dyn Fn(u64) -> u64 + Send + Sync;

/// A function `{0,1}^n_in -> {0,1}^m_out` on MSB-first integer encodings.
///
/// Clones share the query counter.
#[derive(Clone)]
pub struct ClassicalOracle {
    label: String,
    n_in: usize,
    m_out: usize,
    f: Arc<EvalFn>,
    linear: Option<Vec<(usize, usize)>>,
    counter: QueryCounter,
}

impl fmt::Debug for ClassicalOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalOracle")
            .field("label", &self.label)
            .field("n_in", &self.n_in)
            .field("m_out", &self.m_out)
            .field("queries", &self.counter.get())
            .finish()
    }
}

impl ClassicalOracle {
    pub fn new(
        label: impl Into<String>,
        n_in: usize,
        m_out: usize,
        f: impl Fn(u64) -> u64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if n_in == 0 || n_in > 64 || m_out == 0 || m_out > 64 {
            return Err(Error::invalid(format!("oracle arity {n_in} -> {m_out} outside 1..=64")));
        }
        Ok(ClassicalOracle {
            label: label.into(),
            n_in,
            m_out,
            f: Arc::new(f),
            linear: None,
            counter: QueryCounter::default(),
        })
    }

    /// Oracle given by an explicit value table of length `2^n_in`.
    pub fn from_table(label: impl Into<String>, n_in: usize, m_out: usize, table: Vec<u64>) -> Result<Self> {
        if n_in > 24 || table.len() != 1usize << n_in {
            return Err(Error::DimensionMismatch(1usize << n_in.min(24), table.len()));
        }
        let mask = low_mask(m_out);
        if table.iter().any(|&v| v & !mask != 0) {
            return Err(Error::invalid("table value exceeds output width"));
        }
        ClassicalOracle::new(label, n_in, m_out, move |x| table[x as usize])
    }

    /// Marks the oracle as the linear map `out_j ^= x_i` for each `(i, j)`.
    pub fn with_linear(mut self, pairs: Vec<(usize, usize)>) -> Self {
        self.linear = Some(pairs);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    /// A counted classical query.
    pub fn query(&self, x: u64) -> u64 {
        self.counter.increment();
        self.peek(x)
    }

    /// Evaluates without touching the query counter.
    pub fn peek(&self, x: u64) -> u64 {
        (self.f)(x & low_mask(self.n_in)) & low_mask(self.m_out)
    }

    pub fn queries(&self) -> u64 {
        self.counter.get()
    }

    pub fn reset_queries(&self) {
        self.counter.reset();
    }

    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    pub fn linear_pairs(&self) -> Option<&[(usize, usize)]> {
        self.linear.as_deref()
    }
}

/// `f(x) = <x, s> mod 2` on `n` bits.
pub fn make_bv(s: u64, n: usize) -> Result<ClassicalOracle> {
    if n == 0 || n > 64 || s & !low_mask(n) != 0 {
        return Err(Error::invalid(format!("secret does not fit in {n} bits")));
    }
    let pairs = (0..n).filter(|&i| index_bit(s, n, i)).map(|i| (i, 0)).collect();
    Ok(ClassicalOracle::new(format!("bv({n})"), n, 1, move |x| (x & s).count_ones() as u64 & 1)?.with_linear(pairs))
}

/// `g(x || y) = f(x)` when `y = 0^n`, and `0^n` otherwise.
pub fn make_lifted_simon(f: &ClassicalOracle) -> Result<ClassicalOracle> {
    let n = f.n_in();
    if f.m_out() != n {
        return Err(Error::invalid(format!("lifting needs n -> n, got {n} -> {}", f.m_out())));
    }
    if 2 * n > 64 {
        return Err(Error::invalid("lifted input exceeds 64 bits"));
    }
    let inner = f.clone();
    ClassicalOracle::new(format!("lifted({})", f.label()), 2 * n, n, move |x| {
        if x & low_mask(n) == 0 {
            inner.peek(x >> n)
        } else {
            0
        }
    })
}

/// The unitary `|x>|y> -> |x>|y xor f(x)>` on `n_in + m_out` wires.
pub fn lift_to_unitary(oracle: &ClassicalOracle) -> Arc<dyn QuantumOracle> {
    Arc::new(LiftedOracle {
        oracle: oracle.clone(),
    })
}

pub struct LiftedOracle {
    oracle: ClassicalOracle,
}

impl LiftedOracle {
    fn index_map(&self, n: usize, wires: &[usize]) -> impl Fn(usize) -> usize + '_ {
        let (xs, ys) = wires.split_at(self.oracle.n_in);
        let (xs, ys) = (xs.to_vec(), ys.to_vec());
        move |i| {
            let x = gather(i, n, &xs);
            let y = gather(i, n, &ys);
            scatter(i, n, &ys, y ^ self.oracle.peek(x))
        }
    }
}

impl QuantumOracle for LiftedOracle {
    fn n_wires(&self) -> usize {
        self.oracle.n_in + self.oracle.m_out
    }

    fn apply_pure(&self, state: &mut PureState, wires: &[usize], _rng: &mut dyn RngCore) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        crate::qsim::check_register(wires, state.n_qubits())?;
        state.permute(self.index_map(state.n_qubits(), wires));
        self.oracle.counter.increment();
        Ok(())
    }

    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        crate::qsim::check_register(wires, rho.n_qubits())?;
        rho.permute(self.index_map(rho.n_qubits(), wires));
        self.oracle.counter.increment();
        Ok(())
    }

    fn as_linear(&self) -> Option<LinearXor> {
        let n_in = self.oracle.n_in;
        self.oracle.linear.as_ref().map(|pairs| LinearXor {
            pairs: pairs.iter().map(|&(i, j)| (i, n_in + j)).collect(),
        })
    }

    fn label(&self) -> String {
        format!("U[{}]", self.oracle.label)
    }
}
