use num_complex::Complex64 as C64;
use rand::Rng;

use super::gates::{Gate, GateLayer};
use super::kernels;
use super::MAX_PURE_QUBITS;
use crate::error::{Error, Result};

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-9;

/// A state vector over `n` qubits, qubit 0 the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Result<PureState> {
        PureState::basis(n, 0)
    }

    pub fn basis(n: usize, index: u64) -> Result<PureState> {
        check_capacity(n)?;
        let dim = 1usize << n;
        if index as usize >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index as usize] = C64::new(1.0, 0.0);
        Ok(PureState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<PureState> {
        check_capacity(n)?;
        if amps.len() != 1usize << n {
            return Err(Error::DimensionMismatch(1 << n, amps.len()));
        }
        let s = PureState { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(s)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n: usize, mut amps: Vec<C64>) -> Result<PureState> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        PureState::from_amplitudes(n, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.targets() {
            self.check_qubit(q)?;
        }
        self.apply_gate_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_gate_unchecked(&mut self, gate: &Gate) {
        match gate.targets() {
            [q] => kernels::apply_1q(&mut self.amps, self.n, *q, &gate.matrix2()),
            [a, b] => kernels::apply_2q(&mut self.amps, self.n, *a, *b, &gate.matrix4()),
            _ => unreachable!("gates have one or two targets"),
        }
    }

    pub fn apply_layer(&mut self, layer: &GateLayer) -> Result<()> {
        layer.check_range(self.n)?;
        for g in layer.gates() {
            self.apply_gate_unchecked(g);
        }
        Ok(())
    }

    /// Applies Pauli `1 = X`, `2 = Y`, `3 = Z` (anything else is identity).
    pub fn apply_pauli(&mut self, q: usize, pauli: u8) {
        kernels::apply_pauli(&mut self.amps, self.n, q, pauli);
    }

    /// `|l> -> sign(l) |perm(l)>` on the local register `wires`.
    pub fn apply_basis_map(&mut self, wires: &[usize], table: &[(u64, f64)]) -> Result<()> {
        self.check_wires(wires)?;
        if table.len() != 1usize << wires.len() {
            return Err(Error::DimensionMismatch(1 << wires.len(), table.len()));
        }
        kernels::apply_permutation(&mut self.amps, self.n, wires, table);
        Ok(())
    }

    /// Applies a diagonal phase `phase(l)` on the local register `wires`.
    pub fn apply_diagonal(&mut self, wires: &[usize], phase: impl Fn(u64) -> C64) -> Result<()> {
        self.check_wires(wires)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= phase(kernels::gather(i, self.n, wires));
        }
        Ok(())
    }

    /// Moves amplitude `i` to `map(i)`; `map` must be a permutation.
    pub(crate) fn permute(&mut self, map: impl Fn(usize) -> usize) {
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            out[map(i)] = a;
        }
        self.amps = out;
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Computational-basis measurement of all qubits using one uniform draw.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                acc += p;
                if u < acc {
                    return i as u64;
                }
            }
        }
        last_nonzero as u64
    }

    /// Projectively measures `wires`, collapsing and renormalizing the state.
    /// Returns the local outcome (first wire most significant).
    pub fn measure_wires<R: Rng + ?Sized>(&mut self, wires: &[usize], rng: &mut R) -> Result<u64> {
        self.check_wires(wires)?;
        let mut marginal = vec![0.0; 1usize << wires.len()];
        for (i, a) in self.amps.iter().enumerate() {
            marginal[kernels::gather(i, self.n, wires) as usize] += a.norm_sqr();
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = marginal.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for (l, &p) in marginal.iter().enumerate() {
            acc += p;
            if p > 0.0 && u < acc {
                outcome = l;
                break;
            }
        }
        let scale = 1.0 / marginal[outcome].sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if kernels::gather(i, self.n, wires) as usize == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(outcome as u64)
    }

    /// Expands into `self (x) other`, with `other` on the trailing qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_capacity(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState {
            n: self.n + other.n,
            amps,
        })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n,
            });
        }
        Ok(())
    }

    pub(crate) fn check_wires(&self, wires: &[usize]) -> Result<()> {
        check_distinct(wires, self.n)
    }
}

pub fn check_distinct(wires: &[usize], n: usize) -> Result<()> {
    let mut seen = 0u128;
    for &w in wires {
        if w >= n {
            return Err(Error::QubitOutOfRange {
                index: w,
                n_qubits: n,
            });
        }
        if seen >> w & 1 == 1 {
            return Err(Error::DepthViolation { qubit: w });
        }
        seen |= 1 << w;
    }
    Ok(())
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("a state needs at least one qubit"));
    }
    if n > MAX_PURE_QUBITS {
        return Err(Error::Capacity {
            backend: "state-vector",
            max: MAX_PURE_QUBITS,
            requested: n,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &PureState, b: &[C64]) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn x_on_qubit_zero_sets_msb() {
        let mut s = PureState::new(2).unwrap();
        s.apply_gate(&Gate::x(0)).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn hadamard_and_bell() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        let mut s = PureState::new(1).unwrap();
        s.apply_gate(&Gate::h(0)).unwrap();
        assert!(close(&s, &[h, h]));

        let mut b = PureState::new(2).unwrap();
        b.apply_gate(&Gate::h(0)).unwrap();
        b.apply_gate(&Gate::cnot(0, 1)).unwrap();
        assert!(close(&b, &[h, z, z, h]));
    }

    #[test]
    fn out_of_range_and_overlap_errors() {
        let mut s = PureState::new(2).unwrap();
        assert!(matches!(s.apply_gate(&Gate::x(2)), Err(Error::QubitOutOfRange { .. })));
        let layer = GateLayer::new(vec![Gate::x(0), Gate::cnot(1, 4)]).unwrap();
        assert!(s.apply_layer(&layer).is_err());
        assert!(matches!(PureState::new(MAX_PURE_QUBITS + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn measure_wires_collapses() {
        let mut s = PureState::new(2).unwrap();
        s.apply_gate(&Gate::h(0)).unwrap();
        s.apply_gate(&Gate::cnot(0, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = s.measure_wires(&[1], &mut rng).unwrap();
        let expected = if out == 1 { 3 } else { 0 };
        assert!((s.probabilities()[expected] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_map_swaps_and_signs() {
        let mut s = PureState::basis(3, 0b010).unwrap();
        // local register [1, 2]: |10> -> -|01>
        let table = vec![(0, 1.0), (2, 1.0), (1, -1.0), (3, 1.0)];
        s.apply_basis_map(&[1, 2], &table).unwrap();
        assert!((s.amplitudes()[0b001] + 1.0).norm() < 1e-15);
    }
}
