//! Pauli-frame sampling for Clifford circuits with a deterministic noiseless
//! outcome.
//!
//! Each unravelled noise layer only inserts Paulis, and Clifford steps map
//! Paulis to Paulis, so the measured string is the noiseless outcome XOR the
//! X-part of the propagated error frame. The sampler consumes random numbers
//! in exactly the same order as the state-vector sampler, so for a given seed
//! both return identical samples.

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::trajectory::{pauli_noise_draw, trajectory_rng};
use super::{fault, CircuitStep, Gate, NoisyCircuit, OracleBindings};
use crate::error::{Error, Result};

/// Images of the local generators `X_j`, `Z_j` as `(x, z)` masks over the
/// gate's targets (bit `k - 1 - j` for local qubit `j`).
#[derive(Clone, Debug)]
struct Tableau {
    targets: Vec<usize>,
    x_images: Vec<(u64, u64)>,
    z_images: Vec<(u64, u64)>,
}

#[derive(Clone, Debug)]
enum FrameOp {
    Clifford(Vec<Tableau>),
    Linear(Vec<(usize, usize)>),
}

/// Precompiled Pauli-frame sampler. Supports up to 64 qubits.
#[derive(Clone, Debug)]
pub struct FrameSampler {
    n: usize,
    lambda: f64,
    reference: u64,
    ops: Vec<FrameOp>,
}

impl FrameSampler {
    /// Compiles `circuit`. `reference` must be the circuit's noiseless
    /// outcome, which the caller guarantees is a single basis state.
    pub fn new(circuit: &NoisyCircuit, bindings: &OracleBindings, reference: u64) -> Result<Self> {
        circuit.validate()?;
        let n = circuit.n_qubits();
        if n > 64 {
            return Err(Error::Capacity {
                backend: "pauli-frame",
                max: 64,
                requested: n,
            });
        }
        let mut ops = Vec::with_capacity(circuit.depth());
        for step in circuit.steps() {
            match step {
                CircuitStep::Layer { gates } => {
                    let tabs = gates.gates().iter().map(tableau).collect::<Result<Vec<_>>>()?;
                    ops.push(FrameOp::Clifford(tabs));
                }
                CircuitStep::Oracle(call) => {
                    let oracle = bindings.get(&call.id)?;
                    let lin = oracle.as_linear().ok_or_else(|| {
                        Error::Unsupported(format!("oracle {} has no linear form", oracle.label()))
                    })?;
                    if call.wires.len() != oracle.n_wires() {
                        return Err(Error::WireMismatch {
                            expected: oracle.n_wires(),
                            got: call.wires.len(),
                        });
                    }
                    let pairs = lin.pairs.iter().map(|&(i, o)| (call.wires[i], call.wires[o])).collect();
                    ops.push(FrameOp::Linear(pairs));
                }
            }
        }
        Ok(FrameSampler {
            n,
            lambda: circuit.lambda().value(),
            reference,
            ops,
        })
    }

    /// One sample using the supplied RNG.
    pub fn sample_with_rng(&self, rng: &mut dyn RngCore) -> u64 {
        let lambda = fault::effective_lambda(self.lambda);
        let (mut x, mut z) = (0u64, 0u64);
        self.noise(&mut x, &mut z, rng, lambda);
        for op in &self.ops {
            match op {
                FrameOp::Clifford(tabs) => {
                    for t in tabs {
                        apply_tableau(t, self.n, &mut x, &mut z);
                    }
                }
                FrameOp::Linear(pairs) => {
                    let (x0, z0) = (x, z);
                    for &(i, o) in pairs {
                        x ^= bit(x0, self.n, i) << pos(self.n, o);
                        z ^= bit(z0, self.n, o) << pos(self.n, i);
                    }
                }
            }
            self.noise(&mut x, &mut z, rng, lambda);
        }
        // the state-vector sampler spends one draw on the measurement
        let _: f64 = rng.random();
        self.reference ^ x
    }

    /// `shots` samples, shot `k` from stream `k` of `seed`.
    pub fn sample_shots(&self, shots: usize, seed: u64) -> Vec<u64> {
        (0..shots as u64)
            .into_par_iter()
            .map(|k| self.sample_with_rng(&mut trajectory_rng(seed, k)))
            .collect()
    }

    fn noise(&self, x: &mut u64, z: &mut u64, rng: &mut dyn RngCore, lambda: f64) {
        for q in 0..self.n {
            let b = 1u64 << pos(self.n, q);
            match pauli_noise_draw(rng, lambda) {
                1 => *x ^= b,
                2 => {
                    *x ^= b;
                    *z ^= b;
                }
                3 => *z ^= b,
                _ => {}
            }
        }
    }
}

#[inline]
fn pos(n: usize, q: usize) -> usize {
    n - 1 - q
}

#[inline]
fn bit(v: u64, n: usize, q: usize) -> u64 {
    (v >> pos(n, q)) & 1
}

fn apply_tableau(t: &Tableau, n: usize, x: &mut u64, z: &mut u64) {
    let k = t.targets.len();
    let (mut nx, mut nz) = (0u64, 0u64);
    for (j, &q) in t.targets.iter().enumerate() {
        if bit(*x, n, q) == 1 {
            nx ^= t.x_images[j].0;
            nz ^= t.x_images[j].1;
        }
        if bit(*z, n, q) == 1 {
            nx ^= t.z_images[j].0;
            nz ^= t.z_images[j].1;
        }
    }
    for (j, &q) in t.targets.iter().enumerate() {
        let b = 1u64 << pos(n, q);
        let lb = k - 1 - j;
        *x = (*x & !b) | (((nx >> lb) & 1) << pos(n, q));
        *z = (*z & !b) | (((nz >> lb) & 1) << pos(n, q));
    }
}

/// Matrix of the Pauli string with masks `(x, z)` on `k` local qubits.
fn pauli_matrix(k: usize, x: u64, z: u64) -> Vec<C64> {
    let dim = 1usize << k;
    let mut m = vec![C64::new(0.0, 0.0); dim * dim];
    // P = prod_j X^{x_j} Z^{z_j} (up to phase); P|c> = (-1)^{z.c} |c ^ x>
    for col in 0..dim {
        let sign = if (z & col as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let row = col ^ x as usize;
        m[row * dim + col] = C64::new(sign, 0.0);
    }
    m
}

fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let v = a[i * dim + k];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += v * b[k * dim + j];
            }
        }
    }
    out
}

fn dagger(a: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

/// Conjugation table of a gate, or an error if it is not Clifford.
fn tableau(gate: &Gate) -> Result<Tableau> {
    let k = gate.targets().len();
    let dim = 1usize << k;
    let u = gate.matrix();
    let ud = dagger(u, dim);
    let image = |x: u64, z: u64| -> Result<(u64, u64)> {
        let conj = matmul(&matmul(u, &pauli_matrix(k, x, z), dim), &ud, dim);
        for px in 0..dim as u64 {
            for pz in 0..dim as u64 {
                let p = pauli_matrix(k, px, pz);
                let overlap: C64 = p.iter().zip(&conj).map(|(a, b)| a.conj() * b).sum::<C64>() / dim as f64;
                if (overlap.norm() - 1.0).abs() < 1e-9 {
                    return Ok((px, pz));
                }
            }
        }
        Err(Error::Unsupported(format!(
            "gate {} on {:?} is not Clifford",
            gate.name().unwrap_or("custom"),
            gate.targets()
        )))
    };
    let mut x_images = Vec::with_capacity(k);
    let mut z_images = Vec::with_capacity(k);
    for j in 0..k {
        let b = 1u64 << (k - 1 - j);
        x_images.push(image(b, 0)?);
        z_images.push(image(0, b)?);
    }
    Ok(Tableau {
        targets: gate.targets().to_vec(),
        x_images,
        z_images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{sample_shots, NoiseRate};

    #[test]
    fn hadamard_swaps_x_and_z() {
        let t = tableau(&Gate::h(0)).unwrap();
        assert_eq!(t.x_images[0], (0, 1));
        assert_eq!(t.z_images[0], (1, 0));
        let c = tableau(&Gate::cnot(0, 1)).unwrap();
        // X_c -> X_c X_t, Z_t -> Z_c Z_t
        assert_eq!(c.x_images[0], (0b11, 0));
        assert_eq!(c.z_images[1], (0, 0b11));
        assert!(tableau(&Gate::t(0)).is_err());
    }

    #[test]
    fn agrees_with_state_vector_sampler() {
        // GHZ-free Clifford circuit whose noiseless output is |101>
        let mut c = NoisyCircuit::new(3, NoiseRate::new(0.3).unwrap()).unwrap();
        c.layer(vec![Gate::h(0), Gate::x(2)]).unwrap();
        c.layer(vec![Gate::cz(0, 1), Gate::s(2)]).unwrap();
        c.layer(vec![Gate::h(0), Gate::cnot(2, 1)]).unwrap();
        c.layer(vec![Gate::cnot(2, 1), Gate::x(0)]).unwrap();
        let b = OracleBindings::new();
        let exact = crate::qsim::exact_output_distribution(&c.clone().with_lambda(NoiseRate::ZERO), &b).unwrap();
        assert!((exact.prob(0b101) - 1.0).abs() < 1e-12);
        let frame = FrameSampler::new(&c, &b, 0b101).unwrap();
        assert_eq!(frame.sample_shots(3000, 9), sample_shots(&c, &b, 3000, 9).unwrap());
    }
}
