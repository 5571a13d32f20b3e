//! Random gates, circuits and states for tests and experiments.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, Gate, GateLayer, NoiseRate, NoisyCircuit, PureState};
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random `dim x dim` unitary, row-major.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            out[i * dim + j] = q[(i, j)] * phase;
        }
    }
    out
}

/// Haar-random gate on the given one or two targets.
pub fn random_gate<R: Rng + ?Sized>(targets: Vec<usize>, rng: &mut R) -> Gate {
    let dim = 1 << targets.len();
    Gate::unitary(targets, haar_unitary(dim, rng)).expect("QR factor is unitary")
}

/// A layer covering every qubit with random one- and two-qubit gates.
pub fn random_layer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GateLayer {
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    let mut gates = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && rng.random_bool(0.5) {
            gates.push(random_gate(vec![qubits[i], qubits[i + 1]], rng));
            i += 2;
        } else {
            gates.push(random_gate(vec![qubits[i]], rng));
            i += 1;
        }
    }
    GateLayer::new(gates).expect("shuffled qubits are disjoint")
}

/// `depth` random layers on `n` qubits.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, depth: usize, lambda: NoiseRate, rng: &mut R) -> Result<NoisyCircuit> {
    let mut c = NoisyCircuit::new(n, lambda)?;
    for _ in 0..depth {
        c.push_layer(random_layer(n, rng))?;
    }
    Ok(c)
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(n, amps)
}

/// Random mixed state `G G^dagger / Tr` with `G` a `2^n x rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1usize << n;
    let g: Vec<C64> = (0..dim * rank).map(|_| gaussian(rng)).collect();
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            data[i * dim + j] = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
        }
    }
    let tr: f64 = (0..dim).map(|i| data[i * dim + i].re).sum();
    for v in data.iter_mut() {
        *v /= tr;
    }
    // exact Hermitian symmetry
    for i in 0..dim {
        data[i * dim + i].im = 0.0;
        for j in i + 1..dim {
            data[j * dim + i] = data[i * dim + j].conj();
        }
    }
    DensityMatrix::from_matrix(n, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{unitarity_deviation, UNITARY_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [2, 4] {
            for _ in 0..50 {
                let u = haar_unitary(dim, &mut rng);
                assert!(unitarity_deviation(&u, dim) < UNITARY_TOL);
            }
        }
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for rank in 1..4 {
            let rho = random_density(3, rank, &mut rng).unwrap();
            rho.validate().unwrap();
        }
    }
}
