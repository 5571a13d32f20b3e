//! Amplitude-vector kernels shared by the pure-state and density-matrix
//! backends.
//!
//! A density matrix on `n` qubits is stored row-major, which is the same
//! memory layout as a `2n`-qubit vector whose first `n` qubits index the row
//! and last `n` qubits index the column. `U rho U^dagger` is therefore `U` on
//! the row qubits followed by `conj(U)` on the column qubits.

use num_complex::Complex64 as C64;

/// Bit position of qubit `q` inside an index over `n` qubits.
#[inline]
pub(crate) fn shift(n: usize, q: usize) -> usize {
    n - 1 - q
}

pub(crate) fn apply_1q(amps: &mut [C64], n: usize, q: usize, m: &[C64; 4]) {
    let stride = 1usize << shift(n, q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[i + stride] = m[2] * a0 + m[3] * a1;
        }
        base += 2 * stride;
    }
}

/// Applies a 4x4 matrix on `(q0, q1)`, with `q0` the more significant bit of
/// the local two-qubit index.
pub(crate) fn apply_2q(amps: &mut [C64], n: usize, q0: usize, q1: usize, m: &[C64; 16]) {
    let b0 = 1usize << shift(n, q0);
    let b1 = 1usize << shift(n, q1);
    for i in 0..amps.len() {
        if i & (b0 | b1) != 0 {
            continue;
        }
        let idx = [i, i | b1, i | b0, i | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            amps[target] = m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
        }
    }
}

pub(crate) fn conj_matrix<const N: usize>(m: &[C64; N]) -> [C64; N] {
    let mut out = *m;
    for v in out.iter_mut() {
        *v = v.conj();
    }
    out
}

/// Single-qubit Pauli (`1` = X, `2` = Y, `3` = Z) on a state vector.
pub(crate) fn apply_pauli(amps: &mut [C64], n: usize, q: usize, pauli: u8) {
    let stride = 1usize << shift(n, q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let j = i + stride;
            match pauli {
                1 => amps.swap(i, j),
                2 => {
                    let a0 = amps[i];
                    let a1 = amps[j];
                    amps[i] = C64::new(a1.im, -a1.re);
                    amps[j] = C64::new(-a0.im, a0.re);
                }
                3 => amps[j] = -amps[j],
                _ => {}
            }
        }
        base += 2 * stride;
    }
}

/// Single-qubit depolarizing channel on row qubit `q` of a row-major density
/// matrix over `n` qubits: `(1 - lambda) rho + lambda Tr_q(rho) (x) I/2`.
pub(crate) fn depolarize_density(data: &mut [C64], n: usize, q: usize, lambda: f64) {
    let total = 2 * n;
    let br = 1usize << shift(total, q);
    let bc = 1usize << shift(total, n + q);
    let keep = 1.0 - lambda;
    let mix = lambda / 2.0;
    for i in 0..data.len() {
        if i & (br | bc) != 0 {
            continue;
        }
        let a = data[i];
        let d = data[i | br | bc];
        data[i] = a * (1.0 - mix) + d * mix;
        data[i | br | bc] = d * (1.0 - mix) + a * mix;
        data[i | br] *= keep;
        data[i | bc] *= keep;
    }
}

/// Extracts the local index of `wires` (first wire most significant).
#[inline]
pub(crate) fn gather(index: usize, n: usize, wires: &[usize]) -> u64 {
    wires
        .iter()
        .fold(0u64, |acc, &w| (acc << 1) | ((index >> shift(n, w)) & 1) as u64)
}

/// Writes `local` back into the positions of `wires` inside `index`.
#[inline]
pub(crate) fn scatter(index: usize, n: usize, wires: &[usize], local: u64) -> usize {
    let k = wires.len();
    let mut out = index;
    for (j, &w) in wires.iter().enumerate() {
        let bit = ((local >> (k - 1 - j)) & 1) as usize;
        let pos = shift(n, w);
        out = (out & !(1 << pos)) | (bit << pos);
    }
    out
}

/// Basis permutation with real phases restricted to `wires`:
/// `|l> -> sign(l) |perm(l)>` where `table[l] = (perm(l), sign(l))`.
pub(crate) fn apply_permutation(amps: &mut [C64], n: usize, wires: &[usize], table: &[(u64, f64)]) {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (i, &a) in amps.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let (dst, sign) = table[gather(i, n, wires) as usize];
        out[scatter(i, n, wires, dst)] = a * sign;
    }
    amps.copy_from_slice(&out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_scatter_round_trip() {
        let n = 5;
        let wires = [3, 0, 4];
        for i in 0..32usize {
            let l = gather(i, n, &wires);
            assert_eq!(scatter(i, n, &wires, l), i);
        }
        // wire 3 is the MSB of the local index
        assert_eq!(gather(0b00010, n, &wires), 0b100);
    }
}
