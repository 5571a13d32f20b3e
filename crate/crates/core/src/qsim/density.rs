use num_complex::Complex64 as C64;

use super::gates::{Gate, GateLayer};
use super::kernels::{self, conj_matrix};
use super::linalg;
use super::state::{check_distinct, PureState};
use super::{fault, NoiseRate, MAX_DENSITY_QUBITS};
use crate::error::{Error, Result};

/// Tolerance for trace, Hermiticity and positivity checks.
pub const DENSITY_TOL: f64 = 1e-9;

/// A density matrix over `n` qubits stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn new(n: usize) -> Result<DensityMatrix> {
        check_capacity(n)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        data[0] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { n, data })
    }

    pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
        check_capacity(n)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn from_pure(psi: &PureState) -> Result<DensityMatrix> {
        let n = psi.n_qubits();
        check_capacity(n)?;
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = a[i] * a[j].conj();
            }
        }
        Ok(DensityMatrix { n, data })
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(n: usize, data: Vec<C64>) -> Result<DensityMatrix> {
        let rho = DensityMatrix::from_raw(n, data)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix of the right size without physical validation, for
    /// operator arithmetic such as differences of states.
    pub fn from_raw(n: usize, data: Vec<C64>) -> Result<DensityMatrix> {
        check_capacity(n)?;
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, data.len()));
        }
        Ok(DensityMatrix { n, data })
    }

    /// `diag(probabilities)`.
    pub fn diagonal_state(n: usize, probabilities: &[f64]) -> Result<DensityMatrix> {
        check_capacity(n)?;
        let dim = 1usize << n;
        if probabilities.len() != dim {
            return Err(Error::DimensionMismatch(dim, probabilities.len()));
        }
        let mut data = vec![ZERO; dim * dim];
        for (i, &p) in probabilities.iter().enumerate() {
            data[i * dim + i] = C64::new(p, 0.0);
        }
        DensityMatrix::from_matrix(n, data)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.data[i * dim + j] - self.data[j * dim + i].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.data, self.dim())
    }

    /// Checks the density-matrix invariants to [`DENSITY_TOL`].
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -DENSITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Measurement probabilities in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.targets() {
            check_distinct(&[q], self.n)?;
        }
        self.apply_gate_unchecked(gate);
        Ok(())
    }

    fn apply_gate_unchecked(&mut self, gate: &Gate) {
        let n2 = 2 * self.n;
        let n = self.n;
        match gate.targets() {
            [q] => {
                let m = gate.matrix2();
                kernels::apply_1q(&mut self.data, n2, *q, &m);
                kernels::apply_1q(&mut self.data, n2, n + q, &conj_matrix(&m));
            }
            [a, b] => {
                let m = gate.matrix4();
                kernels::apply_2q(&mut self.data, n2, *a, *b, &m);
                kernels::apply_2q(&mut self.data, n2, n + a, n + b, &conj_matrix(&m));
            }
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

    /// Depolarizes qubit `q` at rate `lambda`.
    pub fn depolarize(&mut self, q: usize, lambda: NoiseRate) -> Result<()> {
        check_distinct(&[q], self.n)?;
        kernels::depolarize_density(&mut self.data, self.n, q, fault::effective_lambda(lambda.value()));
        Ok(())
    }

    /// One layer of independent depolarizing noise on every qubit.
    pub fn depolarize_all(&mut self, lambda: NoiseRate) {
        let l = fault::effective_lambda(lambda.value());
        if l == 0.0 {
            return;
        }
        for q in 0..self.n {
            kernels::depolarize_density(&mut self.data, self.n, q, l);
        }
    }

    /// Conjugates by the signed basis permutation `table` on `wires`.
    pub fn apply_basis_map(&mut self, wires: &[usize], table: &[(u64, f64)]) -> Result<()> {
        check_distinct(wires, self.n)?;
        if table.len() != 1usize << wires.len() {
            return Err(Error::DimensionMismatch(1 << wires.len(), table.len()));
        }
        let all: Vec<usize> = wires.iter().copied().chain(wires.iter().map(|w| w + self.n)).collect();
        let k = wires.len();
        let mask = (1u64 << k) - 1;
        // the row and column registers pick up the same real map
        let doubled: Vec<(u64, f64)> = (0..1u64 << (2 * k))
            .map(|l| {
                let (r, sr) = table[(l >> k) as usize];
                let (c, sc) = table[(l & mask) as usize];
                ((r << k) | c, sr * sc)
            })
            .collect();
        kernels::apply_permutation(&mut self.data, 2 * self.n, &all, &doubled);
        Ok(())
    }

    /// Conjugates by the basis permutation `|i> -> |map(i)>`.
    pub(crate) fn permute(&mut self, map: impl Fn(usize) -> usize) {
        let dim = self.dim();
        let idx: Vec<usize> = (0..dim).map(map).collect();
        let mut out = vec![ZERO; self.data.len()];
        for i in 0..dim {
            for j in 0..dim {
                out[idx[i] * dim + idx[j]] = self.data[i * dim + j];
            }
        }
        self.data = out;
    }

    /// Conjugates by a diagonal unitary `phase(l)` on `wires`.
    pub fn apply_diagonal(&mut self, wires: &[usize], phase: impl Fn(u64) -> C64) -> Result<()> {
        check_distinct(wires, self.n)?;
        let dim = self.dim();
        let phases: Vec<C64> = (0..1u64 << wires.len()).map(&phase).collect();
        let local: Vec<usize> = (0..dim).map(|i| kernels::gather(i, self.n, wires) as usize).collect();
        for i in 0..dim {
            for j in 0..dim {
                self.data[i * dim + j] *= phases[local[i]] * phases[local[j]].conj();
            }
        }
        Ok(())
    }

    /// Reduced state on `keep`, ordered as given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_distinct(keep, self.n)?;
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one qubit"));
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dim = self.dim();
        let mut out = vec![ZERO; dk * dk];
        for r in 0..1usize << rest.len() {
            let base = kernels::scatter(0, self.n, &rest, r as u64);
            for a in 0..dk {
                let i = kernels::scatter(base, self.n, keep, a as u64);
                for b in 0..dk {
                    let j = kernels::scatter(base, self.n, keep, b as u64);
                    out[a * dk + b] += self.data[i * dim + j];
                }
            }
        }
        Ok(DensityMatrix {
            n: keep.len(),
            data: out,
        })
    }

    /// `self (x) other`, with `other` on the trailing qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n + other.n;
        check_capacity(n)?;
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![ZERO; dim * dim];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.data[i1 * da + j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        data[(i1 * db + i2) * dim + j1 * db + j2] = a * other.data[i2 * db + j2];
                    }
                }
            }
        }
        Ok(DensityMatrix { n, data })
    }

    /// Traces out `wires` and puts `replacement` there:
    /// `Tr_wires(self)` on the other qubits, tensored with `replacement` on `wires`.
    pub fn replace_register(&self, wires: &[usize], replacement: &DensityMatrix) -> Result<DensityMatrix> {
        check_distinct(wires, self.n)?;
        if replacement.n != wires.len() {
            return Err(Error::WireMismatch {
                expected: replacement.n,
                got: wires.len(),
            });
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| !wires.contains(q)).collect();
        if rest.is_empty() {
            return Ok(replacement.clone());
        }
        let reduced = self.partial_trace(&rest)?;
        let dim = self.dim();
        let dr = reduced.dim();
        let dw = replacement.dim();
        let mut data = vec![ZERO; dim * dim];
        let mut lr = vec![0usize; dim];
        let mut lw = vec![0usize; dim];
        for i in 0..dim {
            lr[i] = kernels::gather(i, self.n, &rest) as usize;
            lw[i] = kernels::gather(i, self.n, wires) as usize;
        }
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = reduced.data[lr[i] * dr + lr[j]] * replacement.data[lw[i] * dw + lw[j]];
            }
        }
        Ok(DensityMatrix { n: self.n, data })
    }

    /// Entrywise `self - other`, returned as a raw operator.
    pub fn sub(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(DensityMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `sum_i w_i rho_i` over equally sized matrices.
    pub fn mix(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        let first = &parts.first().ok_or_else(|| Error::invalid("empty mixture"))?.1;
        let mut data = vec![ZERO; first.data.len()];
        for (w, rho) in parts {
            if rho.n != first.n {
                return Err(Error::DimensionMismatch(first.n, rho.n));
            }
            for (d, v) in data.iter_mut().zip(&rho.data) {
                *d += v * *w;
            }
        }
        Ok(DensityMatrix { n: first.n, data })
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("a state needs at least one qubit"));
    }
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::Capacity {
            backend: "density-matrix",
            max: MAX_DENSITY_QUBITS,
            requested: n,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        a.entries().iter().zip(b.entries()).all(|(x, y)| (x - y).norm() < tol)
    }

    fn lam(v: f64) -> NoiseRate {
        NoiseRate::new(v).unwrap()
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let mut rho = DensityMatrix::maximally_mixed(1).unwrap();
        rho.depolarize_all(lam(0.37));
        assert!(approx_eq(&rho, &DensityMatrix::maximally_mixed(1).unwrap(), 1e-15));
    }

    #[test]
    fn zero_state_depolarizes_to_diagonal() {
        let l = 0.3;
        let mut rho = DensityMatrix::new(1).unwrap();
        rho.depolarize_all(lam(l));
        let d = rho.diagonal();
        assert!((d[0] - (1.0 - l / 2.0)).abs() < 1e-15);
        assert!((d[1] - l / 2.0).abs() < 1e-15);
    }

    #[test]
    fn full_depolarization_of_plus() {
        let mut psi = PureState::new(1).unwrap();
        psi.apply_gate(&Gate::h(0)).unwrap();
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.depolarize_all(lam(1.0));
        assert!(approx_eq(&rho, &DensityMatrix::maximally_mixed(1).unwrap(), 1e-15));
    }

    #[test]
    fn depolarizing_keeps_coherence_factor() {
        // off-diagonal of |+><+| on qubit 1 of a 2-qubit product shrinks by (1 - lambda)
        let mut psi = PureState::new(2).unwrap();
        psi.apply_gate(&Gate::h(1)).unwrap();
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        rho.depolarize(1, lam(0.25)).unwrap();
        assert!((rho.get(0, 1).re - 0.5 * 0.75).abs() < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_conjugation_matches_pure_state() {
        let mut psi = PureState::new(3).unwrap();
        let layer1 = GateLayer::new(vec![Gate::h(0), Gate::cnot(2, 1)]).unwrap();
        let layer2 = GateLayer::new(vec![Gate::cphase(0, 2, 0.7), Gate::s(1)]).unwrap();
        let mut rho = DensityMatrix::new(3).unwrap();
        for l in [&layer1, &layer2] {
            psi.apply_layer(l).unwrap();
            rho.apply_layer(l).unwrap();
        }
        assert!(approx_eq(&rho, &DensityMatrix::from_pure(&psi).unwrap(), 1e-14));
    }

    #[test]
    fn partial_trace_of_bell_is_mixed() {
        let mut psi = PureState::new(2).unwrap();
        psi.apply_gate(&Gate::h(0)).unwrap();
        psi.apply_gate(&Gate::cnot(0, 1)).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let red = rho.partial_trace(&[1]).unwrap();
        assert!(approx_eq(&red, &DensityMatrix::maximally_mixed(1).unwrap(), 1e-15));
    }

    #[test]
    fn replace_register_on_product_is_identity() {
        let mut a = PureState::new(1).unwrap();
        a.apply_gate(&Gate::h(0)).unwrap();
        let b = PureState::basis(2, 0b10).unwrap();
        let rho = DensityMatrix::from_pure(&a.tensor(&b).unwrap()).unwrap();
        let reg = rho.partial_trace(&[0]).unwrap();
        let out = rho.replace_register(&[0], &reg).unwrap();
        assert!(approx_eq(&out, &rho, 1e-15));
    }

    #[test]
    fn basis_map_conjugation() {
        // X on qubit 0 expressed as a permutation
        let table = vec![(1, 1.0), (0, 1.0)];
        let mut rho = DensityMatrix::new(2).unwrap();
        rho.apply_basis_map(&[0], &table).unwrap();
        assert!((rho.get(2, 2).re - 1.0).abs() < 1e-15);
    }
}
