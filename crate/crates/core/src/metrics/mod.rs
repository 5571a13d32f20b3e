//! Distances, entropies and the noise-decay inequalities as checkable reports.

mod checks;
mod report;

use crate::error::{Error, Result};
use crate::qsim::{linalg, DensityMatrix, OutcomeDistribution};

pub use checks::{
    check_hybrid_bound, check_info_decay, check_projection_bound, check_random_subset_separation,
    check_subsystem_averaging, classical_landing_probability, min_pairwise_distance, HybridBoundInput,
    InfoDecayReport, InfoDecayRow,
};
pub use report::CheckReport;

/// Eigenvalues below this count as zero in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Schatten 1-norm of a Hermitian operator (sum of absolute eigenvalues).
pub fn trace_norm(a: &DensityMatrix) -> f64 {
    linalg::hermitian_trace_norm(a.entries(), a.dim())
}

/// `1/2 ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.sub(b)?))
}

/// `1/2 sum_s |p(s) - q(s)|`.
pub fn tv_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    p.tv(q)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > ENTROPY_CUTOFF)
        .map(|l| -l * l.log2())
        .sum()
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// `KL(p || q)` in bits; infinite if `p` charges an outcome `q` does not.
pub fn kl_divergence(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.n_bits() != q.n_bits() {
        return Err(Error::DimensionMismatch(p.n_bits(), q.n_bits()));
    }
    let mut sum = 0.0;
    for (k, pk) in p.iter() {
        let qk = q.prob(k);
        if qk == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += pk * (pk / qk).log2();
    }
    Ok(sum)
}

/// `n - S(rho)` for an `n`-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct InformationValue {
    pub value: f64,
    pub n_qubits: usize,
}

pub fn information(rho: &DensityMatrix) -> InformationValue {
    let n = rho.n_qubits();
    InformationValue {
        value: (n as f64 - von_neumann_entropy(rho)).clamp(0.0, n as f64),
        n_qubits: n,
    }
}

/// A subset of the qubits of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSelector {
    n: usize,
    qubits: Vec<usize>,
}

impl SubsetSelector {
    pub fn new(n: usize, mut qubits: Vec<usize>) -> Result<Self> {
        qubits.sort_unstable();
        qubits.dedup();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
        Ok(SubsetSelector { n, qubits })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|q| !self.qubits.contains(q)).collect()
    }
}

/// `sigma|_S`, the reduced state on the selected qubits.
pub fn restrict(sigma: &DensityMatrix, sel: &SubsetSelector) -> Result<DensityMatrix> {
    check_selector(sigma, sel)?;
    sigma.partial_trace(sel.qubits())
}

/// Keeps `sigma|_S` on `S` and replaces the complement by the maximally mixed
/// state, with every qubit staying in its original position.
pub fn restrict_and_decohere(sigma: &DensityMatrix, sel: &SubsetSelector) -> Result<DensityMatrix> {
    check_selector(sigma, sel)?;
    let rest = sel.complement();
    if rest.is_empty() {
        return Ok(sigma.clone());
    }
    sigma.replace_register(&rest, &DensityMatrix::maximally_mixed(rest.len())?)
}

fn check_selector(sigma: &DensityMatrix, sel: &SubsetSelector) -> Result<()> {
    if sel.n != sigma.n_qubits() {
        return Err(Error::DimensionMismatch(sigma.n_qubits(), sel.n));
    }
    Ok(())
}

/// `Tr(rho O)` for a diagonal observable given by its values on basis states.
pub fn diagonal_expectation(rho: &DensityMatrix, values: impl Fn(u64) -> f64) -> f64 {
    rho.diagonal().iter().enumerate().map(|(i, p)| p * values(i as u64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::random::{random_density, random_pure_state};
    use crate::qsim::{NoiseRate, PureState};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero() -> DensityMatrix {
        DensityMatrix::new(1).unwrap()
    }

    fn one() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(1, 1).unwrap()).unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(trace_distance(&zero(), &zero()).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero(), &one()).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance(&zero(), &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!(trace_distance(&zero(), &DensityMatrix::new(2).unwrap()).is_err());
    }

    #[test]
    fn information_examples() {
        let n = 3;
        assert!((information(&DensityMatrix::new(n).unwrap()).value - 3.0).abs() < 1e-12);
        assert!(information(&DensityMatrix::maximally_mixed(n).unwrap()).value.abs() < 1e-12);
        let lambda = 0.3;
        let mut rho = DensityMatrix::new(n).unwrap();
        rho.depolarize_all(NoiseRate::new(lambda).unwrap());
        let expected = n as f64 * (1.0 - binary_entropy(lambda / 2.0));
        assert!((information(&rho).value - expected).abs() < 1e-12);
    }

    #[test]
    fn decohere_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = random_density(3, 2, &mut rng).unwrap();
        let all = SubsetSelector::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(restrict_and_decohere(&sigma, &all).unwrap(), sigma);
        let none = SubsetSelector::new(3, vec![]).unwrap();
        let out = restrict_and_decohere(&sigma, &none).unwrap();
        assert!(trace_distance(&out, &DensityMatrix::maximally_mixed(3).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn decohere_keeps_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma = random_density(3, 3, &mut rng).unwrap();
        let sel = SubsetSelector::new(3, vec![0, 2]).unwrap();
        let out = restrict_and_decohere(&sigma, &sel).unwrap();
        out.validate().unwrap();
        let a = restrict(&out, &sel).unwrap();
        let b = restrict(&sigma, &sel).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-14);
        // the other qubit is maximally mixed
        let other = out.partial_trace(&[1]).unwrap();
        assert!(trace_distance(&other, &DensityMatrix::maximally_mixed(1).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn measurement_tv_below_trace_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=5 {
            let a = random_density(n, 2, &mut rng).unwrap();
            let b = random_density(n, 1, &mut rng).unwrap();
            let pa = OutcomeDistribution::from_dense(n, &a.diagonal()).unwrap();
            let pb = OutcomeDistribution::from_dense(n, &b.diagonal()).unwrap();
            assert!(tv_distance(&pa, &pb).unwrap() <= trace_distance(&a, &b).unwrap() + 1e-12);
        }
    }

    #[test]
    fn kl_below_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let rho = random_density(n, 1 + n % 3, &mut rng).unwrap();
            let p = OutcomeDistribution::from_dense(n, &rho.diagonal()).unwrap();
            let q = OutcomeDistribution::from_dense(n, &vec![1.0 / (1 << n) as f64; 1 << n]).unwrap();
            assert!(kl_divergence(&p, &q).unwrap() <= information(&rho).value + 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn trace_distance_is_a_metric(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_density(n, 2, &mut rng).unwrap();
            let b = random_density(n, 1, &mut rng).unwrap();
            let c = DensityMatrix::from_pure(&random_pure_state(n, &mut rng).unwrap()).unwrap();
            let ab = trace_distance(&a, &b).unwrap();
            prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        }

        #[test]
        fn tv_is_a_metric(p in proptest::collection::vec(0.01f64..1.0, 8),
                          q in proptest::collection::vec(0.01f64..1.0, 8),
                          r in proptest::collection::vec(0.01f64..1.0, 8)) {
            let norm = |v: &Vec<f64>| {
                let s: f64 = v.iter().sum();
                OutcomeDistribution::from_dense(3, &v.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap()
            };
            let (p, q, r) = (norm(&p), norm(&q), norm(&r));
            let pq = tv_distance(&p, &q).unwrap();
            prop_assert!((pq - tv_distance(&q, &p).unwrap()).abs() < 1e-15);
            prop_assert!(pq <= tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap() + 1e-12);
            prop_assert!(tv_distance(&p, &p).unwrap() == 0.0);
        }
    }
}
