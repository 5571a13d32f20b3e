use serde::{Deserialize, Serialize};

use crate::bits::index_bit;
use crate::error::{Error, Result};
use crate::metrics::trace_norm;
use crate::oracles::{PauliString, StateOracle};
use crate::qsim::{
    exact_output_distribution, sample_shots, DensityMatrix, Gate, NoiseRate, NoisyCircuit, OracleBindings,
    QuantumOracle,
};

/// Oracle id used by [`shadow_circuit`].
pub const STATE_ORACLE: &str = "state";
/// Largest register for exact mode.
pub const MAX_EXACT_QUBITS: usize = 8;

/// How each copy is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShadowStrategy {
    /// Rotate into the eigenbasis of `P` and record the parity on its support.
    PauliParity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShadowMode {
    Exact,
    Sampled { shots: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinguishResult {
    /// Best advantage of any test on the `N` recorded parities.
    pub advantage: f64,
    /// `||D^n[(O_1 - O_0)(sigma)]||_1` for the state entering the oracle.
    pub trace_distance_per_query: f64,
    pub queries_used: usize,
    /// Probability of even parity under `(I + P)/2^n` and under `I/2^n`.
    pub q1: f64,
    pub q0: f64,
}

/// Load the state, rotate each non-identity factor of `P` into the `Z` basis, measure.
pub fn shadow_circuit(p: &PauliString, lambda: NoiseRate) -> Result<NoisyCircuit> {
    let n = p.len();
    let mut c = NoisyCircuit::new(n, lambda)?;
    c.oracle(STATE_ORACLE, (0..n).collect())?;
    let rot: Vec<Gate> = p
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(q, &op)| match op {
            1 => Some(Ok(Gate::h(q))),
            2 => Some(Gate::sdg(q).then(&Gate::h(q))),
            _ => None,
        })
        .collect::<Result<_>>()?;
    c.layer(rot)?;
    Ok(c)
}

fn even_on_support(x: u64, p: &PauliString) -> bool {
    let n = p.len();
    (0..n).filter(|&q| p.ops()[q] != 0 && index_bit(x, n, q)).count() % 2 == 0
}

fn ln_choose(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Total variation between `Binomial(n, a)` and `Binomial(n, b)`.
pub fn binomial_tv(n: usize, a: f64, b: f64) -> f64 {
    let pmf = |k: usize, p: f64| -> f64 {
        if p <= 0.0 {
            return (k == 0) as u8 as f64;
        }
        if p >= 1.0 {
            return (k == n) as u8 as f64;
        }
        (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
    };
    0.5 * (0..=n).map(|k| (pmf(k, a) - pmf(k, b)).abs()).sum::<f64>()
}

/// Exact per-query quantity `||D^n[(O_1 - O_0)(sigma)]||_1` for a given `sigma`.
pub fn per_query_trace_norm(p: &PauliString, lambda: NoiseRate, sigma: &DensityMatrix) -> Result<f64> {
    let wires: Vec<usize> = (0..p.len()).collect();
    let (mut a, mut b) = (sigma.clone(), sigma.clone());
    StateOracle::pauli(1, p.clone())?.apply_density(&mut a, &wires)?;
    StateOracle::maximally_mixed(p.len())?.apply_density(&mut b, &wires)?;
    let mut diff = a.sub(&b)?;
    diff.depolarize_all(lambda);
    Ok(trace_norm(&diff))
}

/// Distinguishes `(I + P)/2^n` from `I/2^n` with `queries` noisy copies.
pub fn shadow_distinguish(
    p: &PauliString,
    lambda: NoiseRate,
    queries: usize,
    strategy: ShadowStrategy,
    mode: ShadowMode,
    seed: u64,
) -> Result<DistinguishResult> {
    let ShadowStrategy::PauliParity = strategy;
    let n = p.len();
    if n > MAX_EXACT_QUBITS && mode == ShadowMode::Exact {
        return Err(Error::Capacity {
            backend: "exact shadow",
            max: MAX_EXACT_QUBITS,
            requested: n,
        });
    }
    let circuit = shadow_circuit(p, lambda)?;
    let one = OracleBindings::new().with(STATE_ORACLE, std::sync::Arc::new(StateOracle::pauli(1, p.clone())?));
    let zero = OracleBindings::new().with(STATE_ORACLE, std::sync::Arc::new(StateOracle::maximally_mixed(n)?));
    let even = |b: &OracleBindings| -> Result<f64> {
        match mode {
            ShadowMode::Exact => Ok(exact_output_distribution(&circuit, b)?
                .iter()
                .filter(|&(x, _)| even_on_support(x, p))
                .map(|(_, q)| q)
                .sum()),
            ShadowMode::Sampled { shots } => {
                let xs = sample_shots(&circuit, b, shots, seed)?;
                Ok(xs.iter().filter(|&&x| even_on_support(x, p)).count() as f64 / shots as f64)
            }
        }
    };
    let (q1, q0) = (even(&one)?, even(&zero)?);
    let mut sigma = DensityMatrix::new(n)?;
    sigma.depolarize_all(lambda);
    Ok(DistinguishResult {
        advantage: binomial_tv(queries, q1, q0),
        trace_distance_per_query: per_query_trace_norm(p, lambda, &sigma)?,
        queries_used: queries,
        q1,
        q0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::random::random_density;
    use crate::qsim::trajectory_rng;

    #[test]
    fn per_query_decay_is_exact() {
        let mut rng = trajectory_rng(6, 0);
        for (ps, w) in [("Z", 1), ("XY", 2), ("IZX", 2), ("YYZ", 3)] {
            let p: PauliString = ps.parse().unwrap();
            for lambda in [0.1, 0.3] {
                let sigma = random_density(p.len(), 2, &mut rng).unwrap();
                let v = per_query_trace_norm(&p, NoiseRate::new(lambda).unwrap(), &sigma).unwrap();
                assert!((v - (1.0f64 - lambda).powi(w)).abs() < 1e-10, "{ps} {lambda} {v}");
            }
        }
    }

    #[test]
    fn noiseless_parity_strategy_and_full_noise() {
        let p = PauliString::all_z(3);
        let r = shadow_distinguish(&p, NoiseRate::ZERO, 2, ShadowStrategy::PauliParity, ShadowMode::Exact, 0).unwrap();
        assert!((r.q1 - 1.0).abs() < 1e-12 && (r.q0 - 0.5).abs() < 1e-12);
        assert!(r.advantage >= 1.0 / 3.0);
        let r = shadow_distinguish(&p, NoiseRate::new(1.0).unwrap(), 50, ShadowStrategy::PauliParity, ShadowMode::Exact, 0)
            .unwrap();
        assert!(r.advantage < 1e-12);
        let y: PauliString = "YX".parse().unwrap();
        let r = shadow_distinguish(&y, NoiseRate::ZERO, 1, ShadowStrategy::PauliParity, ShadowMode::Sampled { shots: 500 }, 3)
            .unwrap();
        assert_eq!(r.q1, 1.0);
    }

    #[test]
    fn binomial_tv_edges() {
        assert!((binomial_tv(1, 1.0, 0.5) - 0.5).abs() < 1e-15);
        assert!(binomial_tv(40, 0.3, 0.3) < 1e-12);
        assert!(binomial_tv(400, 0.9, 0.1) > 0.999);
    }
}
