use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{index_bit, low_mask};
use crate::error::{Error, Result};
use crate::oracles::{lift_to_unitary, ClassicalOracle};
use crate::qsim::{
    exact_output_distribution, sample_with_rng, trajectory_rng, FrameSampler, Gate, NoiseRate, NoisyCircuit,
    OracleBindings,
};

/// Oracle id used by [`bv_circuit`].
pub const BV_ORACLE: &str = "bv";

/// Above this rate the first-order analysis behind the repetition count no
/// longer guarantees success.
pub const GUARANTEED_LAMBDA_LIMIT: f64 = 1.0 / 24.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvRunConfig {
    pub n: usize,
    pub lambda: NoiseRate,
    pub delta: f64,
    /// Repetitions; 0 selects the Chernoff-Hoeffding count automatically.
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BvRepetitions {
    pub m: usize,
    /// True when `lambda < 1/24`, where success is guaranteed by the analysis.
    pub guaranteed_regime: bool,
}

/// Lower bound `(1 - lambda)^6` on the chance that one run reports bit `i` correctly.
pub fn bv_bit_bound(lambda: f64) -> f64 {
    (1.0 - lambda).powi(6)
}

/// `M = ceil(ln(n / delta) / (2 (f - 1/2)^2))` with `f = (1 - lambda)^6`, or
/// the explicit `cfg.m`.
///
/// Automatic `M` is available whenever `f > 1/2`; the result flags whether
/// `lambda` lies in the regime `lambda < 1/24` where the guarantee applies.
pub fn bv_repetitions(cfg: &BvRunConfig) -> Result<BvRepetitions> {
    let lambda = cfg.lambda.value();
    let guaranteed_regime = lambda < GUARANTEED_LAMBDA_LIMIT;
    if cfg.m > 0 {
        return Ok(BvRepetitions { m: cfg.m, guaranteed_regime });
    }
    if cfg.n == 0 {
        return Err(Error::invalid("BV needs at least one secret bit"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::invalid(format!("delta {} outside (0, 1)", cfg.delta)));
    }
    let gap = bv_bit_bound(lambda) - 0.5;
    if gap <= 0.0 {
        return Err(Error::invalid(format!(
            "(1 - lambda)^6 <= 1/2 at lambda = {lambda}: majority voting has no guarantee, pass an explicit M"
        )));
    }
    let m = ((cfg.n as f64 / cfg.delta).ln() / (2.0 * gap * gap)).ceil().max(1.0) as usize;
    Ok(BvRepetitions { m, guaranteed_regime })
}

/// One-query BV circuit on `n + 1` qubits; qubit `n` is the `|->` ancilla.
///
/// Layers: `H` on the data qubits with `H X` on the ancilla, the oracle, then
/// `H` on every qubit. The noiseless outcome is `s` followed by a 1.
pub fn bv_circuit(n: usize, lambda: NoiseRate) -> Result<NoisyCircuit> {
    let mut c = NoisyCircuit::new(n + 1, lambda)?;
    let mut prep: Vec<Gate> = (0..n).map(Gate::h).collect();
    prep.push(Gate::x(n).then(&Gate::h(n))?);
    c.layer(prep)?;
    c.oracle(BV_ORACLE, (0..=n).collect())?;
    c.layer((0..=n).map(Gate::h).collect())?;
    Ok(c)
}

/// Secret of a BV oracle from its declared linear form.
pub fn bv_secret(oracle: &ClassicalOracle) -> Option<u64> {
    let n = oracle.n_in();
    if oracle.m_out() != 1 {
        return None;
    }
    oracle
        .linear_pairs()
        .map(|pairs| pairs.iter().fold(0u64, |s, &(i, _)| s ^ 1 << (n - 1 - i)))
}

/// Runs the one-query circuit `runs` times; run `k` uses stream `k` of `seed`.
///
/// Returns the data bits of each outcome. Oracles with a linear form use the
/// Pauli-frame backend, which reproduces the state-vector samples exactly.
pub fn bv_samples(oracle: &ClassicalOracle, lambda: NoiseRate, runs: usize, seed: u64) -> Result<Vec<u64>> {
    let n = oracle.n_in();
    if oracle.m_out() != 1 {
        return Err(Error::invalid("BV needs a one-bit oracle"));
    }
    let circuit = bv_circuit(n, lambda)?;
    let bindings = OracleBindings::new().with(BV_ORACLE, lift_to_unitary(oracle));
    let raw: Vec<u64> = match bv_secret(oracle) {
        Some(s) => {
            let sampler = FrameSampler::new(&circuit, &bindings, s << 1 | 1)?;
            oracle.counter().add(runs as u64);
            sampler.sample_shots(runs, seed)
        }
        None => (0..runs as u64)
            .into_par_iter()
            .map(|k| sample_with_rng(&circuit, &bindings, &mut trajectory_rng(seed, k)))
            .collect::<Result<_>>()?,
    };
    Ok(raw.into_iter().map(|x| x >> 1).collect())
}

/// Per-bit majority; ties resolve to 0.
pub fn majority_vote(samples: &[u64], n: usize) -> u64 {
    (0..n).fold(0u64, |acc, i| {
        let ones = samples.iter().filter(|&&x| index_bit(x, n, i)).count();
        acc | ((2 * ones > samples.len()) as u64) << (n - 1 - i)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BvOutcome {
    pub estimate: u64,
    pub repetitions: usize,
    pub guaranteed_regime: bool,
    pub queries: u64,
}

/// Noisy Bernstein-Vazirani: `M` one-query runs followed by a per-bit majority.
pub fn run_noisy_bv(cfg: &BvRunConfig, oracle: &ClassicalOracle, seed: u64) -> Result<BvOutcome> {
    if oracle.n_in() != cfg.n || oracle.m_out() != 1 {
        return Err(Error::invalid(format!(
            "oracle {} -> {} does not match BV with n = {}",
            oracle.n_in(),
            oracle.m_out(),
            cfg.n
        )));
    }
    let reps = bv_repetitions(cfg)?;
    let samples = bv_samples(oracle, cfg.lambda, reps.m, seed)?;
    Ok(BvOutcome {
        estimate: majority_vote(&samples, cfg.n),
        repetitions: reps.m,
        guaranteed_regime: reps.guaranteed_regime,
        queries: reps.m as u64,
    })
}

/// Empirical rate at which single runs report each bit of `s` correctly.
pub fn bv_bit_success(oracle: &ClassicalOracle, lambda: NoiseRate, runs: usize, seed: u64) -> Result<Vec<f64>> {
    let n = oracle.n_in();
    let s = bv_secret(oracle).ok_or_else(|| Error::invalid("oracle has no BV linear form"))?;
    let samples = bv_samples(oracle, lambda, runs, seed)?;
    Ok((0..n)
        .map(|i| {
            let hits = samples.iter().filter(|&&x| index_bit(x ^ s, n, i) == false).count();
            hits as f64 / runs as f64
        })
        .collect())
}

/// Exact per-bit success from the density-matrix backend (`n + 1 <= 11`).
pub fn bv_exact_bit_success(oracle: &ClassicalOracle, lambda: NoiseRate) -> Result<Vec<f64>> {
    let n = oracle.n_in();
    let s = bv_secret(oracle).ok_or_else(|| Error::invalid("oracle has no BV linear form"))?;
    let circuit = bv_circuit(n, lambda)?;
    let bindings = OracleBindings::new().with(BV_ORACLE, lift_to_unitary(oracle));
    let dist = exact_output_distribution(&circuit, &bindings)?;
    Ok((0..n)
        .map(|i| {
            dist.iter()
                .filter(|&(x, _)| index_bit((x >> 1) ^ s, n, i) == false)
                .map(|(_, p)| p)
                .sum()
        })
        .collect())
}

/// Random `n`-bit secret from a seed.
pub fn random_secret(n: usize, seed: u64) -> u64 {
    use rand::Rng;
    trajectory_rng(seed, u64::MAX).random::<u64>() & low_mask(n)
}
