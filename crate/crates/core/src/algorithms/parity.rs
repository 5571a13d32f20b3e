use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bv::bv_secret;
use crate::bits::{dot, index_bit, low_mask};
use crate::error::{Error, Result};
use crate::oracles::{lift_to_unitary, ClassicalOracle};
use crate::qsim::{sample_with_rng, trajectory_rng, FrameSampler, Gate, NoiseRate, NoisyCircuit, OracleBindings};

/// Largest brute-force candidate space.
pub const MAX_CANDIDATES: u64 = 1_000_000;
const PARITY_ORACLE: &str = "f";

/// Samples `(x, y)` with `y = <x, s>` flipped at rate `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyParityInstance {
    pub n: usize,
    pub samples: Vec<(u64, bool)>,
    /// Promised support: `s` lives on the first `k` bits.
    pub k: usize,
    pub w_max: usize,
    /// Empirical flip rate against the known secret, when there is one.
    pub eta: Option<f64>,
}

impl NoisyParityInstance {
    /// Fraction of samples whose label disagrees with `<x, s>`.
    pub fn flip_rate(&self, s: u64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().filter(|&&(x, y)| dot(x, s) != y).count() as f64 / self.samples.len() as f64
    }

    /// Uniform `x` with labels flipped independently at rate `eta`.
    pub fn synthetic(n: usize, s: u64, eta: f64, samples: usize, k: usize, w_max: usize, seed: u64) -> Self {
        let mut rng = trajectory_rng(seed, 0);
        let samples: Vec<(u64, bool)> = (0..samples)
            .map(|_| {
                let x = rng.random::<u64>() & low_mask(n);
                (x, dot(x, s) ^ (rng.random::<f64>() < eta))
            })
            .collect();
        let mut inst = NoisyParityInstance {
            n,
            samples,
            k,
            w_max,
            eta: None,
        };
        inst.eta = Some(inst.flip_rate(s));
        inst
    }
}

/// Which one-query circuit produces the samples.
#[derive(Clone, Debug)]
pub enum ParitySource {
    /// `n -> 1` oracle; each run yields `(x, f(x))` for uniform `x`.
    Bv(ClassicalOracle),
    /// `n -> n` two-to-one oracle; each run yields `x` with `<x, s> = 0`, recorded with `y = 0`.
    Simon(ClassicalOracle),
}

/// Runs the sampling circuit `samples` times under noise and calibrates the
/// flip rate against `secret`.
///
/// The BV source prepares a uniformly random basis input `x`, calls the oracle
/// once and measures `(x, y)`; linear oracles use the Pauli-frame backend with
/// reference `x || <x, s>`. The Simon source runs the usual one-query Simon
/// circuit and measures the input register.
pub fn generate_noisy_parity(
    source: &ParitySource,
    secret: u64,
    lambda: NoiseRate,
    k: usize,
    w_max: usize,
    samples: usize,
    seed: u64,
) -> Result<NoisyParityInstance> {
    let (oracle, simon) = match source {
        ParitySource::Bv(o) => (o, false),
        ParitySource::Simon(o) => (o, true),
    };
    let (n, m) = (oracle.n_in(), oracle.m_out());
    if (!simon && m != 1) || (simon && m != n) {
        return Err(Error::invalid(format!("oracle {n} -> {m} does not fit the sampling circuit")));
    }
    if k > n || secret & !low_mask(n) != 0 || (secret & low_mask(n - k)) != 0 {
        return Err(Error::invalid(format!("secret is not supported on the first {k} of {n} bits")));
    }
    let bindings = OracleBindings::new().with(PARITY_ORACLE, lift_to_unitary(oracle));
    let linear = if simon { None } else { bv_secret(oracle) };
    let raw: Vec<u64> = (0..samples as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = trajectory_rng(seed, j);
            let mut c = NoisyCircuit::new(n + m, lambda)?;
            if simon {
                let h: Vec<Gate> = (0..n).map(Gate::h).collect();
                c.layer(h.clone())?;
                c.oracle(PARITY_ORACLE, (0..n + m).collect())?;
                c.layer(h)?;
                return sample_with_rng(&c, &bindings, &mut rng);
            }
            let x = rng.random::<u64>() & low_mask(n);
            c.layer((0..n).filter(|&q| index_bit(x, n, q)).map(Gate::x).collect())?;
            c.oracle(PARITY_ORACLE, (0..=n).collect())?;
            if let Some(s) = linear {
                let reference = x << 1 | dot(x, s) as u64;
                Ok(FrameSampler::new(&c, &bindings, reference)?.sample_with_rng(&mut rng))
            } else {
                sample_with_rng(&c, &bindings, &mut rng)
            }
        })
        .collect::<Result<_>>()?;
    if linear.is_some() {
        oracle.counter().add(samples as u64);
    }
    let samples = raw
        .into_iter()
        .map(|z| (z >> m, !simon && z & 1 == 1))
        .collect();
    let mut inst = NoisyParityInstance {
        n,
        samples,
        k,
        w_max,
        eta: None,
    };
    inst.eta = Some(inst.flip_rate(secret));
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityRecovery {
    /// `None` when the two best candidates are within `3 sqrt(samples)`.
    pub estimate: Option<u64>,
    pub best_agreement: usize,
    pub runner_up_agreement: usize,
    pub candidates: u64,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Visits every mask of weight `<= w_max` over positions `0..k`.
fn for_each_subset(k: usize, w_max: usize, mut visit: impl FnMut(u64)) {
    fn rec(start: usize, k: usize, left: usize, mask: u64, visit: &mut dyn FnMut(u64)) {
        visit(mask);
        if left == 0 {
            return;
        }
        for i in start..k {
            rec(i + 1, k, left - 1, mask | 1 << i, visit);
        }
    }
    rec(0, k, w_max, 0, &mut visit);
}

/// Exhaustive search over secrets on the first `k` bits with weight `<= w_max`.
pub fn solve_noisy_parity_bruteforce(inst: &NoisyParityInstance, k: usize, w_max: usize) -> Result<ParityRecovery> {
    let n = inst.n;
    if k > n {
        return Err(Error::invalid(format!("support {k} exceeds n = {n}")));
    }
    let candidates: u64 = (0..=w_max.min(k) as u64).map(|w| binomial(k as u64, w)).sum();
    if candidates > MAX_CANDIDATES {
        return Err(Error::Capacity {
            backend: "parity brute force",
            max: MAX_CANDIDATES as usize,
            requested: candidates as usize,
        });
    }
    let (mut best, mut second) = ((0usize, 0u64), 0usize);
    let mut first = true;
    for_each_subset(k, w_max.min(k), |mask| {
        // Position i of the first k bits is bit n - 1 - i of the index.
        let s = (0..k).filter(|&i| mask >> i & 1 == 1).fold(0u64, |s, i| s | 1 << (n - 1 - i));
        let agree = inst.samples.iter().filter(|&&(x, y)| dot(x, s) == y).count();
        if first || agree > best.0 {
            if !first {
                second = second.max(best.0);
            }
            best = (agree, s);
            first = false;
        } else {
            second = second.max(agree);
        }
    });
    let margin_ok = candidates == 1 || (best.0 - second) as f64 >= 3.0 * (inst.samples.len() as f64).sqrt();
    Ok(ParityRecovery {
        estimate: margin_ok.then_some(best.1),
        best_agreement: best.0,
        runner_up_agreement: second,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{make_bv, make_simon, SimonSpec};

    #[test]
    fn subset_enumeration_counts() {
        let mut count = 0u64;
        for_each_subset(6, 2, |_| count += 1);
        assert_eq!(count, 1 + 6 + 15);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }

    #[test]
    fn noiseless_sources_have_zero_eta() {
        let s = 0b1010_0000;
        let inst = generate_noisy_parity(&ParitySource::Bv(make_bv(s, 8).unwrap()), s, NoiseRate::ZERO, 3, 2, 200, 1)
            .unwrap();
        assert_eq!(inst.eta, Some(0.0));
        let r = solve_noisy_parity_bruteforce(&inst, 3, 2).unwrap();
        assert_eq!(r.estimate, Some(s));

        let simon = make_simon(&SimonSpec::new(4, 0b1100, 2).unwrap()).unwrap();
        let inst =
            generate_noisy_parity(&ParitySource::Simon(simon), 0b1100, NoiseRate::ZERO, 2, 2, 100, 3).unwrap();
        assert!(inst.samples.iter().all(|&(x, y)| !y && !dot(x, 0b1100)));
        assert_eq!(inst.eta, Some(0.0));
    }

    #[test]
    fn frame_and_dense_paths_agree() {
        let o = make_bv(0b1101_0000, 8).unwrap();
        let table: Vec<u64> = (0..256).map(|x| o.peek(x)).collect();
        let plain = ClassicalOracle::from_table("t", 8, 1, table).unwrap();
        let lambda = NoiseRate::new(0.15).unwrap();
        let a = generate_noisy_parity(&ParitySource::Bv(o.clone()), 0b1101_0000, lambda, 4, 3, 300, 5).unwrap();
        let b = generate_noisy_parity(&ParitySource::Bv(plain), 0b1101_0000, lambda, 4, 3, 300, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.queries(), 300);
    }

    #[test]
    fn full_noise_gives_half_flips() {
        let s = 0b11000;
        let inst =
            generate_noisy_parity(&ParitySource::Bv(make_bv(s, 5).unwrap()), s, NoiseRate::new(1.0).unwrap(), 2, 2, 4000, 9)
                .unwrap();
        let eta = inst.eta.unwrap();
        assert!((eta - 0.5).abs() < 3.0 * (0.25f64 / 4000.0).sqrt(), "{eta}");
    }

    #[test]
    fn support_promise_is_checked() {
        let o = make_bv(0b00011, 5).unwrap();
        assert!(generate_noisy_parity(&ParitySource::Bv(o), 0b00011, NoiseRate::ZERO, 2, 2, 10, 0).is_err());
    }

    #[test]
    fn recovery_and_failure() {
        let n = 12;
        let mut hits = 0;
        for t in 0..100u64 {
            let s = [0b1100_0000_0000u64, 0b0010_0000_0000, 0b0001_0100_0000][t as usize % 3];
            let inst = NoisyParityInstance::synthetic(n, s, 0.2, 2000, 6, 2, t);
            if solve_noisy_parity_bruteforce(&inst, 6, 2).unwrap().estimate == Some(s) {
                hits += 1;
            }
        }
        assert!(hits >= 95, "{hits}");
        let mut inst = NoisyParityInstance::synthetic(n, 0b1 << 11, 0.0, 400, 6, 2, 1);
        let copy: Vec<_> = inst.samples.iter().map(|&(x, y)| (x, !y)).collect();
        inst.samples.extend(copy);
        assert_eq!(solve_noisy_parity_bruteforce(&inst, 6, 2).unwrap().estimate, None);
        let big = NoisyParityInstance::synthetic(40, 0, 0.0, 1, 40, 20, 0);
        assert!(solve_noisy_parity_bruteforce(&big, 40, 20).unwrap_err().is_capacity());
    }
}
