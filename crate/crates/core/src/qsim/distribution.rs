use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::format_index;
use crate::error::{Error, Result};

/// Tolerance on the total probability mass.
pub const MASS_TOL: f64 = 1e-9;

/// Probabilities over `n_bits`-bit outcomes keyed by MSB-first index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    n_bits: usize,
    probabilities: BTreeMap<u64, f64>,
}

impl OutcomeDistribution {
    /// Validates nonnegativity and unit mass; entries at or below zero are dropped
    /// after clamping round-off.
    pub fn new(n_bits: usize, probabilities: BTreeMap<u64, f64>) -> Result<Self> {
        let mut total = 0.0;
        let mut kept = BTreeMap::new();
        for (k, p) in probabilities {
            if n_bits < 64 && k >> n_bits != 0 {
                return Err(Error::invalid(format!("outcome {k} does not fit in {n_bits} bits")));
            }
            if p < -MASS_TOL || !p.is_finite() {
                return Err(Error::InvalidState(format!("negative probability {p} for outcome {k}")));
            }
            total += p;
            if p > 0.0 {
                kept.insert(k, p);
            }
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(OutcomeDistribution {
            n_bits,
            probabilities: kept,
        })
    }

    /// From a dense vector indexed by outcome.
    pub fn from_dense(n_bits: usize, dense: &[f64]) -> Result<Self> {
        Self::new(n_bits, dense.iter().enumerate().map(|(i, &p)| (i as u64, p.max(0.0))).collect())
    }

    /// Empirical distribution of samples.
    pub fn from_samples(n_bits: usize, samples: &[u64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        let mut counts: BTreeMap<u64, f64> = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_default() += 1.0;
        }
        let total = samples.len() as f64;
        for v in counts.values_mut() {
            *v /= total;
        }
        Self::new(n_bits, counts)
    }

    /// Point mass.
    pub fn point(n_bits: usize, outcome: u64) -> Self {
        OutcomeDistribution {
            n_bits,
            probabilities: BTreeMap::from([(outcome, 1.0)]),
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probabilities.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probabilities.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support_size(&self) -> usize {
        self.probabilities.len()
    }

    /// Total variation distance `1/2 sum |p - q|`.
    pub fn tv(&self, other: &OutcomeDistribution) -> Result<f64> {
        if self.n_bits != other.n_bits {
            return Err(Error::DimensionMismatch(self.n_bits, other.n_bits));
        }
        let mut sum = 0.0;
        for (k, p) in self.iter() {
            sum += (p - other.prob(k)).abs();
        }
        for (k, q) in other.iter() {
            if !self.probabilities.contains_key(&k) {
                sum += q;
            }
        }
        Ok(0.5 * sum)
    }

    /// Marginal on the given bit positions (MSB-first numbering), in that order.
    pub fn marginal(&self, bits: &[usize]) -> Result<OutcomeDistribution> {
        if let Some(&b) = bits.iter().find(|&&b| b >= self.n_bits) {
            return Err(Error::QubitOutOfRange {
                index: b,
                n_qubits: self.n_bits,
            });
        }
        let mut out: BTreeMap<u64, f64> = BTreeMap::new();
        for (k, p) in self.iter() {
            let key = bits
                .iter()
                .fold(0u64, |acc, &b| (acc << 1) | ((k >> (self.n_bits - 1 - b)) & 1));
            *out.entry(key).or_default() += p;
        }
        Ok(OutcomeDistribution {
            n_bits: bits.len(),
            probabilities: out,
        })
    }

    /// Probabilities keyed by MSB-first bit strings.
    pub fn to_labeled(&self) -> BTreeMap<String, f64> {
        self.iter().map(|(k, p)| (format_index(k, self.n_bits), p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        let p = OutcomeDistribution::point(1, 0);
        let q = OutcomeDistribution::point(1, 1);
        assert_eq!(p.tv(&p).unwrap(), 0.0);
        assert_eq!(p.tv(&q).unwrap(), 1.0);
        let a = OutcomeDistribution::from_dense(1, &[0.75, 0.25]).unwrap();
        let b = OutcomeDistribution::from_dense(1, &[0.25, 0.75]).unwrap();
        assert!((a.tv(&b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(OutcomeDistribution::from_dense(1, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn marginal_reorders_bits() {
        let d = OutcomeDistribution::from_dense(2, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = d.marginal(&[1]).unwrap();
        assert!((m.prob(1) - 0.6).abs() < 1e-15);
        let swapped = d.marginal(&[1, 0]).unwrap();
        assert!((swapped.prob(0b01) - 0.3).abs() < 1e-15);
    }
}
