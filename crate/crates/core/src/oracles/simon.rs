use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ClassicalOracle;
use crate::bits::low_mask;
use crate::error::{Error, Result};

/// Widths up to this use an explicit shuffled table for the output labels.
pub const TABLE_BITS: usize = 12;

/// A Simon instance: `f(x) = f(x xor s)`, one-to-one when `s = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonSpec {
    pub n: usize,
    pub secret: u64,
    /// Seeds the bijection that assigns output labels.
    pub seed: u64,
}

impl SimonSpec {
    pub fn new(n: usize, secret: u64, seed: u64) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::invalid(format!("Simon width {n} outside 1..=32")));
        }
        if secret & !low_mask(n) != 0 {
            return Err(Error::invalid(format!("secret does not fit in {n} bits")));
        }
        Ok(SimonSpec { n, secret, seed })
    }
}

/// Uniformly random permutation of `0..2^bits`.
pub(crate) fn random_bijection<R: Rng + ?Sized>(bits: usize, rng: &mut R) -> Vec<u64> {
    let mut t: Vec<u64> = (0..1u64 << bits).collect();
    t.shuffle(rng);
    t
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed bijection of `0..2^n` from a balanced Feistel network with
/// cycle walking.
#[derive(Clone, Debug)]
struct Feistel {
    n: usize,
    half: usize,
    keys: [u64; 4],
}

impl Feistel {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Feistel {
            n,
            half: n.div_ceil(2),
            keys: [rng.random(), rng.random(), rng.random(), rng.random()],
        }
    }

    fn round_trip(&self, x: u64) -> u64 {
        let mask = low_mask(self.half);
        let (mut l, mut r) = (x >> self.half, x & mask);
        for k in self.keys {
            let next = l ^ (splitmix(k ^ r) & mask);
            l = r;
            r = next;
        }
        (l << self.half) | r
    }

    fn apply(&self, x: u64) -> u64 {
        let mut y = self.round_trip(x);
        while y >> self.n != 0 {
            y = self.round_trip(y);
        }
        y
    }
}

/// The Simon function `f(x) = pi(min(x, x xor s))` for a seeded bijection `pi`.
pub fn make_simon(spec: &SimonSpec) -> Result<ClassicalOracle> {
    let spec = SimonSpec::new(spec.n, spec.secret, spec.seed)?;
    let s = spec.secret;
    let label = format!("simon({})", spec.n);
    if spec.n <= TABLE_BITS {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let pi = random_bijection(spec.n, &mut rng);
        ClassicalOracle::new(label, spec.n, spec.n, move |x| pi[x.min(x ^ s) as usize])
    } else {
        let pi = Feistel::new(spec.n, spec.seed);
        ClassicalOracle::new(label, spec.n, spec.n, move |x| pi.apply(x.min(x ^ s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn histogram(f: &ClassicalOracle) -> HashMap<u64, usize> {
        let mut h = HashMap::new();
        for x in 0..1u64 << f.n_in() {
            *h.entry(f.peek(x)).or_default() += 1;
        }
        h
    }

    #[test]
    fn zero_secret_is_bijection() {
        for n in [1, 5, 12] {
            let f = make_simon(&SimonSpec::new(n, 0, 7).unwrap()).unwrap();
            let h = histogram(&f);
            assert_eq!(h.len(), 1 << n);
        }
    }

    #[test]
    fn period_101() {
        let f = make_simon(&SimonSpec::new(3, 0b101, 3).unwrap()).unwrap();
        for x in 0..8 {
            assert_eq!(f.peek(x), f.peek(x ^ 0b101));
        }
        let h = histogram(&f);
        assert_eq!(h.len(), 4);
        assert!(h.values().all(|&c| c == 2));
    }

    #[test]
    fn feistel_is_bijective() {
        for n in [13, 15] {
            let f = make_simon(&SimonSpec::new(n, 0, 11).unwrap()).unwrap();
            assert_eq!(histogram(&f).len(), 1 << n);
            let g = make_simon(&SimonSpec::new(n, 0b1011, 11).unwrap()).unwrap();
            let h = histogram(&g);
            assert_eq!(h.len(), 1 << (n - 1));
            assert!(h.values().all(|&c| c == 2));
        }
    }

    #[test]
    fn rejects_oversized_secret() {
        assert!(SimonSpec::new(3, 0b1000, 0).is_err());
    }
}
