//! Recursively concatenated classical codes built from a CSS base pair, and
//! the robust Simon function defined on top of them.
//!
//! At level `r` a block has `m^r` bits split into `m` sub-blocks of `m^(r-1)`
//! bits. `B^(r)_b` holds the exact codewords of logical bit `b` and `A^(r)_b`
//! the strings reachable from them by `(r, d)`-sparse corruption. Both are
//! decided by the same recursion: decode each sub-block, then compare the
//! decoded word against the class words, tolerating `0` (for `B`) or `d`
//! (for `A`) disagreements, where an undecodable sub-block always disagrees.

mod base;
mod lemmas;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{index_bit, BitString};
use crate::error::{Error, Result};
use crate::oracles::ClassicalOracle;
use crate::qsim::{PureState, MAX_PURE_QUBITS};

pub use base::BaseCode;
pub use lemmas::{code_lemma_checks, MAX_EXHAUSTIVE_M};

/// Largest supported block length `m^r`.
pub const MAX_BLOCK_BITS: usize = 1 << 20;
/// Largest block for which [`codeword_state`] builds amplitudes.
pub const MAX_STATE_BITS: usize = 14;

/// A decoded logical bit, or `Bottom` when the string lies in neither class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecodedBit {
    Zero,
    One,
    Bottom,
}

impl DecodedBit {
    pub fn from_bool(b: bool) -> Self {
        if b {
            DecodedBit::One
        } else {
            DecodedBit::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            DecodedBit::Zero => Some(false),
            DecodedBit::One => Some(true),
            DecodedBit::Bottom => None,
        }
    }
}

/// A base code concatenated with itself `r` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcatCodeSpec {
    pub base: BaseCode,
    pub r: usize,
}

impl ConcatCodeSpec {
    pub fn new(base: BaseCode, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("recursion depth must be at least 1"));
        }
        let fits = (base.m() as u64)
            .checked_pow(r as u32)
            .is_some_and(|len| len <= MAX_BLOCK_BITS as u64);
        if !fits {
            return Err(Error::invalid(format!("block length {}^{r} exceeds 2^20", base.m())));
        }
        Ok(ConcatCodeSpec { base, r })
    }

    /// `m^r`.
    pub fn block_len(&self) -> usize {
        self.sub_len(self.r)
    }

    fn sub_len(&self, level: usize) -> usize {
        self.base.m().pow(level as u32)
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.block_len() {
            return Err(Error::LengthMismatch {
                expected: self.block_len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Decodes `x[start .. start + m^level]` allowing `tol` bad sub-blocks per level.
    fn decode(&self, x: &BitString, start: usize, level: usize, tol: usize) -> DecodedBit {
        if level == 0 {
            return DecodedBit::from_bool(x.get(start));
        }
        let sub = self.sub_len(level - 1);
        let (mut value, mut bottom) = (0u64, 0u64);
        for i in 0..self.base.m() {
            match self.decode(x, start + i * sub, level - 1, tol) {
                DecodedBit::One => value |= 1 << i,
                DecodedBit::Bottom => bottom |= 1 << i,
                DecodedBit::Zero => {}
            }
        }
        let fits = |b: bool| {
            self.base
                .class_words(b)
                .any(|w| ((value ^ w) | bottom).count_ones() as usize <= tol)
        };
        match (fits(false), fits(true)) {
            (true, false) => DecodedBit::Zero,
            (false, true) => DecodedBit::One,
            (false, false) => DecodedBit::Bottom,
            (true, true) => {
                debug_assert!(false, "neighborhoods of both classes overlap");
                DecodedBit::Bottom
            }
        }
    }

    /// `b` if `x ∈ B^(r)_b`, else `Bottom`.
    pub fn membership_b(&self, x: &BitString) -> Result<DecodedBit> {
        self.check_len(x)?;
        Ok(self.decode(x, 0, self.r, 0))
    }

    /// `b` if `x ∈ A^(r)_b`, else `Bottom`.
    pub fn membership_a(&self, x: &BitString) -> Result<DecodedBit> {
        self.check_len(x)?;
        Ok(self.decode(x, 0, self.r, self.base.d()))
    }

    fn majority(&self, x: &BitString, start: usize, level: usize) -> bool {
        if level == 0 {
            return x.get(start);
        }
        let sub = self.sub_len(level - 1);
        let value = (0..self.base.m())
            .filter(|&i| self.majority(x, start + i * sub, level - 1))
            .fold(0u64, |v, i| v | 1 << i);
        let dist = |b: bool| {
            self.base
                .class_words(b)
                .map(|w| (value ^ w).count_ones())
                .min()
                .unwrap_or(u32::MAX)
        };
        dist(true) < dist(false)
    }

    /// Recursive nearest-class decoding; ties go to 0.
    pub fn recursive_majority_decode(&self, x: &BitString) -> Result<bool> {
        self.check_len(x)?;
        Ok(self.majority(x, 0, self.r))
    }

    fn encode_into<R: Rng + ?Sized>(&self, b: bool, level: usize, out: &mut Vec<bool>, rng: &mut R) {
        if level == 0 {
            out.push(b);
            return;
        }
        let words: Vec<u64> = self.base.class_words(b).collect();
        let w = *words.choose(rng).expect("class is never empty");
        for i in 0..self.base.m() {
            self.encode_into(w >> i & 1 == 1, level - 1, out, rng);
        }
    }

    /// A uniformly random element of `B^(r)_b`.
    pub fn encode<R: Rng + ?Sized>(&self, b: bool, rng: &mut R) -> BitString {
        let mut out = Vec::with_capacity(self.block_len());
        self.encode_into(b, self.r, &mut out, rng);
        BitString::from_bools(out)
    }

    /// Encodes each bit of `bits` as its own block.
    pub fn encode_word<R: Rng + ?Sized>(&self, bits: &[bool], rng: &mut R) -> BitString {
        BitString::concat(&bits.iter().map(|&b| self.encode(b, rng)).collect::<Vec<_>>())
    }

    fn sparse_into<R: Rng + ?Sized>(&self, level: usize, out: &mut Vec<bool>, rng: &mut R) {
        let m = self.base.m();
        let d = self.base.d();
        let k = rng.random_range(0..=d.min(m));
        let bad = rand::seq::index::sample(rng, m, k).into_vec();
        if level == 1 {
            for i in 0..m {
                out.push(bad.contains(&i) && rng.random_bool(0.5));
            }
            return;
        }
        let sub = self.sub_len(level - 1);
        for i in 0..m {
            if bad.contains(&i) {
                out.extend((0..sub).map(|_| rng.random_bool(0.5)));
            } else {
                self.sparse_into(level - 1, out, rng);
            }
        }
    }

    /// A random flip pattern supported on an `(r, d)`-sparse set of one block.
    ///
    /// At level 1 at most `d` positions are touched; at higher levels at most
    /// `d` sub-blocks are arbitrary and the rest are recursively sparse.
    pub fn random_sparse_flips<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let mut out = Vec::with_capacity(self.block_len());
        self.sparse_into(self.r, &mut out, rng);
        BitString::from_bools(out)
    }

    fn enumerate(&self, b: bool, level: usize) -> Vec<Vec<bool>> {
        if level == 0 {
            return vec![vec![b]];
        }
        let children = [self.enumerate(false, level - 1), self.enumerate(true, level - 1)];
        let mut out = Vec::new();
        for w in self.base.class_words(b) {
            let mut partial: Vec<Vec<bool>> = vec![Vec::new()];
            for i in 0..self.base.m() {
                let options = &children[(w >> i & 1) as usize];
                partial = partial
                    .iter()
                    .flat_map(|p| options.iter().map(move |o| [p.as_slice(), o.as_slice()].concat()))
                    .collect();
            }
            out.extend(partial);
        }
        out
    }

    /// Every element of `B^(r)_b`; blocks of at most [`MAX_STATE_BITS`] bits.
    pub fn codewords(&self, b: bool) -> Result<Vec<BitString>> {
        if self.block_len() > MAX_STATE_BITS {
            return Err(Error::Capacity {
                backend: "codeword enumeration",
                max: MAX_STATE_BITS,
                requested: self.block_len(),
            });
        }
        Ok(self.enumerate(b, self.r).into_iter().map(BitString::from_bools).collect())
    }
}

/// `|R_b>`, the uniform superposition over `B^(r)_b`; block bit `i` is qubit `i`.
pub fn codeword_state(spec: &ConcatCodeSpec, b: bool) -> Result<PureState> {
    let words = spec.codewords(b)?;
    let n = spec.block_len();
    debug_assert!(n <= MAX_PURE_QUBITS);
    let amp = 1.0 / (words.len() as f64).sqrt();
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << n];
    for w in &words {
        amps[w.to_index() as usize] += amp;
    }
    PureState::from_amplitudes(n, amps)
}

/// `f~_s(x)`: decodes the first `m^r n'` bits of `x` block by block and, when
/// every block lies in some `A^(r)_b`, returns `f(b_1 ... b_n')` with each bit
/// repeated `m^r` times; otherwise all zeros. Bit `b_1` is the most
/// significant input bit of `f`. Does not count as a query of `f`.
pub fn robust_simon_eval(x: &BitString, spec: &ConcatCodeSpec, f: &ClassicalOracle) -> Result<BitString> {
    let n_prime = f.n_in();
    if f.m_out() != n_prime {
        return Err(Error::invalid("robust Simon needs an n' -> n' function"));
    }
    let block = spec.block_len();
    if x.len() < block * n_prime {
        return Err(Error::LengthMismatch {
            expected: block * n_prime,
            got: x.len(),
        });
    }
    let mut z = 0u64;
    for j in 0..n_prime {
        match spec.decode(x, j * block, spec.r, spec.base.d()).bit() {
            Some(b) => z = z << 1 | b as u64,
            None => return Ok(BitString::zeros(block * n_prime)),
        }
    }
    let y = f.peek(z);
    Ok(BitString::from_bools(
        (0..n_prime).flat_map(|k| std::iter::repeat_n(index_bit(y, n_prime, k), block)),
    ))
}

/// `f~_s` as a classical oracle on `n_in` input bits, for `m^r n' <= n_in <= 64`
/// and `m^r n' <= 64`. Input bit `i` is string position `i`.
pub fn make_robust_simon(spec: &ConcatCodeSpec, f: &ClassicalOracle, n_in: usize) -> Result<ClassicalOracle> {
    let out = spec.block_len() * f.n_in();
    if out > 64 || n_in > 64 || n_in < out {
        return Err(Error::invalid(format!(
            "robust Simon on {n_in} input bits with {out} output bits does not fit a word"
        )));
    }
    let (spec, f) = (spec.clone(), f.clone());
    ClassicalOracle::new(format!("robust({})", f.label()), n_in, out, move |x| {
        let bits = BitString::from_index(x, n_in);
        robust_simon_eval(&bits, &spec, &f)
            .map(|y| y.to_index())
            .unwrap_or(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{make_simon, SimonSpec};
    use crate::qsim::trajectory_rng;

    fn hamming(r: usize) -> ConcatCodeSpec {
        ConcatCodeSpec::new(BaseCode::hamming_7_4(), r).unwrap()
    }

    fn word(w: u64, m: usize) -> BitString {
        BitString::from_bools((0..m).map(|i| w >> i & 1 == 1))
    }

    #[test]
    fn r1_membership_exhaustive() {
        let spec = hamming(1);
        let dual = spec.base.dual_words().to_vec();
        let (mut a0, mut a1) = (0, 0);
        for x in 0..128u64 {
            let s = word(x, 7);
            let dist = |shift: u64| dual.iter().map(|w| (x ^ w ^ shift).count_ones()).min().unwrap();
            let expect_b = if dist(0) == 0 {
                DecodedBit::Zero
            } else if dist(127) == 0 {
                DecodedBit::One
            } else {
                DecodedBit::Bottom
            };
            assert_eq!(spec.membership_b(&s).unwrap(), expect_b);
            let a = spec.membership_a(&s).unwrap();
            let in0 = dist(0) <= 1;
            let in1 = dist(127) <= 1;
            assert!(!(in0 && in1), "A_0 and A_1 intersect at {x:07b}");
            match a {
                DecodedBit::Zero => {
                    assert!(in0);
                    a0 += 1
                }
                DecodedBit::One => {
                    assert!(in1);
                    a1 += 1
                }
                DecodedBit::Bottom => assert!(!in0 && !in1),
            }
            // Majority agrees wherever A decodes, and corrects single flips.
            if let Some(b) = a.bit() {
                assert_eq!(spec.recursive_majority_decode(&s).unwrap(), b);
            }
        }
        // 8 codewords per class, each with 7 single-flip neighbors: the
        // Hamming code is perfect, so A_0 and A_1 tile all 128 strings.
        assert_eq!((a0, a1), (64, 64));
    }

    #[test]
    fn single_flip_leaves_b() {
        let spec = hamming(1);
        // "0001111" in position order.
        let mut s = word(0b1111000, 7);
        assert_eq!(spec.membership_b(&s).unwrap(), DecodedBit::Zero);
        assert_eq!(spec.membership_b(&s.complement()).unwrap(), DecodedBit::One);
        s.flip(2);
        assert_eq!(spec.membership_b(&s).unwrap(), DecodedBit::Bottom);
        assert_eq!(spec.membership_a(&s).unwrap(), DecodedBit::Zero);
    }

    #[test]
    fn r2_structure_sampled() {
        let spec = hamming(2);
        let mut rng = trajectory_rng(17, 0);
        for _ in 0..2000 {
            let b = rng.random_bool(0.5);
            let mut x = spec.encode(b, &mut rng);
            assert_eq!(spec.membership_b(&x).unwrap(), DecodedBit::from_bool(b));
            x.xor_in_place(&spec.random_sparse_flips(&mut rng));
            let a = spec.membership_a(&x).unwrap();
            assert_eq!(a, DecodedBit::from_bool(b));
            assert_eq!(spec.membership_a(&x.complement()).unwrap(), DecodedBit::from_bool(!b));
            assert_eq!(spec.recursive_majority_decode(&x).unwrap(), b);
        }
        // Arbitrary strings: complement symmetry and agreement with majority.
        for _ in 0..2000 {
            let x = BitString::from_bools((0..49).map(|_| rng.random_bool(0.5)));
            let a = spec.membership_a(&x).unwrap();
            let flipped = match a {
                DecodedBit::Zero => DecodedBit::One,
                DecodedBit::One => DecodedBit::Zero,
                DecodedBit::Bottom => DecodedBit::Bottom,
            };
            assert_eq!(spec.membership_a(&x.complement()).unwrap(), flipped);
            if let Some(b) = a.bit() {
                assert_eq!(spec.recursive_majority_decode(&x).unwrap(), b);
            }
        }
    }

    #[test]
    fn codeword_states() {
        let spec = hamming(1);
        let s0 = codeword_state(&spec, false).unwrap();
        let s1 = codeword_state(&spec, true).unwrap();
        assert!(s0.inner(&s1).unwrap().norm() < 1e-15);
        assert!((s0.norm_sqr() - 1.0).abs() < 1e-12);
        let support: Vec<usize> = (0..128).filter(|&i| s0.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(support.len(), 8);
        for &i in &support {
            assert!((s0.amplitudes()[i].re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
        let rep = ConcatCodeSpec::new(BaseCode::repetition(3).unwrap(), 2).unwrap();
        assert_eq!(rep.codewords(true).unwrap(), vec![BitString::ones(9)]);
        assert!(codeword_state(&hamming(2), false).is_err());
    }

    #[test]
    fn robust_simon_paths() {
        let spec = hamming(1);
        let f = make_simon(&SimonSpec::new(2, 0b11, 4).unwrap()).unwrap();
        let mut rng = trajectory_rng(5, 0);
        for z in 0..4u64 {
            let bits = [z >> 1 & 1 == 1, z & 1 == 1];
            let mut x = spec.encode_word(&bits, &mut rng);
            let expected = robust_simon_eval(&x, &spec, &f).unwrap();
            let y = f.peek(z);
            assert_eq!(expected.slice(0, 7), if y >> 1 & 1 == 1 { BitString::ones(7) } else { BitString::zeros(7) });
            x.flip(3);
            x.flip(12);
            assert_eq!(robust_simon_eval(&x, &spec, &f).unwrap(), expected);
        }
        assert_eq!(f.queries(), 0);
    }

    #[test]
    fn bottom_path_with_repetition_code() {
        // Length-5 repetition classes corrected up to one error leave room
        // for strings two away from both.
        let base = BaseCode::new(5, (0..5).map(|i| 1 << i).collect(), Vec::new(), 1).unwrap();
        let spec = ConcatCodeSpec::new(base, 1).unwrap();
        let f = ClassicalOracle::new("not", 1, 1, |x| x ^ 1).unwrap();
        let g = make_robust_simon(&spec, &f, 6).unwrap();
        // Input bits 0..5 form the block; bit 5 is ignored.
        assert_eq!(g.peek(0b000001), 0b11111);
        assert_eq!(g.peek(0b100000), 0b11111);
        assert_eq!(g.peek(0b110000), 0);
        assert_eq!(g.peek(0b111000), 0);
        assert_eq!(g.peek(0b111110), 0);
        assert_eq!(g.peek(0b101010), 0);
    }
}
