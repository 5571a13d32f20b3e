//! Bitstring helpers.
//!
//! Two representations are used throughout the crate:
//!
//! * `u64` basis indices for measurement outcomes and small oracle inputs.
//!   Bit 0 of a string (qubit 0) is the **most significant** bit of the
//!   integer, so the outcome `0b10` on two qubits means qubit 0 read `1`.
//! * [`BitString`] for long classical strings (concatenated code blocks).
//!   Bits are packed little-endian into `u64` words: bit `i` lives in word
//!   `i / 64` at position `i % 64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parity of the set bits of `x`.
#[inline]
pub fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Inner product mod 2 of two `u64` bit vectors.
#[inline]
pub fn dot(a: u64, b: u64) -> bool {
    parity(a & b)
}

/// Mask with the low `n` bits set.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Value of bit `i` (MSB-first) of an `n`-bit index.
#[inline]
pub fn index_bit(x: u64, n: usize, i: usize) -> bool {
    (x >> (n - 1 - i)) & 1 == 1
}

/// Formats an `n`-bit basis index MSB-first, e.g. `format_index(5, 3) == "101"`.
pub fn format_index(x: u64, n: usize) -> String {
    (0..n)
        .map(|i| if index_bit(x, n, i) { '1' } else { '0' })
        .collect()
}

/// Parses a `0`/`1` string MSB-first into a basis index.
pub fn parse_index(s: &str) -> Result<u64> {
    if s.is_empty() || s.len() > 64 {
        return Err(Error::invalid(format!("bitstring length {} not in 1..=64", s.len())));
    }
    s.chars().try_fold(0u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::invalid(format!("invalid bit character {c:?}"))),
    })
}

/// A packed, fixed-length string of bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitString { len, words }
    }

    /// Builds a string from an MSB-first basis index of `len` bits.
    pub fn from_index(x: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self::from_bools((0..len).map(|i| index_bit(x, len, i)))
    }

    /// The MSB-first basis index of this string. Panics if longer than 64 bits.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "bitstring too long for a basis index");
        (0..self.len).fold(0, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        Ok(BitString {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn xor_in_place(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Complement of every bit.
    pub fn complement(&self) -> BitString {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.trim();
        out
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len);
        BitString::from_bools((start..start + len).map(|i| self.get(i)))
    }

    /// Reads up to 64 bits starting at `start` as a little-endian word
    /// (bit `start` lands in position 0).
    pub fn word_at(&self, start: usize, len: usize) -> u64 {
        assert!(len <= 64 && start + len <= self.len);
        let mut out = 0u64;
        for j in 0..len {
            out |= (self.get(start + j) as u64) << j;
        }
        out
    }

    pub fn concat(parts: &[BitString]) -> BitString {
        BitString::from_bools(parts.iter().flat_map(|p| p.iter()))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::invalid(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bools)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_round_trip_and_format() {
        assert_eq!(format_index(5, 3), "101");
        assert_eq!(parse_index("101").unwrap(), 5);
        let b = BitString::from_index(0b1011, 4);
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.to_index(), 0b1011);
        assert!(parse_index("10a").is_err());
    }

    #[test]
    fn complement_trims_tail() {
        let b: BitString = "1010101".parse().unwrap();
        let c = b.complement();
        assert_eq!(c.to_string(), "0101010");
        assert_eq!(BitString::ones(70).weight(), 70);
    }

    #[test]
    fn word_at_is_little_endian() {
        let b: BitString = "1100000".parse().unwrap();
        assert_eq!(b.word_at(0, 7), 0b11);
    }

    proptest! {
        #[test]
        fn xor_is_involution(bits in proptest::collection::vec(any::<bool>(), 1..200),
                             mask in proptest::collection::vec(any::<bool>(), 200)) {
            let a = BitString::from_bools(bits.iter().copied());
            let m = BitString::from_bools(mask.iter().take(bits.len()).copied());
            let back = a.xor(&m).unwrap().xor(&m).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(a.hamming(&a.xor(&m).unwrap()), m.weight());
        }
    }
}
