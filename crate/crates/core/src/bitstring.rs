//! Packed fixed-length bit strings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A binary string of fixed positive length, stored as packed 64-bit words.
///
/// Bits past `len` in the last word are always zero, so word-wise equality,
/// XOR and popcount never see garbage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyBitString);
        }
        Ok(Self {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        })
    }

    pub fn ones(len: usize) -> Result<Self> {
        let mut s = Self::zeros(len)?;
        s.words.fill(u64::MAX);
        s.clear_tail();
        Ok(s)
    }

    /// Uniformly random string: every bit independently 0 or 1 with probability 1/2.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mut s = Self::zeros(len)?;
        for w in &mut s.words {
            *w = rng.random();
        }
        s.clear_tail();
        Ok(s)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut s = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; kept for API symmetry with collections.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        out.complement_in_place();
        out
    }

    pub fn complement_in_place(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.clear_tail();
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where `self` and `other` agree.
    pub fn agreements(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self.len - self.hamming_unchecked(other))
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self.hamming_unchecked(other))
    }

    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Overwrites `self` with `other` without reallocating.
    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "copy_from length mismatch");
        self.words.copy_from_slice(&other.words);
    }

    /// Writes the positions where `self` and `other` differ, in increasing order, into `out`.
    pub fn diff_positions_into(&self, other: &Self, out: &mut Vec<usize>) -> Result<()> {
        self.check_len(other)?;
        out.clear();
        for (k, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let mut diff = a ^ b;
            while diff != 0 {
                let bit = diff.trailing_zeros() as usize;
                out.push(k * WORD_BITS + bit);
                diff &= diff - 1;
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub(crate) fn check_len(&self, other: &Self) -> Result<()> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            })
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Samples a uniformly random bit string of length `n`.
pub fn random_bitstring<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BitString> {
    BitString::random(n, rng)
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
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    #[test]
    fn zero_length_is_rejected() {
        assert!(matches!(BitString::zeros(0), Err(Error::EmptyBitString)));
        assert!(matches!(
            random_bitstring(0, &mut stream(1)),
            Err(Error::EmptyBitString)
        ));
    }

    #[test]
    fn parse_and_display() {
        let s: BitString = "10101010".parse().unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.to_string(), "10101010");
        assert_eq!(s.count_ones(), 4);
        assert!("10x".parse::<BitString>().is_err());
    }

    #[test]
    fn complement_keeps_tail_clear() {
        let s = BitString::zeros(70).unwrap();
        let c = s.complement();
        assert_eq!(c.count_ones(), 70);
        assert_eq!(c, BitString::ones(70).unwrap());
    }

    #[test]
    fn same_seed_same_string() {
        let a = random_bitstring(300, &mut stream(42)).unwrap();
        let b = random_bitstring(300, &mut stream(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_bit_is_fair() {
        let mut rng = stream(3);
        let samples = 100_000;
        let ones = (0..samples)
            .filter(|_| random_bitstring(1, &mut rng).unwrap().get(0))
            .count();
        let mean = ones as f64 / samples as f64;
        assert!((mean - 0.5).abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn diff_positions_lists_all_differences() {
        let a: BitString = "1100110011".parse().unwrap();
        let b: BitString = "1000111010".parse().unwrap();
        let mut out = Vec::new();
        a.diff_positions_into(&b, &mut out).unwrap();
        assert_eq!(out, vec![1, 6, 9]);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let a = BitString::zeros(5).unwrap();
        let b = BitString::zeros(6).unwrap();
        assert!(matches!(
            a.hamming(&b),
            Err(Error::DimensionMismatch { expected: 5, actual: 6 })
        ));
    }

    proptest! {
        #[test]
        fn hamming_matches_bitwise_count(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
            let (xs, ys): (Vec<bool>, Vec<bool>) = bits.into_iter().unzip();
            let a = BitString::from_bits(&xs).unwrap();
            let b = BitString::from_bits(&ys).unwrap();
            let expected = xs.iter().zip(&ys).filter(|(x, y)| x != y).count();
            prop_assert_eq!(a.hamming(&b).unwrap(), expected);
            prop_assert_eq!(a.agreements(&b).unwrap(), xs.len() - expected);
            prop_assert_eq!(a.iter().collect::<Vec<_>>(), xs);
        }
    }
}
