//! Packed computational-basis bitstrings.
//!
//! Qubit `q` is stored in bit `q % 64` of word `q / 64`, which is also the
//! bit position of qubit `q` in a statevector index. The text form puts
//! qubit 0 leftmost.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const WORDS: usize = 3;

/// Largest number of qubits a [`BitString`] can hold.
pub const MAX_QUBITS: usize = 64 * WORDS;

/// A fixed-length bitstring of at most [`MAX_QUBITS`] bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u16,
    words: [u64; WORDS],
}

impl BitString {
    /// All-zero bitstring of length `len`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_QUBITS, "bitstring length {len} exceeds {MAX_QUBITS}");
        BitString {
            len: len as u16,
            words: [0; WORDS],
        }
    }

    /// Bitstring whose bit `q` is bit `q` of `index` (statevector order).
    pub fn from_index(index: usize, len: usize) -> Self {
        assert!(len <= 64);
        let mut b = Self::zeros(len);
        b.words[0] = index as u64 & low_mask(len);
        b
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (q, &bit) in bits.iter().enumerate() {
            b.set(q, bit);
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        debug_assert!(q < self.len());
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, value: bool) {
        debug_assert!(q < self.len());
        let mask = 1u64 << (q % 64);
        if value {
            self.words[q / 64] |= mask;
        } else {
            self.words[q / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, q: usize) {
        debug_assert!(q < self.len());
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    /// Copy with qubits `p` and `r` flipped: the image under `X_p X_r`.
    #[inline]
    pub fn flipped_pair(&self, p: usize, r: usize) -> Self {
        let mut out = *self;
        out.flip(p);
        out.flip(r);
        out
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the number of set bits (0 or 1).
    #[inline]
    pub fn parity(&self) -> u32 {
        self.count_ones() & 1
    }

    /// Statevector index; only valid for lengths up to 64.
    #[inline]
    pub fn to_index(&self) -> usize {
        debug_assert!(self.len() <= 64);
        self.words[0] as usize
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
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

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.len() > MAX_QUBITS {
            return Err(Error::SizeLimit {
                what: "bitstring length",
                actual: s.len(),
                limit: MAX_QUBITS,
            });
        }
        let mut b = BitString::zeros(s.len());
        for (q, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(q, true),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "bitstring contains '{other}', expected only 0 and 1"
                    )))
                }
            }
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_puts_qubit_zero_first() {
        let b: BitString = "0011".parse().unwrap();
        assert!(!b.get(0) && !b.get(1) && b.get(2) && b.get(3));
        assert_eq!(b.to_index(), 0b1100);
        assert_eq!(b.to_string(), "0011");
    }

    #[test]
    fn wide_strings_span_words() {
        let mut b = BitString::zeros(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        assert_eq!(b.count_ones(), 3);
        let back: BitString = b.to_string().parse().unwrap();
        assert_eq!(back, b);
        assert_eq!(b.flipped_pair(64, 129).count_ones(), 1);
    }

    #[test]
    fn rejects_bad_characters() {
        assert!("01x1".parse::<BitString>().is_err());
    }

    #[test]
    fn index_round_trip() {
        for i in 0..64 {
            assert_eq!(BitString::from_index(i, 6).to_index(), i);
        }
    }
}
