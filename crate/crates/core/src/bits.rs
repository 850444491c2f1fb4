//! Fixed-length bit vectors for keys, plaintext, keystream and ciphertext.
//!
//! Convention used throughout the crate: index 0 is the first transmitted
//! bit, which is the leftmost character in the string form and the most
//! significant bit in the integer form.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Ordered sequence of binary symbols {0,1}.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    /// Builds a sequence from raw symbols, rejecting anything but 0 and 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain(format!("bit symbol {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Big-endian expansion of `value` over exactly `len` bits.
    pub fn from_int(value: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::Domain(format!("integer form limited to 64 bits, got {len}")));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::Domain(format!("value {value} does not fit in {len} bits")));
        }
        let bits = (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
        Ok(Self { bits })
    }

    /// Big-endian integer encoding; the canonical ordering for hypothesis
    /// enumeration and tie-breaking.
    pub fn to_int(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::Domain(format!(
                "integer form limited to 64 bits, got {}",
                self.len()
            )));
        }
        Ok(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }

    /// Parses a hexadecimal string as a key of an explicit bit length.
    pub fn from_hex(hex: &str, bit_len: usize) -> Result<Self> {
        let value = u64::from_str_radix(hex.trim_start_matches("0x"), 16)
            .map_err(|e| Error::Domain(format!("invalid hex string {hex:?}: {e}")))?;
        Self::from_int(value, bit_len)
    }

    pub fn to_hex(&self) -> Result<String> {
        let v = self.to_int()?;
        let digits = self.len().div_ceil(4).max(1);
        Ok(format!("{v:0digits$x}"))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> u8 {
        self.bits[index]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len > self.len() {
            return Err(Error::Length(format!(
                "prefix of {len} bits requested from a {}-bit sequence",
                self.len()
            )));
        }
        Ok(Self { bits: self.bits[..len].to_vec() })
    }

    /// Elementwise XOR of equal-length sequences.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Length(format!(
                "xor of unequal lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(Self { bits })
    }

    /// Hamming distance between equal-length sequences.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::Length(format!(
                "hamming distance of unequal lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count())
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence({self})")
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

impl Serialize for BitSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let b: BitSequence = "10110".parse().unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.to_string(), "10110");
        assert_eq!(b.to_int().unwrap(), 0b10110);
    }

    #[test]
    fn int_is_big_endian() {
        let b = BitSequence::from_int(0b1011, 4).unwrap();
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.bit(0), 1);
        assert_eq!(b.bit(3), 1);
        assert_eq!(b.bit(2), 1);
        assert_eq!(b.bit(1), 0);
    }

    #[test]
    fn hex_parsing_respects_bit_length() {
        let b = BitSequence::from_hex("b", 4).unwrap();
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.to_hex().unwrap(), "b");
        assert!(BitSequence::from_hex("1b", 4).is_err());
    }

    #[test]
    fn rejects_non_binary_symbols() {
        assert!(BitSequence::new(vec![0, 1, 2]).is_err());
        assert!("012".parse::<BitSequence>().is_err());
    }

    #[test]
    fn xor_and_hamming() {
        let a: BitSequence = "1010".parse().unwrap();
        let b: BitSequence = "0110".parse().unwrap();
        assert_eq!(a.xor(&b).unwrap().to_string(), "1100");
        assert_eq!(a.hamming(&b).unwrap(), 2);
        assert!(a.xor(&"01".parse().unwrap()).is_err());
    }
}
