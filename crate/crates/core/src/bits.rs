//! Fixed-length classical bit strings.
//!
//! Position 0 is the first character of the textual form and the most
//! significant bit of [`BitString::to_index`]. The same convention fixes the
//! qubit order of every register: string position `i` is tensor factor `i`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{arg_err, Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: alloc::vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: alloc::vec![true; len] }
    }

    /// The `len`-bit big-endian encoding of `index`.
    ///
    /// Bits of `index` above `len` are ignored.
    pub fn from_index(index: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| {
                let shift = len - 1 - i;
                shift < 64 && (index >> shift) & 1 == 1
            })
            .collect();
        Self { bits }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self { bits: (0..len).map(|_| rng.random::<bool>()).collect() }
    }

    /// All strings of the given length in increasing index order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        let count = 1u64 << len;
        (0..count).map(move |i| BitString::from_index(i, len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Big-endian integer value. Panics past 64 bits.
    pub fn to_index(&self) -> usize {
        assert!(self.bits.len() <= 64, "bit string too long for an index");
        self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(arg_err!(
                "xor of bit strings with lengths {} and {}",
                self.len(),
                other.len()
            ));
        }
        Ok(Self {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        Self { bits: self.bits[start..end].to_vec() }
    }

    /// Packs the bits into bytes, first bit in the high bit of byte 0.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = alloc::vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Inverse of [`BitString::to_bytes`] for `len` bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        let bits = (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect();
        Self { bits }
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self { bits: bits.to_vec() }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(arg_err!("invalid bit character {other:?}")),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
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

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        alloc::format!("{b}")
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn index_is_big_endian() {
        assert_eq!(bs("01").to_index(), 1);
        assert_eq!(bs("10").to_index(), 2);
        assert_eq!(BitString::from_index(5, 4), bs("0101"));
        assert_eq!(BitString::from_index(0, 0), BitString::zeros(0));
    }

    #[test]
    fn xor_requires_equal_length() {
        assert_eq!(bs("0110").xor(&bs("1100")).unwrap(), bs("1010"));
        assert!(matches!(bs("01").xor(&bs("011")), Err(Error::Argument(_))));
    }

    #[test]
    fn enumeration_covers_every_string_once() {
        let all: Vec<_> = BitString::all(3).collect();
        assert_eq!(all.len(), 8);
        for (i, b) in all.iter().enumerate() {
            assert_eq!(b.to_index(), i);
        }
    }

    #[test]
    fn byte_packing_round_trips() {
        let b = bs("1011001110");
        assert_eq!(b.to_bytes(), alloc::vec![0b1011_0011, 0b1000_0000]);
        assert_eq!(BitString::from_bytes(&b.to_bytes(), b.len()), b);
    }

    #[test]
    fn rejects_non_binary_text() {
        assert!("0120".parse::<BitString>().is_err());
    }
}
