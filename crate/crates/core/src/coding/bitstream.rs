//! Growable bit sequence with a fixed byte serialization.
//!
//! Wire format: the bit count as a big-endian `u64`, followed by the bits
//! packed most-significant-first into `ceil(count / 8)` bytes. Unused low
//! bits of the last byte are zero.

use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bits: Vec<bool>,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn extend_from(&mut self, other: &BitStream) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.bits.len().div_ceil(8));
        out.extend_from_slice(&(self.bits.len() as u64).to_be_bytes());
        for chunk in self.bits.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)));
            out.push(byte);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header: [u8; 8] = bytes
            .get(..8)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::CorruptStream("missing 8-byte length prefix".into()))?;
        let count = u64::from_be_bytes(header);
        let body = &bytes[8..];
        let needed = count.div_ceil(8);
        if body.len() as u64 != needed {
            return Err(Error::CorruptStream(format!(
                "{count} bits need {needed} payload bytes, found {}",
                body.len()
            )));
        }
        let count = count as usize;
        let bits: Vec<bool> = (0..count)
            .map(|i| body[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect();
        if !count.is_multiple_of(8) && body[count / 8] & (0xFF >> (count % 8)) != 0 {
            return Err(Error::CorruptStream("padding bits are not zero".into()));
        }
        Ok(Self { bits })
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl From<Vec<bool>> for BitStream {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}
