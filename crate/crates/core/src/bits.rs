//! Fixed-width bit serialization for labels, tables and headers.

use bitvec::prelude::{BitSlice, BitVec, Msb0};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: i64, width: u32 },
    #[error("bit string exhausted: needed {needed} more bits at offset {offset}")]
    Exhausted { offset: usize, needed: u32 },
}

/// ⌈log2 n⌉, with 0 for n ≤ 1.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub type Bits = BitVec<u8, Msb0>;

#[derive(Debug, Default)]
pub struct BitWriter {
    bits: Bits,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unsigned(&mut self, value: u64, width: u32) -> Result<&mut Self, BitError> {
        if width < 64 && value >> width != 0 {
            return Err(BitError::Overflow {
                value: value as i64,
                width,
            });
        }
        for i in (0..width).rev() {
            self.bits.push(value >> i & 1 == 1);
        }
        Ok(self)
    }

    /// Sign bit followed by a `width`-bit magnitude.
    pub fn signed(&mut self, value: i64, width: u32) -> Result<&mut Self, BitError> {
        let magnitude = value.unsigned_abs();
        if width < 64 && magnitude >> width != 0 {
            return Err(BitError::Overflow { value, width });
        }
        self.bits.push(value < 0);
        self.unsigned(magnitude, width)
    }

    pub fn flag(&mut self, value: bool) -> &mut Self {
        self.bits.push(value);
        self
    }

    pub fn finish(self) -> Bits {
        self.bits
    }
}

pub struct BitReader<'a> {
    bits: &'a BitSlice<u8, Msb0>,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitSlice<u8, Msb0>) -> Self {
        Self { bits, pos: 0 }
    }

    fn take(&mut self, width: u32) -> Result<&'a BitSlice<u8, Msb0>, BitError> {
        let end = self.pos + width as usize;
        if end > self.bits.len() {
            return Err(BitError::Exhausted {
                offset: self.pos,
                needed: (end - self.bits.len()) as u32,
            });
        }
        let out = &self.bits[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn unsigned(&mut self, width: u32) -> Result<u64, BitError> {
        Ok(self
            .take(width)?
            .iter()
            .fold(0u64, |acc, b| acc << 1 | u64::from(*b)))
    }

    pub fn signed(&mut self, width: u32) -> Result<i64, BitError> {
        let negative = self.flag()?;
        let magnitude = self.unsigned(width)? as i64;
        Ok(if negative { -magnitude } else { magnitude })
    }

    pub fn flag(&mut self) -> Result<bool, BitError> {
        Ok(self.take(1)?[0])
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}
