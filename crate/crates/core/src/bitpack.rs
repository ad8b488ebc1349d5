//! Flat little-endian bit storage.
//!
//! Field `i` of a [`PackedArray`] with width `w` occupies bits
//! `[i*w, (i+1)*w)` of the word array, where bit `j` lives in word `j / 64`
//! at position `j % 64` (least significant first). Fields may straddle a
//! word boundary. This layout is what snapshots persist.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitVec {
    words: Vec<u64>,
    len: u64,
}

impl BitVec {
    pub fn zeros(len: u64) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u64, v: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[(i / 64) as usize];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    /// Reads `width <= 64` bits starting at bit `offset`.
    #[inline]
    pub fn get_bits(&self, offset: u64, width: u32) -> u64 {
        debug_assert!(width <= 64 && offset + width as u64 <= self.len);
        if width == 0 {
            return 0;
        }
        let word = (offset / 64) as usize;
        let shift = (offset % 64) as u32;
        let mut v = self.words[word] >> shift;
        if shift + width > 64 {
            v |= self.words[word + 1] << (64 - shift);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    #[inline]
    pub fn set_bits(&mut self, offset: u64, width: u32, value: u64) {
        debug_assert!(width <= 64 && offset + width as u64 <= self.len);
        if width == 0 {
            return;
        }
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        debug_assert!(value & !mask == 0, "value {value} wider than {width} bits");
        let value = value & mask;
        let word = (offset / 64) as usize;
        let shift = (offset % 64) as u32;
        self.words[word] = (self.words[word] & !(mask << shift)) | (value << shift);
        if shift + width > 64 {
            let hi = shift + width - 64;
            let hi_mask = (1u64 << hi) - 1;
            self.words[word + 1] = (self.words[word + 1] & !hi_mask) | (value >> (64 - shift));
        }
    }

    /// Reads an arbitrarily wide field as an unsigned big integer.
    pub fn get_wide(&self, offset: u64, width: u64) -> BigUint {
        let mut digits = Vec::with_capacity(width.div_ceil(64) as usize);
        let mut pos = 0;
        while pos < width {
            let w = (width - pos).min(64) as u32;
            digits.push(self.get_bits(offset + pos, w));
            pos += w as u64;
        }
        BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// Writes `value` into a field of `width` bits. The value must fit.
    pub fn set_wide(&mut self, offset: u64, width: u64, value: &BigUint) {
        debug_assert!(value.bits() <= width);
        let digits = value.to_u64_digits();
        let mut pos = 0;
        let mut i = 0;
        while pos < width {
            let w = (width - pos).min(64) as u32;
            self.set_bits(offset + pos, w, digits.get(i).copied().unwrap_or(0));
            pos += w as u64;
            i += 1;
        }
    }

    /// Clears bits `[from, to)`.
    pub fn clear_range(&mut self, from: u64, to: u64) {
        let mut i = from;
        while i < to {
            let w = (to - i).min(64) as u32;
            self.set_bits(i, w, 0);
            i += w as u64;
        }
    }

    /// Index of the first zero bit in `[from, to)`.
    pub fn first_zero(&self, from: u64, to: u64) -> Option<u64> {
        let mut i = from;
        while i < to {
            let w = (to - i).min(64) as u32;
            let v = self.get_bits(i, w);
            let inv = !v & if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
            if inv != 0 {
                return Some(i + inv.trailing_zeros() as u64);
            }
            i += w as u64;
        }
        None
    }

    pub fn count_ones_range(&self, from: u64, to: u64) -> u64 {
        let mut i = from;
        let mut n = 0;
        while i < to {
            let w = (to - i).min(64) as u32;
            n += self.get_bits(i, w).count_ones() as u64;
            i += w as u64;
        }
        n
    }
}

/// Fixed-width unsigned fields in a [`BitVec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedArray {
    bits: BitVec,
    width: u32,
    len: u64,
}

impl PackedArray {
    pub fn new(len: u64, width: u32) -> Self {
        assert!(width <= 64);
        PackedArray {
            bits: BitVec::zeros(len * width as u64),
            width,
            len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn get(&self, i: u64) -> u64 {
        self.bits.get_bits(i * self.width as u64, self.width)
    }

    #[inline]
    pub fn set(&mut self, i: u64, v: u64) {
        self.bits.set_bits(i * self.width as u64, self.width, v)
    }

    /// Storage footprint in bits (exact field payload, not word-rounded).
    pub fn payload_bits(&self) -> u64 {
        self.len * self.width as u64
    }

    pub fn words(&self) -> &[u64] {
        self.bits.words()
    }
}
