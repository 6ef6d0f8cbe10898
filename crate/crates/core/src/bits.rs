//! Finite binary strings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite binary string with explicit length.
///
/// Stored one `bool` per bit. Strings in this crate are short (programs,
/// code words) or read-mostly (auxiliary tapes), so clarity wins over
/// packing; [`BitString::to_packed`] gives the dense on-disk form.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_slice(bits: &[bool]) -> Self {
        Self {
            bits: bits.to_vec(),
        }
    }

    /// `n` copies of `bit`.
    pub fn repeat(bit: bool, n: usize) -> Self {
        Self {
            bits: vec![bit; n],
        }
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let bits = (0..width)
            .rev()
            .map(|i| if i >= 64 { false } else { (value >> i) & 1 == 1 })
            .collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.bits.pop()
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn extend_from_slice(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Appends one bit, returning a new string.
    pub fn child(&self, bit: bool) -> BitString {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    /// `x⁻`: the string with its last bit removed, `None` for the empty string.
    pub fn parent(&self) -> Option<BitString> {
        if self.bits.is_empty() {
            None
        } else {
            Some(Self::from_slice(&self.bits[..self.bits.len() - 1]))
        }
    }

    pub fn prefix(&self, n: usize) -> BitString {
        Self::from_slice(&self.bits[..n.min(self.bits.len())])
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// `self ◁ other`: some `x` has `x0 ⊑ self` and `x1 ⊑ other`.
    pub fn is_left_of(&self, other: &BitString) -> bool {
        for (a, b) in self.bits.iter().zip(&other.bits) {
            if a != b {
                return !*a && *b;
            }
        }
        false
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Binary value of the string, `None` above 64 bits.
    pub fn value_u64(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(
            self.bits
                .iter()
                .fold(0u64, |acc, &b| (acc << 1) | u64::from(b)),
        )
    }

    /// Length-increasing lexicographic comparison (the ξ ordering).
    pub fn xi_cmp(&self, other: &BitString) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }

    /// Dense form: 8-byte little-endian bit length, then the bits packed
    /// MSB-first, final byte zero-padded.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.bits.len().div_ceil(8));
        out.extend_from_slice(&(self.bits.len() as u64).to_le_bytes());
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            out.push(byte);
        }
        out
    }

    /// Inverse of [`BitString::to_packed`]; returns the string and the
    /// number of bytes consumed.
    pub fn from_packed(bytes: &[u8]) -> Result<(BitString, usize)> {
        if bytes.len() < 8 {
            return Err(Error::Truncated);
        }
        let mut header = [0u8; 8];
        header.copy_from_slice(&bytes[..8]);
        let len = u64::from_le_bytes(header) as usize;
        let nbytes = len.div_ceil(8);
        let body = bytes.get(8..8 + nbytes).ok_or(Error::Truncated)?;
        let bits = (0..len)
            .map(|i| body[i / 8] & (0x80 >> (i % 8)) != 0)
            .collect();
        if len % 8 != 0 {
            let pad_mask = 0xffu8 >> (len % 8);
            if body[nbytes - 1] & pad_mask != 0 {
                return Err(Error::MalformedCode("nonzero padding bits".into()));
            }
        }
        Ok((BitString { bits }, 8 + nbytes))
    }

    /// Text form used in files: the bits, or `-` for the empty string.
    pub fn to_field(&self) -> String {
        if self.bits.is_empty() {
            "-".to_string()
        } else {
            self.to_string()
        }
    }

    pub fn from_field(s: &str) -> Result<BitString> {
        if s == "-" {
            Ok(BitString::new())
        } else {
            s.parse()
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString::from_bits)
    }
}

impl From<&str> for BitString {
    /// Panics on characters other than `0`/`1`; meant for literals.
    fn from(s: &str) -> Self {
        s.parse().expect("bit-string literal")
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain lexicographic order; use [`BitString::xi_cmp`] for the ξ ordering.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits.cmp(&other.bits)
    }
}
