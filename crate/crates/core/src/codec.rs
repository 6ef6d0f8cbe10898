//! Self-delimiting codes.
//!
//! Every code here is bit-exact and prefix-free within its kind. Decoders
//! are told which grammar to expect; no type tags are ever emitted.
//!
//! Building blocks:
//!
//! * `ξ_n` identifies whole numbers with nonempty strings in
//!   length-increasing lexicographic order: `0, 1, 00, 01, 10, 11, 000, ...`.
//! * `⟨x⟩′ = 1^{‖x‖} 0 x`.
//! * `⟨x⟩ = ⟨ξ_{‖x‖}⟩′ 0 x`.
//! * A whole number `n` is coded as `⟨ξ_n⟩`; an integer `z` as the whole
//!   number `2z` (z ≥ 0) or `-2z-1` (z < 0).
//! * A tuple of already-coded parts is `⟨m⟩ part_1 … part_m`; a rational
//!   `p/q` in lowest terms is the tuple `(p, q)`.
//! * A finite set is a tuple whose part codes are sorted lexicographically
//!   and distinct. Primitive maps and measures are sets of pairs.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Exact rational in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `ξ_n`: the `(n+1)`th nonempty string in length-increasing
/// lexicographic order. This is `n + 2` in binary without its leading one.
pub fn xi_index_to_string(n: &BigUint) -> BitString {
    let v = n + 2u32;
    let nbits = v.bits() as usize;
    (0..nbits - 1)
        .rev()
        .map(|i| v.bit(i as u64))
        .collect()
}

pub fn xi_index_to_string_u64(n: u64) -> BitString {
    xi_index_to_string(&BigUint::from(n))
}

/// Inverse of [`xi_index_to_string`]. The empty string has no index.
pub fn xi_string_to_index(s: &BitString) -> Result<BigUint> {
    if s.is_empty() {
        return Err(Error::MalformedCode("the empty string is not a ξ string".into()));
    }
    let mut v = BigUint::one();
    for &b in s.as_slice() {
        v <<= 1u32;
        if b {
            v += 1u32;
        }
    }
    Ok(v - 2u32)
}

pub fn xi_string_to_index_u64(s: &BitString) -> Result<u64> {
    xi_string_to_index(s)?
        .to_u64()
        .ok_or_else(|| Error::MalformedCode("index exceeds 64 bits".into()))
}

/// `⟨x⟩′ = 1^{‖x‖} 0 x`.
pub fn encode_unary_guarded(x: &BitString) -> BitString {
    let mut out = BitString::with_capacity(2 * x.len() + 1);
    out.extend_from(&BitString::repeat(true, x.len()));
    out.push(false);
    out.extend_from(x);
    out
}

/// `⟨x⟩ = ⟨ξ_{‖x‖}⟩′ 0 x`.
pub fn encode_efficient(x: &BitString) -> BitString {
    let header = encode_unary_guarded(&xi_index_to_string_u64(x.len() as u64));
    let mut out = BitString::with_capacity(header.len() + 1 + x.len());
    out.extend_from(&header);
    out.push(false);
    out.extend_from(x);
    out
}

pub fn encode_whole(n: &BigUint) -> BitString {
    encode_efficient(&xi_index_to_string(n))
}

pub fn encode_whole_u64(n: u64) -> BitString {
    encode_whole(&BigUint::from(n))
}

fn zigzag(z: &BigInt) -> BigUint {
    match z.sign() {
        Sign::Minus => (z.magnitude() << 1u32) - 1u32,
        _ => z.magnitude() << 1u32,
    }
}

fn unzigzag(w: &BigUint) -> BigInt {
    if w.is_odd() {
        -BigInt::from((w + 1u32) >> 1u32)
    } else {
        BigInt::from(w >> 1u32)
    }
}

pub fn encode_integer(z: &BigInt) -> BitString {
    encode_whole(&zigzag(z))
}

/// `⟨m⟩ part_1 … part_m` for parts that are already self-delimiting.
pub fn encode_tuple(parts: &[BitString]) -> BitString {
    let mut out = encode_whole_u64(parts.len() as u64);
    for p in parts {
        out.extend_from(p);
    }
    out
}

/// Tuple of strings `⟨x_1,…,x_m⟩ = ⟨m⟩⟨x_1⟩…⟨x_m⟩`.
pub fn encode_string_tuple(items: &[BitString]) -> BitString {
    let parts: Vec<BitString> = items.iter().map(encode_efficient).collect();
    encode_tuple(&parts)
}

/// Finite set of strings: element codes sorted lexicographically.
/// Duplicates are collapsed.
pub fn encode_string_set(items: &[BitString]) -> BitString {
    encode_set_of_codes(items.iter().map(encode_efficient).collect())
}

fn encode_set_of_codes(mut codes: Vec<BitString>) -> BitString {
    codes.sort();
    codes.dedup();
    encode_tuple(&codes)
}

pub fn encode_rational(r: &Rational) -> BitString {
    encode_tuple(&[
        encode_integer(r.numer()),
        encode_whole(r.denom().magnitude()),
    ])
}

/// Finite map between whole numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrimitiveMap {
    entries: BTreeMap<u64, u64>,
}

impl PrimitiveMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            if entries.insert(k, v).is_some() {
                return Err(Error::MalformedCode(format!("duplicate key {k}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: u64) -> Option<u64> {
        self.entries.get(&key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    /// `⟨F⟩ = ⟨{(a, F(a))}⟩`.
    pub fn encode(&self) -> BitString {
        encode_set_of_codes(
            self.entries
                .iter()
                .map(|(k, v)| encode_tuple(&[encode_whole_u64(*k), encode_whole_u64(*v)]))
                .collect(),
        )
    }
}

/// Measure over whole numbers with finite support and rational masses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimitiveMeasure {
    entries: BTreeMap<BigUint, Rational>,
}

impl PrimitiveMeasure {
    /// Zero masses are dropped; negative masses are rejected.
    pub fn from_pairs<I: IntoIterator<Item = (BigUint, Rational)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            if v.is_negative() {
                return Err(Error::MalformedCode("negative mass".into()));
            }
            if v.is_zero() {
                continue;
            }
            if entries.insert(k.clone(), v).is_some() {
                return Err(Error::MalformedCode(format!("duplicate key {k}")));
            }
        }
        Ok(Self { entries })
    }

    /// Uniform probability measure on the given points.
    pub fn uniform<I: IntoIterator<Item = BigUint>>(points: I) -> Result<Self> {
        let pts: Vec<BigUint> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::ZeroMass);
        }
        let mass = Rational::new(1.into(), BigInt::from(pts.len()));
        Self::from_pairs(pts.into_iter().map(|p| (p, mass.clone())))
    }

    pub fn mass(&self, key: &BigUint) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Set iff the masses sum to exactly one.
    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }

    pub fn support(&self) -> impl Iterator<Item = &BigUint> + '_ {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, &Rational)> + '_ {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨Q⟩ = ⟨{(a, Q(a)) : a ∈ Supp(Q)}⟩`.
    pub fn encode(&self) -> BitString {
        encode_set_of_codes(
            self.entries
                .iter()
                .map(|(k, v)| encode_tuple(&[encode_whole(k), encode_rational(v)]))
                .collect(),
        )
    }
}

/// Cursor over a bit buffer. Reading past the end is [`Error::Truncated`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn is_at_end(&self) -> bool {
        self.pos == self.bits.len()
    }

    /// The unread tail.
    pub fn rest(&self) -> &'a [bool] {
        &self.bits[self.pos..]
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let b = *self.bits.get(self.pos).ok_or(Error::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_bits(&mut self, n: usize) -> Result<&'a [bool]> {
        if n > self.remaining() {
            // consume nothing; the caller sees where the code would have ended
            return Err(Error::Truncated);
        }
        let out = &self.bits[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    /// Reads a fixed-width unsigned field, most significant bit first.
    pub fn read_u64(&mut self, width: usize) -> Result<u64> {
        let bits = self.read_bits(width)?;
        Ok(bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }

    pub fn read_unary_guarded(&mut self) -> Result<BitString> {
        let mut n = 0usize;
        while self.read_bit()? {
            n += 1;
        }
        Ok(BitString::from_slice(self.read_bits(n)?))
    }

    pub fn read_efficient(&mut self) -> Result<BitString> {
        let header = self.read_unary_guarded()?;
        let index = xi_string_to_index(&header)?;
        if self.read_bit()? {
            return Err(Error::MalformedCode("missing separator after length header".into()));
        }
        let n = index.to_usize().ok_or(Error::Truncated)?;
        Ok(BitString::from_slice(self.read_bits(n)?))
    }

    pub fn read_whole(&mut self) -> Result<BigUint> {
        let s = self.read_efficient()?;
        xi_string_to_index(&s)
    }

    /// Whole number that must fit in `u64`.
    pub fn read_whole_u64(&mut self) -> Result<u64> {
        self.read_whole()?
            .to_u64()
            .ok_or_else(|| Error::MalformedCode("whole number exceeds 64 bits".into()))
    }

    /// Tuple arity that must fit in memory bounds of the buffer.
    pub fn read_arity(&mut self) -> Result<usize> {
        let m = self.read_whole()?;
        // every part takes at least one bit
        match m.to_usize() {
            Some(m) if m <= self.remaining() => Ok(m),
            _ => Err(Error::Truncated),
        }
    }

    pub fn read_integer(&mut self) -> Result<BigInt> {
        Ok(unzigzag(&self.read_whole()?))
    }

    pub fn read_rational(&mut self) -> Result<Rational> {
        self.expect_arity(2)?;
        let p = self.read_integer()?;
        let q = self.read_whole()?;
        if q.is_zero() {
            return Err(Error::MalformedCode("zero denominator".into()));
        }
        let q = BigInt::from(q);
        if !p.gcd(&q).is_one() {
            return Err(Error::MalformedCode("rational not in lowest terms".into()));
        }
        Ok(Rational::new_raw(p, q))
    }

    pub fn expect_arity(&mut self, m: usize) -> Result<()> {
        let got = self.read_whole()?;
        if got != BigUint::from(m) {
            return Err(Error::MalformedCode(format!("expected a {m}-tuple, found arity {got}")));
        }
        Ok(())
    }

    pub fn read_string_tuple(&mut self) -> Result<Vec<BitString>> {
        let m = self.read_arity()?;
        (0..m).map(|_| self.read_efficient()).collect()
    }

    /// Reads `m` parts with `part`, checking the parts are strictly
    /// increasing as raw code words (the canonical set order).
    fn read_set<T>(&mut self, mut part: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let m = self.read_arity()?;
        let mut out = Vec::with_capacity(m);
        let mut prev: Option<&'a [bool]> = None;
        for _ in 0..m {
            let start = self.pos;
            out.push(part(self)?);
            let code = &self.bits[start..self.pos];
            if let Some(p) = prev {
                if p >= code {
                    return Err(Error::MalformedCode("set elements not in canonical order".into()));
                }
            }
            prev = Some(code);
        }
        Ok(out)
    }

    pub fn read_string_set(&mut self) -> Result<Vec<BitString>> {
        self.read_set(|r| r.read_efficient())
    }

    pub fn read_map(&mut self) -> Result<PrimitiveMap> {
        let pairs = self.read_set(|r| {
            r.expect_arity(2)?;
            Ok((r.read_whole_u64()?, r.read_whole_u64()?))
        })?;
        PrimitiveMap::from_pairs(pairs)
    }

    pub fn read_measure(&mut self) -> Result<PrimitiveMeasure> {
        let pairs = self.read_set(|r| {
            r.expect_arity(2)?;
            Ok((r.read_whole()?, r.read_rational()?))
        })?;
        if pairs.iter().any(|(_, v)| v.is_zero()) {
            return Err(Error::MalformedCode("zero mass listed in support".into()));
        }
        PrimitiveMeasure::from_pairs(pairs)
    }
}

/// Grammar requested from [`decode_stream`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    /// `⟨x⟩′`
    UnaryGuarded,
    /// `⟨x⟩`
    String,
    Whole,
    Integer,
    Rational,
    StringSet,
    StringTuple,
    Map,
    Measure,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    String(BitString),
    Whole(BigUint),
    Integer(BigInt),
    Rational(Rational),
    StringSet(Vec<BitString>),
    StringTuple(Vec<BitString>),
    Map(PrimitiveMap),
    Measure(PrimitiveMeasure),
}

impl Value {
    pub fn encode(&self) -> BitString {
        match self {
            Value::String(s) => encode_efficient(s),
            Value::Whole(n) => encode_whole(n),
            Value::Integer(z) => encode_integer(z),
            Value::Rational(r) => encode_rational(r),
            Value::StringSet(items) => encode_string_set(items),
            Value::StringTuple(items) => encode_string_tuple(items),
            Value::Map(m) => m.encode(),
            Value::Measure(q) => q.encode(),
        }
    }
}

/// Decodes one code word of `kind` from the front of `buffer`, returning
/// the value and the exact number of bits consumed. Never reads beyond the
/// end of the code word.
pub fn decode_stream(buffer: &[bool], kind: CodeKind) -> Result<(Value, usize)> {
    let mut r = BitReader::new(buffer);
    let v = match kind {
        CodeKind::UnaryGuarded => Value::String(r.read_unary_guarded()?),
        CodeKind::String => Value::String(r.read_efficient()?),
        CodeKind::Whole => Value::Whole(r.read_whole()?),
        CodeKind::Integer => Value::Integer(r.read_integer()?),
        CodeKind::Rational => Value::Rational(r.read_rational()?),
        CodeKind::StringSet => Value::StringSet(r.read_string_set()?),
        CodeKind::StringTuple => Value::StringTuple(r.read_string_tuple()?),
        CodeKind::Map => Value::Map(r.read_map()?),
        CodeKind::Measure => Value::Measure(r.read_measure()?),
    };
    Ok((v, r.position()))
}

/// Decodes a buffer that must hold exactly one code word of `kind`.
pub fn decode_exact(buffer: &BitString, kind: CodeKind) -> Result<Value> {
    let (v, used) = decode_stream(buffer.as_slice(), kind)?;
    if used != buffer.len() {
        return Err(Error::MalformedCode("trailing bits after code word".into()));
    }
    Ok(v)
}

/// `a_1 b_1 a_2 b_2 …` for equal-length finite prefixes.
pub fn interleave(a: &BitString, b: &BitString) -> Result<BitString> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .flat_map(|(x, y)| [*x, *y])
        .collect())
}

pub fn deinterleave(s: &BitString) -> Result<(BitString, BitString)> {
    if s.len() % 2 != 0 {
        return Err(Error::Truncated);
    }
    let a = s.as_slice().iter().step_by(2).copied().collect();
    let b = s.as_slice().iter().skip(1).step_by(2).copied().collect();
    Ok((a, b))
}

/// `⟨x, α⟩ = ⟨x⟩ α` for a finite `x` and a pull-based stream `α`.
pub struct CodedStream<I> {
    head: std::vec::IntoIter<bool>,
    tail: I,
}

impl<I: Iterator<Item = bool>> CodedStream<I> {
    pub fn new(x: &BitString, tail: I) -> Self {
        Self {
            head: encode_efficient(x).into_bits().into_iter(),
            tail,
        }
    }
}

impl<I: Iterator<Item = bool>> Iterator for CodedStream<I> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        self.head.next().or_else(|| self.tail.next())
    }
}

/// `⟨x⟩α` for a finite `α`: how two strings share one auxiliary tape.
pub fn pair_with_tail(x: &BitString, alpha: &BitString) -> BitString {
    encode_efficient(x).concat(alpha)
}

/// Splits `⟨x⟩α` back into `(x, α)`.
pub fn split_coded_head(bits: &[bool]) -> Result<(BitString, &[bool])> {
    let mut r = BitReader::new(bits);
    let head = r.read_efficient()?;
    Ok((head, r.rest()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::from(s)
    }

    #[test]
    fn xi_table() {
        let expect = ["0", "1", "00", "01", "10", "11", "000"];
        for (n, s) in expect.iter().enumerate() {
            assert_eq!(xi_index_to_string_u64(n as u64), bs(s));
            assert_eq!(xi_string_to_index_u64(&bs(s)).unwrap(), n as u64);
        }
        assert_eq!(xi_index_to_string_u64(12), bs("110"));
        assert_eq!(xi_index_to_string_u64(13), bs("111"));
        assert!(xi_string_to_index(&BitString::new()).is_err());
    }

    #[test]
    fn unary_guarded_examples() {
        assert_eq!(encode_unary_guarded(&BitString::new()), bs("0"));
        assert_eq!(encode_unary_guarded(&bs("101")), bs("1110101"));
    }

    #[test]
    fn efficient_examples() {
        assert_eq!(encode_efficient(&bs("11111")), bs("11011011111"));
        // ξ_0 = "0", ⟨"0"⟩′ = "100", then the separator
        assert_eq!(encode_efficient(&BitString::new()), bs("1000"));
        let (v, used) = decode_stream(bs("1000").as_slice(), CodeKind::String).unwrap();
        assert_eq!(v, Value::String(BitString::new()));
        assert_eq!(used, 4);
    }

    #[test]
    fn decode_ignores_trailing_bits() {
        let buf = bs("110110111110101");
        let (v, used) = decode_stream(buf.as_slice(), CodeKind::String).unwrap();
        assert_eq!(v, Value::String(bs("11111")));
        assert_eq!(used, 11);
    }

    #[test]
    fn decode_errors() {
        // header decodes to the empty string, which names no length
        assert!(matches!(
            decode_stream(bs("0").as_slice(), CodeKind::String),
            Err(Error::MalformedCode(_))
        ));
        // separator bit must be zero
        assert!(matches!(
            decode_stream(bs("1001").as_slice(), CodeKind::String),
            Err(Error::MalformedCode(_))
        ));
        assert!(matches!(
            decode_stream(bs("1101101111").as_slice(), CodeKind::String),
            Err(Error::Truncated)
        ));
    }

    #[test]
    fn set_of_two_strings() {
        let set = encode_string_set(&[bs("1"), bs("0")]);
        let expect = encode_whole_u64(2)
            .concat(&encode_efficient(&bs("0")))
            .concat(&encode_efficient(&bs("1")));
        assert_eq!(set, expect);
        let v = decode_exact(&set, CodeKind::StringSet).unwrap();
        assert_eq!(v, Value::StringSet(vec![bs("0"), bs("1")]));
    }

    #[test]
    fn non_canonical_set_rejected() {
        let swapped = encode_whole_u64(2)
            .concat(&encode_efficient(&bs("1")))
            .concat(&encode_efficient(&bs("0")));
        assert!(decode_exact(&swapped, CodeKind::StringSet).is_err());
        // the same order is fine for a tuple
        assert!(decode_exact(&swapped, CodeKind::StringTuple).is_ok());
    }

    #[test]
    fn rational_is_a_pair() {
        let r = Rational::new(3.into(), 4.into());
        let expect = encode_tuple(&[encode_integer(&3.into()), encode_whole_u64(4)]);
        assert_eq!(encode_rational(&r), expect);
        assert_eq!(
            decode_exact(&expect, CodeKind::Rational).unwrap(),
            Value::Rational(r)
        );
        let neg = Rational::new((-7).into(), 2.into());
        assert_eq!(
            decode_exact(&encode_rational(&neg), CodeKind::Rational).unwrap(),
            Value::Rational(neg)
        );
    }

    #[test]
    fn unreduced_rational_rejected() {
        let bad = encode_tuple(&[encode_integer(&2.into()), encode_whole_u64(4)]);
        assert!(decode_exact(&bad, CodeKind::Rational).is_err());
    }

    #[test]
    fn single_pair_map() {
        let f = PrimitiveMap::from_pairs([(2, 5)]).unwrap();
        let pair = encode_tuple(&[encode_whole_u64(2), encode_whole_u64(5)]);
        assert_eq!(f.encode(), encode_tuple(&[pair]));
        assert_eq!(decode_exact(&f.encode(), CodeKind::Map).unwrap(), Value::Map(f));
    }

    #[test]
    fn measure_probability_flag() {
        let q = PrimitiveMeasure::uniform((0u32..4).map(BigUint::from)).unwrap();
        assert!(q.is_probability());
        let half = PrimitiveMeasure::from_pairs([(BigUint::from(1u32), Rational::new(1.into(), 2.into()))]).unwrap();
        assert!(!half.is_probability());
        assert_eq!(
            decode_exact(&q.encode(), CodeKind::Measure).unwrap(),
            Value::Measure(q)
        );
    }

    #[test]
    fn interleave_roundtrip() {
        let a = bs("0011");
        let b = bs("0101");
        let z = interleave(&a, &b).unwrap();
        assert_eq!(z, bs("00011011"));
        assert_eq!(deinterleave(&z).unwrap(), (a, b));
        assert!(interleave(&bs("0"), &bs("01")).is_err());
    }

    #[test]
    fn coded_stream_prefix() {
        let s: BitString = CodedStream::new(&bs("1"), std::iter::repeat(true).take(3)).collect();
        assert_eq!(s, encode_efficient(&bs("1")).concat(&bs("111")));
        let (head, rest) = split_coded_head(s.as_slice()).unwrap();
        assert_eq!(head, bs("1"));
        assert_eq!(rest, &[true, true, true]);
    }
}
