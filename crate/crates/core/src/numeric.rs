//! Exact information quantities.
//!
//! Every bit count in the crate is `-log2 q` for an exact rational `q`, so
//! sums, differences and comparisons of such quantities are exact rational
//! operations on their arguments. Real-valued logarithms only appear when a
//! bound takes the log of a bit count; those are handled with certified
//! dyadic intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::codec::Rational;

/// `2^e` as an exact rational.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new_raw(BigInt::one(), p)
    }
}

/// `⌊log2 r⌋` for `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "log of a nonpositive rational");
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let e = num.bits() as i64 - den.bits() as i64;
    let at_least = if e >= 0 {
        *num >= den << (e as u64)
    } else {
        num << ((-e) as u64) >= *den
    };
    if at_least {
        e
    } else {
        e - 1
    }
}

/// `Some(e)` when `r = 2^e` exactly.
pub fn exact_log2(r: &Rational) -> Option<i64> {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let is_pow2 = |v: &BigUint| v.count_ones() == 1;
    if !r.is_positive() || !is_pow2(num) || !is_pow2(den) {
        return None;
    }
    Some(num.bits() as i64 - den.bits() as i64)
}

/// `⌈log2 r⌉` for `r > 0`.
pub fn ceil_log2(r: &Rational) -> i64 {
    match exact_log2(r) {
        Some(e) => e,
        None => floor_log2(r) + 1,
    }
}

/// Certified enclosure of `log2 r`, `r > 0`, of width at most `2^-frac_bits`
/// (a point when `r` is a power of two).
pub fn log2_interval(r: &Rational, frac_bits: u32) -> Interval {
    if let Some(e) = exact_log2(r) {
        return Interval::point(Rational::from_integer(e.into()));
    }
    let e = floor_log2(r);
    let m = r * pow2(-e);
    let prec = 2 * frac_bits as u64 + 32;
    let scaled = m * Rational::from_integer(BigInt::one() << prec);
    let mut lo = scaled.floor().to_integer();
    let mut hi = scaled.ceil().to_integer();
    let two = BigInt::from(2) << prec;
    let mut acc = BigInt::zero();
    let mut depth = 0u32;
    for i in 1..=frac_bits {
        lo = (&lo * &lo) >> prec;
        hi = (&hi * &hi + (BigInt::one() << prec) - 1) >> prec;
        let bit = if lo >= two {
            lo >>= 1;
            hi = (hi + 1) >> 1;
            true
        } else if hi < two {
            false
        } else {
            break;
        };
        acc = (acc << 1) + BigInt::from(u8::from(bit));
        depth = i;
    }
    let base = Rational::from_integer(e.into());
    let scale = pow2(-(depth as i64));
    let lo = &base + Rational::from_integer(acc.clone()) * &scale;
    let hi = base + Rational::from_integer(acc + 1) * scale;
    Interval { lo, hi }
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn shift(&self, c: &Rational) -> Interval {
        Interval {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    /// Multiplication by `c ≥ 0`.
    pub fn scale(&self, c: &Rational) -> Interval {
        assert!(!c.is_negative());
        Interval {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// `log2` of every point, for intervals above zero.
    pub fn log2(&self, frac_bits: u32) -> Interval {
        Interval {
            lo: log2_interval(&self.lo, frac_bits).lo,
            hi: log2_interval(&self.hi, frac_bits).hi,
        }
    }

    /// `Some(true)` if every point is `≤` every point of `other`,
    /// `Some(false)` if every point is `>`, `None` if they overlap.
    pub fn certainly_le(&self, other: &Interval) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// The quantity `-log2 q` for an exact rational `q ≥ 0`; `q = 0` is `+∞`.
///
/// Addition multiplies arguments, so sums of code lengths and
/// log-fidelities stay exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NegLog {
    arg: Rational,
}

const DEFAULT_FRAC_BITS: u32 = 64;

impl NegLog {
    pub fn of(q: Rational) -> Self {
        assert!(!q.is_negative(), "negative argument to -log");
        Self { arg: q }
    }

    pub fn infinite() -> Self {
        Self {
            arg: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self {
            arg: Rational::one(),
        }
    }

    /// The integer value `n`.
    pub fn bits(n: i64) -> Self {
        Self { arg: pow2(-n) }
    }

    pub fn is_infinite(&self) -> bool {
        self.arg.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    /// The `q` in `-log2 q`.
    pub fn argument(&self) -> &Rational {
        &self.arg
    }

    pub fn plus(&self, other: &NegLog) -> NegLog {
        NegLog {
            arg: &self.arg * &other.arg,
        }
    }

    pub fn plus_bits(&self, n: i64) -> NegLog {
        NegLog {
            arg: &self.arg * pow2(-n),
        }
    }

    /// `self - other`; `None` when `other` is infinite.
    pub fn minus(&self, other: &NegLog) -> Option<NegLog> {
        if other.is_infinite() {
            return None;
        }
        Some(NegLog {
            arg: &self.arg / &other.arg,
        })
    }

    /// `Some(n)` when the value is the integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        if self.is_infinite() {
            return None;
        }
        exact_log2(&self.arg).map(|e| -e)
    }

    pub fn floor(&self) -> Option<i64> {
        if self.is_infinite() {
            return None;
        }
        Some(-ceil_log2(&self.arg))
    }

    pub fn ceil(&self) -> Option<i64> {
        if self.is_infinite() {
            return None;
        }
        Some(-floor_log2(&self.arg))
    }

    /// Certified enclosure; `None` for `+∞`.
    pub fn interval(&self, frac_bits: u32) -> Option<Interval> {
        if self.is_infinite() {
            return None;
        }
        Some(log2_interval(&self.arg, frac_bits).neg())
    }

    pub fn to_f64(&self) -> f64 {
        match self.interval(DEFAULT_FRAC_BITS) {
            None => f64::INFINITY,
            Some(iv) => iv.midpoint_f64(),
        }
    }
}

impl Ord for NegLog {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger argument means a smaller value
        other.arg.cmp(&self.arg)
    }
}

impl PartialOrd for NegLog {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NegLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-log2({})", self.arg)
    }
}

impl fmt::Display for NegLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if let Some(n) = self.as_integer() {
            write!(f, "{n}")
        } else {
            write!(f, "{:.6}", self.to_f64())
        }
    }
}

/// Decides `lhs ≤ base + c_log·log2(base + 2) + c_add`.
///
/// The log term clamps its argument at 1. Overlapping enclosures at every
/// tried precision mean exact equality, which counts as holding.
pub fn within_log_bound(lhs: &NegLog, base: &NegLog, c_log: u32, c_add: i64) -> bool {
    if base.is_infinite() {
        return true;
    }
    if lhs.is_infinite() {
        return false;
    }
    let diff = lhs.minus(base).expect("finite base");
    for frac_bits in [64u32, 128, 256] {
        let d = diff.interval(frac_bits).expect("finite difference");
        let b = base.interval(frac_bits).expect("finite base");
        let two = Rational::from_integer(2.into());
        let one = Rational::one();
        let arg = b.shift(&two);
        let arg = Interval {
            lo: arg.lo.max(one.clone()),
            hi: arg.hi.max(one),
        };
        let bound = arg
            .log2(frac_bits)
            .scale(&Rational::from_integer(c_log.into()))
            .shift(&Rational::from_integer(c_add.into()));
        if let Some(v) = d.certainly_le(&bound) {
            return v;
        }
    }
    true
}

/// Smallest integer `c ≥ 0` with `lhs ≤ base + c_log·log2(base+2) + c`;
/// `None` if `lhs` is infinite and `base` finite.
pub fn required_additive_slack(lhs: &NegLog, base: &NegLog, c_log: u32) -> Option<i64> {
    if base.is_infinite() {
        return Some(0);
    }
    if lhs.is_infinite() {
        return None;
    }
    let diff = lhs.minus(base)?.interval(DEFAULT_FRAC_BITS)?;
    let b = base.interval(DEFAULT_FRAC_BITS)?;
    let arg = b.shift(&Rational::from_integer(2.into()));
    let lo = arg.lo.max(Rational::one());
    let log_lo = log2_interval(&lo, DEFAULT_FRAC_BITS).lo * Rational::from_integer(c_log.into());
    let mut c = (diff.hi - log_lo).ceil().to_integer().to_i64()?.max(0);
    // tighten: the enclosure may overshoot by a unit
    while c > 0 && within_log_bound(lhs, base, c_log, c - 1) {
        c -= 1;
    }
    while !within_log_bound(lhs, base, c_log, c) {
        c += 1;
    }
    Some(c)
}

/// Certified bounds `(lo, hi)` on `e^x` for a whole number `x`.
pub fn exp_bounds(x: u64, terms: u64) -> (Rational, Rational) {
    let terms = terms.max(x + 2);
    let xr = Rational::from_integer(x.into());
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for k in 1..=terms {
        term = term * &xr / Rational::from_integer(k.into());
        sum += &term;
    }
    // tail ≤ next term · 1/(1 - x/(terms+2))
    let next = &term * &xr / Rational::from_integer((terms + 1).into());
    let ratio = &xr / Rational::from_integer((terms + 2).into());
    let tail = next / (Rational::one() - ratio);
    let hi = &sum + tail;
    (sum, hi)
}

/// Decides `e ≤ exp(-x)` exactly.
pub fn le_exp_neg(e: &Rational, x: u64) -> bool {
    if x == 0 {
        return *e <= Rational::one();
    }
    let mut terms = 2 * x + 16;
    loop {
        let (lo, hi) = exp_bounds(x, terms);
        // exp(-x) ∈ [1/hi, 1/lo]
        if *e <= hi.recip() {
            return true;
        }
        if *e > lo.recip() {
            return false;
        }
        terms *= 2;
    }
}

/// Integer square root, rounding down.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}
