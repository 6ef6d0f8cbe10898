use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::codec::{encode_rational, encode_tuple, BitReader, Rational};
use crate::error::{Error, Result};

/// Complex number with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            Rational::from_integer(re.into()),
            Rational::from_integer(im.into()),
        )
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|c|² = re² + im²`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.re * c, &self.im * c)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// `⟨c⟩ = ⟨⟨re⟩, ⟨im⟩⟩`.
    pub fn encode(&self) -> BitString {
        encode_tuple(&[encode_rational(&self.re), encode_rational(&self.im)])
    }

    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        r.expect_arity(2)?;
        let re = r.read_rational()?;
        let im = r.read_rational()?;
        Ok(Self { re, im })
    }

    /// `re_num/re_den im_num/im_den`.
    pub fn to_field(&self) -> String {
        format!(
            "{}/{} {}/{}",
            self.re.numer(),
            self.re.denom(),
            self.im.numer(),
            self.im.denom()
        )
    }

    pub fn from_field(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let re = parse_fraction(parts.next().ok_or_else(|| Error::Parse("missing real part".into()))?)?;
        let im = parse_fraction(parts.next().ok_or_else(|| Error::Parse("missing imaginary part".into()))?)?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("extra fields in entry {s:?}")));
        }
        Ok(Self { re, im })
    }
}

/// Parses `p/q` or a bare integer.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid fraction {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.parse().map_err(|_| bad())?;
            let q: num_bigint::BigInt = q.parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

impl<'a> Add<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn sub(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn mul(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Add for ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: ComplexRational) -> ComplexRational {
        &self + &o
    }
}

impl Sub for ComplexRational {
    type Output = ComplexRational;
    fn sub(self, o: ComplexRational) -> ComplexRational {
        &self - &o
    }
}

impl Mul for ComplexRational {
    type Output = ComplexRational;
    fn mul(self, o: ComplexRational) -> ComplexRational {
        &self * &o
    }
}

impl AddAssign<&ComplexRational> for ComplexRational {
    fn add_assign(&mut self, o: &ComplexRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-&self.re, -&self.im)
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        -&self
    }
}
