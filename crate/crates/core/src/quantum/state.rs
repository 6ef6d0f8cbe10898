use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bits::BitString;
use crate::codec::{encode_tuple, BitReader, Rational};
use crate::error::{Error, Result};
use crate::numeric::{floor_log2, pow2};

use super::complex::ComplexRational;

/// Approximate states must have `|Σ|c_n|² - 1| ≤ 2^-NORM_TOLERANCE_BITS`.
pub const NORM_TOLERANCE_BITS: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// Exactly unit norm.
    Primitive,
    /// Unit norm within the tolerance.
    Approximate,
}

/// Pure state on `N` qubits with exact rational amplitudes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PureState {
    qubits: usize,
    amps: Vec<ComplexRational>,
    kind: StateKind,
}

pub(crate) fn dim_of(qubits: usize) -> usize {
    1usize << qubits
}

/// `Some(n)` when `dim = 2^n`.
pub(crate) fn qubits_of(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

impl PureState {
    /// Classifies by norm: exact unit norm is primitive, near-unit is
    /// approximate, anything else is rejected.
    pub fn new(qubits: usize, amps: Vec<ComplexRational>) -> Result<Self> {
        if amps.len() != dim_of(qubits) {
            return Err(Error::DimensionMismatch {
                expected: dim_of(qubits),
                found: amps.len(),
            });
        }
        let n = norm_sqr(&amps);
        let kind = if n.is_one() {
            StateKind::Primitive
        } else if (n - Rational::one()).abs() <= pow2(-NORM_TOLERANCE_BITS) {
            StateKind::Approximate
        } else {
            return Err(Error::NotNormalized);
        };
        Ok(Self { qubits, amps, kind })
    }

    /// Like [`PureState::new`] but insists on exact unit norm.
    pub fn primitive(qubits: usize, amps: Vec<ComplexRational>) -> Result<Self> {
        let s = Self::new(qubits, amps)?;
        if s.kind != StateKind::Primitive {
            return Err(Error::NotNormalized);
        }
        Ok(s)
    }

    /// Scales `amps` to unit norm within `2^-96` using an integer square
    /// root, so the result stays rational.
    pub fn normalized(qubits: usize, amps: Vec<ComplexRational>) -> Result<Self> {
        let n = norm_sqr(&amps);
        if n.is_zero() {
            return Err(Error::NotNormalized);
        }
        if n.is_one() {
            return Self::new(qubits, amps);
        }
        // bring the norm into [1, 4) so the root keeps full precision
        let shift = pow2(-(floor_log2(&n).div_euclid(2)));
        let amps: Vec<ComplexRational> = amps.iter().map(|a| a.scale(&shift)).collect();
        let n = norm_sqr(&amps);
        const PREC: u64 = 96;
        let scaled = n * Rational::from_integer(BigInt::one() << (2 * PREC));
        let root = scaled.to_integer().magnitude().sqrt();
        if root.is_zero() {
            return Err(Error::NotNormalized);
        }
        let inv = Rational::new(BigInt::one() << PREC, BigInt::from(root));
        let amps = amps.iter().map(|a| a.scale(&inv)).collect();
        Self::new(qubits, amps)
    }

    /// `|index⟩` in the computational basis.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![ComplexRational::zero(); dim_of(qubits)];
        amps[index] = ComplexRational::one();
        Self {
            qubits,
            amps,
            kind: StateKind::Primitive,
        }
    }

    /// `|0^N⟩`.
    pub fn zero_state(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[ComplexRational] {
        &self.amps
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_primitive(&self) -> bool {
        self.kind == StateKind::Primitive
    }

    pub fn norm_sqr(&self) -> Rational {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<ComplexRational> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                found: other.qubits,
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Multiplies every amplitude by a unit-modulus `phase`.
    pub fn with_phase(&self, phase: &ComplexRational) -> Result<Self> {
        if !phase.norm_sqr().is_one() {
            return Err(Error::NotNormalized);
        }
        Ok(Self {
            qubits: self.qubits,
            amps: self.amps.iter().map(|a| a * phase).collect(),
            kind: self.kind,
        })
    }

    /// `|self⟩ ⊗ |0^extra⟩`.
    pub fn pad_zeros(&self, extra: usize) -> Self {
        let mut amps = vec![ComplexRational::zero(); dim_of(self.qubits + extra)];
        for (a, c) in self.amps.iter().enumerate() {
            amps[a << extra] = c.clone();
        }
        Self {
            qubits: self.qubits + extra,
            amps,
            kind: self.kind,
        }
    }

    /// `⟨|ψ⟩⟩`: the tuple of amplitude codes.
    pub fn encode(&self) -> BitString {
        encode_state_amplitudes(&self.amps)
    }

    /// Reads a state code; the amplitude count fixes `N`.
    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        let m = r.read_arity()?;
        let qubits = qubits_of(m)
            .ok_or_else(|| Error::MalformedCode(format!("{m} amplitudes is not a power of two")))?;
        let amps = (0..m)
            .map(|_| ComplexRational::read(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(qubits, amps)
    }

    /// Decodes a buffer holding exactly one state code.
    pub fn decode(bits: &BitString) -> Result<Self> {
        let mut r = BitReader::new(bits.as_slice());
        let s = Self::read(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::MalformedCode("trailing bits after state".into()));
        }
        Ok(s)
    }

    /// Text form: `state N kind` then one `re im` fraction pair per line.
    pub fn to_text(&self) -> String {
        let kind = match self.kind {
            StateKind::Primitive => "primitive",
            StateKind::Approximate => "approximate",
        };
        let mut out = format!("state {} {}\n", self.qubits, kind);
        for a in &self.amps {
            let _ = writeln!(out, "{}", a.to_field());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty state file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "state" {
            return Err(Error::Parse(format!("bad state header {header:?}")));
        }
        let qubits: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit count {:?}", fields[1])))?;
        let amps = lines
            .map(ComplexRational::from_field)
            .collect::<Result<Vec<_>>>()?;
        let s = Self::new(qubits, amps)?;
        let declared = match fields[2] {
            "primitive" => StateKind::Primitive,
            "approximate" => StateKind::Approximate,
            other => return Err(Error::Parse(format!("unknown state kind {other:?}"))),
        };
        if declared == StateKind::Primitive && !s.is_primitive() {
            return Err(Error::NotNormalized);
        }
        Ok(s)
    }
}

pub(crate) fn encode_state_amplitudes(amps: &[ComplexRational]) -> BitString {
    let parts: Vec<BitString> = amps.iter().map(ComplexRational::encode).collect();
    encode_tuple(&parts)
}

pub(crate) fn norm_sqr(v: &[ComplexRational]) -> Rational {
    v.iter().fold(Rational::zero(), |acc, c| acc + c.norm_sqr())
}

/// `Σ conj(a_i) b_i`.
pub(crate) fn inner(a: &[ComplexRational], b: &[ComplexRational]) -> ComplexRational {
    let mut acc = ComplexRational::zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(&x.conj() * y);
    }
    acc
}

/// `|⟨ψ|φ⟩|²`, exact.
pub fn fidelity(psi: &PureState, phi: &PureState) -> Result<Rational> {
    Ok(psi.inner(phi)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn three_four() -> PureState {
        PureState::primitive(
            1,
            vec![ComplexRational::real(r(3, 5)), ComplexRational::real(r(4, 5))],
        )
        .unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let psi = three_four();
        let zero = PureState::zero_state(1);
        assert_eq!(fidelity(&psi, &zero).unwrap(), r(9, 25));
        assert_eq!(fidelity(&psi, &psi).unwrap(), r(1, 1));
        assert_eq!(fidelity(&PureState::basis(2, 1), &PureState::basis(2, 2)).unwrap(), r(0, 1));
        assert!(fidelity(&psi, &PureState::zero_state(2)).is_err());
    }

    #[test]
    fn phase_invariance() {
        let psi = three_four();
        let phase = ComplexRational::new(r(3, 5), r(-4, 5));
        let rotated = psi.with_phase(&phase).unwrap();
        let zero = PureState::zero_state(1);
        assert_eq!(fidelity(&rotated, &zero).unwrap(), fidelity(&psi, &zero).unwrap());
    }

    #[test]
    fn normalization_classes() {
        let amps = vec![ComplexRational::from_ints(1, 0), ComplexRational::from_ints(1, 0)];
        assert!(matches!(PureState::new(1, amps.clone()), Err(Error::NotNormalized)));
        let s = PureState::normalized(1, amps).unwrap();
        assert_eq!(s.kind(), StateKind::Approximate);
        let err = (s.norm_sqr() - Rational::one()).abs();
        assert!(err <= pow2(-90));
    }

    #[test]
    fn code_roundtrip_and_padding() {
        let psi = three_four();
        assert_eq!(PureState::decode(&psi.encode()).unwrap(), psi);
        let padded = psi.pad_zeros(1);
        assert_eq!(padded.amplitudes()[0], ComplexRational::real(r(3, 5)));
        assert_eq!(padded.amplitudes()[2], ComplexRational::real(r(4, 5)));
        assert!(padded.amplitudes()[1].is_zero());
    }

    #[test]
    fn text_roundtrip() {
        let psi = three_four();
        let text = psi.to_text();
        assert!(text.starts_with("state 1 primitive\n3/5 0/1\n"));
        assert_eq!(PureState::from_text(&text).unwrap(), psi);
    }
}
