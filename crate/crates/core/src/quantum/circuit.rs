use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::codec::{encode_tuple, encode_whole_u64, BitReader, Rational};
use crate::error::{Error, Result};

use super::complex::ComplexRational;
use super::matrix::{parse_matrix_text, Matrix, PrimitiveUnitary};
use super::state::{dim_of, inner, norm_sqr, PureState};

/// Circuit `(V, M)`: input `|θ⟩` on `M` qubits maps to `V|θ0…0⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    unitary: PrimitiveUnitary,
    inputs: usize,
}

impl Circuit {
    pub fn new(unitary: PrimitiveUnitary, inputs: usize) -> Result<Self> {
        if inputs > unitary.qubits() {
            return Err(Error::DimensionMismatch {
                expected: unitary.qubits(),
                found: inputs,
            });
        }
        Ok(Self { unitary, inputs })
    }

    pub fn identity(qubits: usize, inputs: usize) -> Result<Self> {
        Self::new(PrimitiveUnitary::identity(qubits), inputs)
    }

    pub fn unitary(&self) -> &PrimitiveUnitary {
        &self.unitary
    }

    /// `N`.
    pub fn qubits(&self) -> usize {
        self.unitary.qubits()
    }

    /// `M`.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// `⟨(V, M)⟩ = ⟨⟨V⟩, ⟨M⟩⟩`.
    pub fn encode(&self) -> BitString {
        encode_tuple(&[self.unitary.encode(), encode_whole_u64(self.inputs as u64)])
    }

    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        r.expect_arity(2)?;
        let unitary = PrimitiveUnitary::read(r)?;
        let m = r.read_whole_u64()?;
        let m = usize::try_from(m).map_err(|_| Error::MalformedCode("input width too large".into()))?;
        Self::new(unitary, m).map_err(|_| Error::MalformedCode("input width exceeds qubit count".into()))
    }

    /// Decodes a buffer holding exactly one circuit code.
    pub fn decode(bits: &BitString) -> Result<Self> {
        let mut r = BitReader::new(bits.as_slice());
        let c = Self::read(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::MalformedCode("trailing bits after circuit".into()));
        }
        Ok(c)
    }

    /// Text form: `circuit N M` then the unitary's entries row-major.
    pub fn to_text(&self) -> String {
        let mut out = format!("circuit {} {}\n", self.qubits(), self.inputs);
        for e in self.unitary.matrix().entries() {
            let _ = writeln!(out, "{}", e.to_field());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (fields, entries) = parse_matrix_text(text, "circuit")?;
        let [n, m] = fields.as_slice() else {
            return Err(Error::Parse("circuit header takes two fields".into()));
        };
        let parse = |s: &String| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("expected a whole number, found {s:?}")))
        };
        let (n, m) = (parse(n)?, parse(m)?);
        let u = PrimitiveUnitary::new(Matrix::from_entries(dim_of(n), entries)?)?;
        Self::new(u, m)
    }
}

/// `V·(θ ⊗ |0^{N-M}⟩)`.
pub fn pad_and_apply(circuit: &Circuit, theta: &PureState) -> Result<PureState> {
    if theta.qubits() != circuit.inputs() {
        return Err(Error::DimensionMismatch {
            expected: circuit.inputs(),
            found: theta.qubits(),
        });
    }
    circuit
        .unitary()
        .apply(&theta.pad_zeros(circuit.qubits() - circuit.inputs()))
}

/// Optimal input for [`best_input_overlap`], kept unnormalized so it stays
/// exact: the best `θ` is `block / ‖block‖`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapWitness {
    pub block: Vec<ComplexRational>,
    pub norm_sqr: Rational,
}

impl OverlapWitness {
    /// `|⟨ψ|V|θ0…⟩|²` with `θ = block/‖block‖`, exactly.
    pub fn evaluate(&self, circuit: &Circuit, psi: &PureState) -> Result<Rational> {
        let pad = circuit.qubits() - circuit.inputs();
        if self.block.len() != dim_of(circuit.inputs()) || psi.qubits() != circuit.qubits() {
            return Err(Error::DimensionMismatch {
                expected: dim_of(circuit.inputs()),
                found: self.block.len(),
            });
        }
        let mut padded = vec![ComplexRational::zero(); dim_of(circuit.qubits())];
        for (a, c) in self.block.iter().enumerate() {
            padded[a << pad] = c.clone();
        }
        let out = circuit.unitary().matrix().mul_vec(&padded)?;
        Ok(inner(psi.amplitudes(), &out).norm_sqr() / &self.norm_sqr)
    }

    /// The witness as a state: exact when `‖block‖² = 1`, otherwise
    /// normalized to within the approximate-state tolerance.
    pub fn state(&self, inputs: usize) -> Result<PureState> {
        PureState::normalized(inputs, self.block.clone())
    }
}

/// `max_θ |⟨ψ|V|θ0…⟩|²`, which is the squared norm of the zero-suffix block
/// of `V*ψ`.
pub fn best_input_overlap(circuit: &Circuit, psi: &PureState) -> Result<(Rational, OverlapWitness)> {
    if psi.qubits() != circuit.qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubits(),
            found: psi.qubits(),
        });
    }
    let pulled = circuit.unitary().matrix().adjoint().mul_vec(psi.amplitudes())?;
    let pad = circuit.qubits() - circuit.inputs();
    let block: Vec<ComplexRational> = (0..dim_of(circuit.inputs()))
        .map(|a| pulled[a << pad].clone())
        .collect();
    let value = norm_sqr(&block);
    if value.is_zero() {
        let mut zero = vec![ComplexRational::zero(); dim_of(circuit.inputs())];
        zero[0] = ComplexRational::one();
        return Ok((
            value,
            OverlapWitness {
                block: zero,
                norm_sqr: Rational::one(),
            },
        ));
    }
    Ok((
        value.clone(),
        OverlapWitness {
            block,
            norm_sqr: value,
        },
    ))
}

/// Circuit `(V, 0)` with `V|0^N⟩ = |θ⟩`, built from rational entries.
///
/// `θ = |0^N⟩` gives the identity. A real leading amplitude gives the
/// Householder reflection `I - 2ww*/(w*w)` with `w = e_0 - θ`. Otherwise,
/// writing `θ = (a, r)` with `s = ‖r‖²`, the completion
/// `[[a, -r*], [r, I - ((1-ā)/s) r r*]]` is used.
pub fn synthesize_preparation(theta: &PureState) -> Result<Circuit> {
    if !theta.is_primitive() {
        return Err(Error::NotNormalized);
    }
    let n = theta.qubits();
    let d = theta.dim();
    let amps = theta.amplitudes();
    let a = &amps[0];
    if *a == ComplexRational::one() {
        return Circuit::identity(n, 0);
    }
    let r = &amps[1..];
    let s = norm_sqr(r);
    let mut m = Matrix::identity(d);
    if s.is_zero() {
        // θ = a·e_0 with |a| = 1
        m.set(0, 0, a.clone());
    } else if a.is_real() {
        let mut w: Vec<ComplexRational> = amps.iter().map(|c| -c).collect();
        w[0] = &w[0] + &ComplexRational::one();
        let ww = norm_sqr(&w);
        let f = Rational::from_integer(2.into()) / ww;
        for i in 0..d {
            for j in 0..d {
                let e = &m.get(i, j).clone() - &(&w[i] * &w[j].conj()).scale(&f);
                m.set(i, j, e);
            }
        }
    } else {
        let coef = (&ComplexRational::one() - &a.conj()).scale(&s.recip());
        m.set(0, 0, a.clone());
        for j in 1..d {
            m.set(0, j, -r[j - 1].conj());
            m.set(j, 0, r[j - 1].clone());
            for k in 1..d {
                let base = if j == k { ComplexRational::one() } else { ComplexRational::zero() };
                let e = &base - &(&coef * &(&r[j - 1] * &r[k - 1].conj()));
                m.set(j, k, e);
            }
        }
    }
    Circuit::new(PrimitiveUnitary::new(m)?, 0)
}
