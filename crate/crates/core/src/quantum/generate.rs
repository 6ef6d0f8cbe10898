//! Exact generators for primitive states and unitaries.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::codec::Rational;
use crate::error::{Error, Result};

use super::complex::ComplexRational;
use super::matrix::{Matrix, PrimitiveUnitary};
use super::state::{dim_of, PureState};

/// Inverse stereographic projection of `t ∈ Q^k` onto the unit sphere in
/// `Q^{k+1}`: `(2t, |t|² - 1) / (|t|² + 1)`.
pub fn stereographic_point(t: &[Rational]) -> Vec<Rational> {
    let s = t.iter().fold(Rational::zero(), |acc, x| acc + x * x);
    let den = &s + Rational::one();
    let two = Rational::from_integer(2.into());
    let mut out: Vec<Rational> = t.iter().map(|x| &two * x / &den).collect();
    out.push((s - Rational::one()) / den);
    out
}

/// Primitive state whose real and imaginary parts form the stereographic
/// image of `t`, which must have `2·2^N - 1` coordinates.
pub fn state_from_parameters(qubits: usize, t: &[Rational]) -> Result<PureState> {
    let d = dim_of(qubits);
    if t.len() != 2 * d - 1 {
        return Err(Error::DimensionMismatch {
            expected: 2 * d - 1,
            found: t.len(),
        });
    }
    let p = stereographic_point(t);
    let amps = p
        .chunks(2)
        .map(|c| ComplexRational::new(c[0].clone(), c[1].clone()))
        .collect();
    PureState::primitive(qubits, amps)
}

/// Primitive state keyed to a bit string: bit `j` is appended to parameter
/// `j mod (2·2^N - 1)`, read as a binary whole number.
pub fn state_from_bits(qubits: usize, bits: &[bool]) -> PureState {
    let k = 2 * dim_of(qubits) - 1;
    let mut params = vec![BigInt::zero(); k];
    for (j, &b) in bits.iter().enumerate() {
        let p = &mut params[j % k];
        *p = &*p * 2 + BigInt::from(u8::from(b));
    }
    let t: Vec<Rational> = params.into_iter().map(Rational::from_integer).collect();
    state_from_parameters(qubits, &t).expect("stereographic image has unit norm")
}

/// Random rational in `[-range, range]` with denominator in `1..=range`.
pub fn random_rational<R: Rng>(rng: &mut R, range: i64) -> Rational {
    let p = rng.gen_range(-range..=range);
    let q = rng.gen_range(1..=range);
    Rational::new(p.into(), q.into())
}

pub fn random_primitive_state<R: Rng>(rng: &mut R, qubits: usize, range: i64) -> PureState {
    let t: Vec<Rational> = (0..2 * dim_of(qubits) - 1)
        .map(|_| random_rational(rng, range))
        .collect();
    state_from_parameters(qubits, &t).expect("stereographic image has unit norm")
}

/// Rational approximation of a Gaussian-direction state, normalized to
/// within the approximate-state tolerance. Amplitudes are dyadic before
/// normalization, so most draws are not exactly unit norm.
pub fn random_approximate_state<R: Rng>(rng: &mut R, qubits: usize) -> PureState {
    const SCALE: i64 = 1 << 40;
    loop {
        let amps: Vec<ComplexRational> = (0..dim_of(qubits))
            .map(|_| {
                let re = (gaussian(rng) * SCALE as f64) as i64;
                let im = (gaussian(rng) * SCALE as f64) as i64;
                ComplexRational::new(
                    Rational::new(re.into(), SCALE.into()),
                    Rational::new(im.into(), SCALE.into()),
                )
            })
            .collect();
        if let Ok(s) = PureState::normalized(qubits, amps) {
            return s;
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Permutation matrix sending `|i⟩` to `|perm[i]⟩`.
pub fn permutation_unitary(qubits: usize, perm: &[usize]) -> Result<PrimitiveUnitary> {
    let d = dim_of(qubits);
    if perm.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: perm.len(),
        });
    }
    let mut m = Matrix::zeros(d);
    for (i, &j) in perm.iter().enumerate() {
        if j >= d {
            return Err(Error::NotUnitary);
        }
        m.set(j, i, ComplexRational::one());
    }
    PrimitiveUnitary::new(m)
}

/// Diagonal matrix of unit-modulus rational phases.
pub fn diagonal_unitary(phases: &[ComplexRational]) -> Result<PrimitiveUnitary> {
    let mut m = Matrix::zeros(phases.len());
    for (i, p) in phases.iter().enumerate() {
        m.set(i, i, p.clone());
    }
    PrimitiveUnitary::new(m)
}

/// Cayley transform `(I - S)(I + S)^{-1}` of a skew-Hermitian `S`.
pub fn cayley_unitary(s: &Matrix) -> Result<PrimitiveUnitary> {
    if s.adjoint() != s.scale(&-Rational::one()) {
        return Err(Error::NotUnitary);
    }
    let id = Matrix::identity(s.dim());
    let inv = id.add(s)?.inverse().ok_or(Error::NotUnitary)?;
    PrimitiveUnitary::new(id.sub(s)?.mul(&inv)?)
}

pub fn random_skew_hermitian<R: Rng>(rng: &mut R, dim: usize, range: i64) -> Matrix {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        m.set(i, i, ComplexRational::new(Rational::zero(), random_rational(rng, range)));
        for j in i + 1..dim {
            let z = ComplexRational::new(random_rational(rng, range), random_rational(rng, range));
            m.set(j, i, -z.conj());
            m.set(i, j, z);
        }
    }
    m
}

/// Random member of one of the three exact families.
pub fn random_unitary<R: Rng>(rng: &mut R, qubits: usize) -> PrimitiveUnitary {
    let d = dim_of(qubits);
    match rng.gen_range(0..3) {
        0 => {
            let mut perm: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            permutation_unitary(qubits, &perm).expect("valid permutation")
        }
        1 => {
            let units = [
                ComplexRational::from_ints(1, 0),
                ComplexRational::from_ints(-1, 0),
                ComplexRational::from_ints(0, 1),
                ComplexRational::from_ints(0, -1),
                ComplexRational::new(Rational::new(3.into(), 5.into()), Rational::new(4.into(), 5.into())),
            ];
            let phases: Vec<ComplexRational> =
                (0..d).map(|_| units[rng.gen_range(0..units.len())].clone()).collect();
            diagonal_unitary(&phases).expect("unit phases")
        }
        _ => cayley_unitary(&random_skew_hermitian(rng, d, 3)).expect("skew-Hermitian input"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stereographic_is_unit() {
        let t = vec![Rational::new(1.into(), 2.into()), Rational::new((-3).into(), 1.into())];
        let p = stereographic_point(&t);
        let n = p.iter().fold(Rational::zero(), |acc, x| acc + x * x);
        assert_eq!(n, Rational::one());
    }

    #[test]
    fn generated_families_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let u = random_unitary(&mut rng, 2);
            assert!(u.matrix().adjoint().mul(u.matrix()).unwrap().is_identity());
            let s = random_primitive_state(&mut rng, 2, 5);
            assert!(s.is_primitive());
        }
    }

    #[test]
    fn bits_keyed_state_depends_on_bits() {
        let a = state_from_bits(1, &[true, false, true]);
        let b = state_from_bits(1, &[true, true, true]);
        assert_ne!(a, b);
        assert!(a.is_primitive());
        assert_eq!(state_from_bits(1, &[]).amplitudes()[1].im, -Rational::one());
    }

    #[test]
    fn pauli_x_permutation() {
        let x = permutation_unitary(1, &[1, 0]).unwrap();
        assert_eq!(x.apply(&PureState::basis(1, 0)).unwrap(), PureState::basis(1, 1));
    }
}
