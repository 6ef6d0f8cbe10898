use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::bits::BitString;
use crate::codec::{encode_tuple, BitReader, Rational};
use crate::error::{Error, Result};

use super::complex::ComplexRational;
use super::state::{dim_of, qubits_of, PureState};

/// Square matrix of complex rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    entries: Vec<ComplexRational>,
}

impl Matrix {
    pub fn from_entries(dim: usize, entries: Vec<ComplexRational>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<ComplexRational>>) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<ComplexRational> = rows.into_iter().flatten().collect();
        Self::from_entries(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ComplexRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ComplexRational::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ComplexRational] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &ComplexRational {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: ComplexRational) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn column(&self, col: usize) -> Vec<ComplexRational> {
        (0..self.dim).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * n + c] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[ComplexRational]) -> Result<Vec<ComplexRational>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim)
            .map(|r| {
                let mut acc = ComplexRational::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(r, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn trace(&self) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for i in 0..self.dim {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[ComplexRational]) -> Matrix {
        let n = v.len();
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[r * n + c] = &v[r] * &v[c].conj();
            }
        }
        out
    }

    /// Gauss-Jordan inverse over the complex rationals.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.entries.swap(pivot * n + c, col * n + c);
                    inv.entries.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a.get(col, col).inv()?;
            for c in 0..n {
                a.entries[col * n + c] = &a.entries[col * n + c] * &p;
                inv.entries[col * n + c] = &inv.entries[col * n + c] * &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let da = &f * a.get(col, c);
                    let di = &f * inv.get(col, c);
                    a.entries[r * n + c] = &a.entries[r * n + c] - &da;
                    inv.entries[r * n + c] = &inv.entries[r * n + c] - &di;
                }
            }
        }
        Some(inv)
    }

    /// Tuple of the `dim²` entry codes, row-major.
    pub fn encode(&self) -> BitString {
        let parts: Vec<BitString> = self.entries.iter().map(ComplexRational::encode).collect();
        encode_tuple(&parts)
    }

    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        let m = r.read_arity()?;
        let dim = (m as f64).sqrt().round() as usize;
        if dim * dim != m || dim == 0 {
            return Err(Error::MalformedCode(format!("{m} entries is not a square")));
        }
        let entries = (0..m)
            .map(|_| ComplexRational::read(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(dim, entries)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    fn entries_text(&self, out: &mut String) {
        for e in &self.entries {
            let _ = writeln!(out, "{}", e.to_field());
        }
    }
}

/// Exactly unitary matrix on `N` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimitiveUnitary {
    qubits: usize,
    matrix: Matrix,
}

impl PrimitiveUnitary {
    /// Verifies `V*V = I` in rational arithmetic.
    pub fn new(matrix: Matrix) -> Result<Self> {
        let qubits = qubits_of(matrix.dim()).ok_or(Error::DimensionMismatch {
            expected: matrix.dim().next_power_of_two(),
            found: matrix.dim(),
        })?;
        if !matrix.adjoint().mul(&matrix)?.is_identity() {
            return Err(Error::NotUnitary);
        }
        Ok(Self { qubits, matrix })
    }

    pub fn identity(qubits: usize) -> Self {
        Self {
            qubits,
            matrix: Matrix::identity(dim_of(qubits)),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            qubits: self.qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, other: &PrimitiveUnitary) -> Result<Self> {
        Ok(Self {
            qubits: self.qubits,
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    /// `V|ψ⟩`; unitarity keeps the norm, so the state kind is preserved.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.qubits() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                found: psi.qubits(),
            });
        }
        PureState::new(self.qubits, self.matrix.mul_vec(psi.amplitudes())?)
    }

    pub fn encode(&self) -> BitString {
        self.matrix.encode()
    }

    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        Self::new(Matrix::read(r)?)
    }

    /// Text form: `unitary N` then the entries row-major.
    pub fn to_text(&self) -> String {
        let mut out = format!("unitary {}\n", self.qubits);
        self.matrix.entries_text(&mut out);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (fields, entries) = parse_matrix_text(text, "unitary")?;
        if fields.len() != 1 {
            return Err(Error::Parse("unitary header takes one field".into()));
        }
        let qubits: usize = parse_usize(&fields[0])?;
        Self::new(Matrix::from_entries(dim_of(qubits), entries)?)
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("expected a whole number, found {s:?}")))
}

/// Splits a `kind field…` header from its entry lines.
pub(crate) fn parse_matrix_text(text: &str, kind: &str) -> Result<(Vec<String>, Vec<ComplexRational>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(kind) {
        return Err(Error::Parse(format!("expected a {kind} header, found {header:?}")));
    }
    let fields = fields.map(String::from).collect();
    let entries = lines
        .map(ComplexRational::from_field)
        .collect::<Result<Vec<_>>>()?;
    Ok((fields, entries))
}

/// Exact positive-semidefiniteness test for a Hermitian matrix.
///
/// Eliminates one row and column at a time: a negative pivot fails; a zero
/// pivot needs a zero row and is dropped; a positive pivot is replaced by
/// its Schur complement.
pub fn is_psd(m: &Matrix) -> bool {
    if !m.is_hermitian() {
        return false;
    }
    let mut a: Vec<Vec<ComplexRational>> = (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| m.get(r, c).clone()).collect())
        .collect();
    while !a.is_empty() {
        let d = a[0][0].re.clone();
        if d.is_negative() {
            return false;
        }
        let n = a.len();
        if d.is_zero() {
            if a[0].iter().any(|x| !x.is_zero()) {
                return false;
            }
            a = a[1..].iter().map(|row| row[1..].to_vec()).collect();
            continue;
        }
        let inv = d.recip();
        let mut next = Vec::with_capacity(n - 1);
        for r in 1..n {
            let factor = a[r][0].scale(&inv);
            let row: Vec<ComplexRational> = (1..n)
                .map(|c| &a[r][c] - &(&factor * &a[0][c]))
                .collect();
            next.push(row);
        }
        a = next;
    }
    true
}

/// Hermitian, positive semidefinite, trace at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiDensityMatrix {
    qubits: usize,
    matrix: Matrix,
}

impl SemiDensityMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let qubits = qubits_of(matrix.dim())
            .ok_or_else(|| Error::NotSemiDensity("dimension is not a power of two".into()))?;
        if !matrix.is_hermitian() {
            return Err(Error::NotSemiDensity("not Hermitian".into()));
        }
        if matrix.trace().re > Rational::one() {
            return Err(Error::NotSemiDensity("trace exceeds one".into()));
        }
        if !is_psd(&matrix) {
            return Err(Error::NotSemiDensity("negative eigenvalue".into()));
        }
        Ok(Self { qubits, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a primitive state.
    pub fn pure(psi: &PureState) -> Self {
        Self {
            qubits: psi.qubits(),
            matrix: Matrix::outer(psi.amplitudes()),
        }
    }

    pub fn zero(qubits: usize) -> Self {
        Self {
            qubits,
            matrix: Matrix::zeros(dim_of(qubits)),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> Rational {
        self.matrix.trace().re
    }

    /// `⟨ψ|A|ψ⟩`, real for Hermitian `A`.
    pub fn expectation(&self, psi: &PureState) -> Result<Rational> {
        let av = self.matrix.mul_vec(psi.amplitudes())?;
        Ok(super::state::inner(psi.amplitudes(), &av).re)
    }

    /// Text form: `semidensity N` then the entries row-major.
    pub fn to_text(&self) -> String {
        let mut out = format!("semidensity {}\n", self.qubits);
        self.matrix.entries_text(&mut out);
        out
    }
}

/// `μ = Σ w·|θ⟩⟨θ|`.
pub fn mu_aggregate(qubits: usize, weighted: &[(PureState, Rational)]) -> Result<SemiDensityMatrix> {
    let mut total = Rational::zero();
    let mut m = Matrix::zeros(dim_of(qubits));
    for (theta, w) in weighted {
        if theta.qubits() != qubits {
            return Err(Error::DimensionMismatch {
                expected: qubits,
                found: theta.qubits(),
            });
        }
        if w.is_negative() {
            return Err(Error::NotSemiDensity("negative weight".into()));
        }
        total += w;
        if w.is_zero() {
            continue;
        }
        m = m.add(&Matrix::outer(theta.amplitudes()).scale(w))?;
    }
    if total > Rational::one() {
        return Err(Error::WeightOverflow);
    }
    Ok(SemiDensityMatrix { qubits, matrix: m })
}

/// Whether `c·B - A` is positive semidefinite, certified exactly.
pub fn psd_dominates(a: &SemiDensityMatrix, b: &SemiDensityMatrix, c: &Rational) -> Result<bool> {
    let diff = b.matrix.scale(c).sub(&a.matrix)?;
    Ok(is_psd(&diff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn real_matrix(rows: &[&[(i64, i64)]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&(p, q)| ComplexRational::real(r(p, q))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn unitarity_check() {
        let h = real_matrix(&[&[(3, 5), (4, 5)], &[(4, 5), (-3, 5)]]);
        assert!(PrimitiveUnitary::new(h).is_ok());
        let bad = real_matrix(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(PrimitiveUnitary::new(bad), Err(Error::NotUnitary)));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = real_matrix(&[&[(2, 1), (1, 1)], &[(1, 1), (1, 1)]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(real_matrix(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]).inverse().is_none());
    }

    #[test]
    fn psd_cases() {
        assert!(is_psd(&real_matrix(&[&[(1, 1), (1, 1)], &[(1, 1), (1, 1)]])));
        assert!(!is_psd(&real_matrix(&[&[(1, 1), (2, 1)], &[(2, 1), (1, 1)]])));
        // zero pivot with nonzero off-diagonal
        assert!(!is_psd(&real_matrix(&[&[(0, 1), (1, 1)], &[(1, 1), (1, 1)]])));
        assert!(is_psd(&real_matrix(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]])));
    }

    #[test]
    fn dominance_examples() {
        let e0 = SemiDensityMatrix::pure(&PureState::basis(1, 0));
        let e1 = SemiDensityMatrix::pure(&PureState::basis(1, 1));
        assert!(psd_dominates(&e0, &e0, &r(1, 1)).unwrap());
        for c in [1, 2, 1024] {
            assert!(!psd_dominates(&e0, &e1, &r(c, 1)).unwrap());
        }
    }

    #[test]
    fn mu_aggregate_trace_and_overflow() {
        let e0 = PureState::basis(1, 0);
        let mu = mu_aggregate(1, &[(e0.clone(), r(1, 1))]).unwrap();
        assert_eq!(mu.matrix(), &real_matrix(&[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)]]));
        assert_eq!(mu_aggregate(1, &[]).unwrap().trace(), r(0, 1));
        assert!(matches!(
            mu_aggregate(1, &[(e0.clone(), r(2, 3)), (e0, r(1, 2))]),
            Err(Error::WeightOverflow)
        ));
    }

    #[test]
    fn unitary_text_roundtrip() {
        let h = PrimitiveUnitary::new(real_matrix(&[&[(3, 5), (4, 5)], &[(4, 5), (-3, 5)]])).unwrap();
        assert_eq!(PrimitiveUnitary::from_text(&h.to_text()).unwrap(), h);
    }
}
