//! Deficiency of randomness and stochasticity over snapshot measures.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bits::BitString;
use crate::codec::{decode_exact, pair_with_tail, xi_string_to_index, CodeKind, PrimitiveMeasure, Rational, Value};
use crate::error::{Error, Result};
use crate::machine::{k_hat, UniverseSnapshot};
use crate::numeric::NegLog;

/// `d(x|Q,v) = ⌊-log Q(x)⌋ - K̂(x|v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeficiencyValue {
    pub bits: i64,
    pub floor_neg_log: i64,
    pub k_hat: usize,
}

/// Whole number named by a string: its ξ index.
pub fn key_of(x: &BitString) -> Result<BigUint> {
    xi_string_to_index(x).map_err(|_| Error::Undefined("the empty string has no index".into()))
}

pub fn deficiency(x: &BitString, q: &PrimitiveMeasure, v: &BitString, snap: &UniverseSnapshot) -> Result<DeficiencyValue> {
    let mass = q.mass(&key_of(x)?);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let floor_neg_log = NegLog::of(mass).floor().expect("positive mass");
    let k = k_hat(x, v, snap)?.finite()?;
    Ok(DeficiencyValue {
        bits: floor_neg_log - k as i64,
        floor_neg_log,
        k_hat: k,
    })
}

/// Penalty `ε` applied to `max(d, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Penalty {
    /// `2·log k`
    TwoLog,
    /// `k`
    Linear,
}

impl Penalty {
    /// `j + ε(k)`.
    pub fn score(self, j: usize, k: i64) -> NegLog {
        let base = NegLog::bits(j as i64);
        match self {
            Penalty::TwoLog => {
                let k = Rational::from_integer(k.into());
                base.plus(&NegLog::of((&k * &k).recip()))
            }
            Penalty::Linear => base.plus_bits(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticityCertificate {
    /// `‖v‖`.
    pub j: usize,
    /// `d(x|Q,v)`.
    pub deficiency: DeficiencyValue,
    /// `max(d, 1)`.
    pub k: i64,
    pub value: NegLog,
    pub program: BitString,
    pub measure: PrimitiveMeasure,
    /// Candidates dropped because their conditional complexity was not
    /// available in the snapshot.
    pub skipped: usize,
}

/// Conditioning string for the deficiency of a candidate `v` on `α`: `v`
/// itself when `α` is empty, otherwise `⟨v⟩α`.
pub fn candidate_aux(v: &BitString, alpha: &BitString) -> BitString {
    if alpha.is_empty() {
        v.clone()
    } else {
        pair_with_tail(v, alpha)
    }
}

/// `Ks_ε(x|α)`: minimum of `‖v‖ + ε(max(d(x|Q,·), 1))` over snapshot
/// programs `v` with `U_α(v) = ⟨Q⟩`, `Q` a probability measure containing
/// `x`. Ties go to the first `v` in ξ order.
pub fn stochasticity(
    x: &BitString,
    penalty: Penalty,
    alpha: &BitString,
    snap: &UniverseSnapshot,
) -> Result<StochasticityCertificate> {
    let key = key_of(x)?;
    let aux_id = snap.aux_id(alpha)?;
    let mut best: Option<StochasticityCertificate> = None;
    let mut skipped = 0;
    for r in snap.records_for(aux_id) {
        let Ok(Value::Measure(q)) = decode_exact(&r.output, CodeKind::Measure) else {
            continue;
        };
        if !q.is_probability() || q.mass(&key).is_zero() {
            continue;
        }
        let d = match deficiency(x, &q, &candidate_aux(&r.program, alpha), snap) {
            Ok(d) => d,
            Err(Error::AuxiliaryNotProbed | Error::Undefined(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let k = d.bits.max(1);
        let value = penalty.score(r.program.len(), k);
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(StochasticityCertificate {
                j: r.program.len(),
                deficiency: d,
                k,
                value,
                program: r.program.clone(),
                measure: q,
                skipped: 0,
            });
        }
    }
    let mut cert = best.ok_or(Error::NoMeasureFound)?;
    cert.skipped = skipped;
    Ok(cert)
}
