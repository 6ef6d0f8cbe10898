//! Complexity and information estimators read off a snapshot.

use std::fmt;

use num_traits::Zero;

use crate::bits::BitString;
use crate::codec::{encode_string_tuple, pair_with_tail, Rational};
use crate::error::{Error, Result};
use crate::numeric::NegLog;

use super::universe::{HaltingApprox, MachineConfig, UniverseSnapshot};

/// `K̂(x|α)`: length of the shortest halting program found, or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ComplexityValue {
    pub bits: Option<usize>,
    pub budget: MachineConfig,
}

impl ComplexityValue {
    pub fn is_finite(&self) -> bool {
        self.bits.is_some()
    }

    pub fn finite(&self) -> Result<usize> {
        self.bits
            .ok_or_else(|| Error::Undefined("no program within budget".into()))
    }
}

impl fmt::Display for ComplexityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bits {
            Some(b) => write!(f, "{b}"),
            None => write!(f, "inf"),
        }
    }
}

pub fn k_hat(x: &BitString, aux: &BitString, snap: &UniverseSnapshot) -> Result<ComplexityValue> {
    let bits = snap.output_stats(x, aux)?.map(|s| s.shortest.len());
    Ok(ComplexityValue {
        bits,
        budget: snap.config(),
    })
}

/// `Σ 2^-‖p‖` over snapshot programs producing `x` on `aux`.
pub fn m_hat(x: &BitString, aux: &BitString, snap: &UniverseSnapshot) -> Result<Rational> {
    Ok(snap
        .output_stats(x, aux)?
        .map(|s| s.mass.clone())
        .unwrap_or_else(Rational::zero))
}

/// Shortest program producing `x` on `aux`, first in ξ order.
pub fn shortest_program(x: &BitString, aux: &BitString, snap: &UniverseSnapshot) -> Result<Option<BitString>> {
    Ok(snap.output_stats(x, aux)?.map(|s| s.shortest.clone()))
}

/// `K̂(x) + K̂(y) - K̂(⟨x,y⟩)`, all on the empty auxiliary string.
pub fn mutual_info(x: &BitString, y: &BitString, snap: &UniverseSnapshot) -> Result<i64> {
    let empty = BitString::new();
    let kx = k_hat(x, &empty, snap)?.finite()?;
    let ky = k_hat(y, &empty, snap)?.finite()?;
    let kxy = k_hat(&encode_string_tuple(&[x.clone(), y.clone()]), &empty, snap)?.finite()?;
    Ok(kx as i64 + ky as i64 - kxy as i64)
}

/// Auxiliary string carrying both `α` and the halting bits: `⟨α⟩Ĥ`.
pub fn combined_aux(alpha: &BitString, halting: &HaltingApprox) -> BitString {
    pair_with_tail(alpha, &halting.bits)
}

/// `K̂(x|α) - K̂(x|⟨α⟩Ĥ)`.
pub fn info_with_halting(
    x: &BitString,
    alpha: &BitString,
    halting: &HaltingApprox,
    snap: &UniverseSnapshot,
) -> Result<i64> {
    let plain = k_hat(x, alpha, snap)?.finite()?;
    let with = k_hat(x, &combined_aux(alpha, halting), snap)?.finite()?;
    Ok(plain as i64 - with as i64)
}

/// Smallest `c` with `K̂(x|α) ≤ -log m̂(x|α) + c` for every output on
/// `aux_id`; `None` when nothing halts.
pub fn coding_slack(snap: &UniverseSnapshot, aux_id: usize) -> Option<i64> {
    snap.outputs(aux_id)
        .into_iter()
        .map(|(_, s)| s.shortest.len() as i64 - NegLog::of(s.mass.clone()).floor().expect("positive mass"))
        .max()
}

/// `K̂(x|α) ≤ -log m̂(x|α) + c`, decided exactly.
pub fn coding_lemma_holds(x: &BitString, aux: &BitString, snap: &UniverseSnapshot, c: i64) -> Result<bool> {
    let Some(s) = snap.output_stats(x, aux)? else {
        return Ok(true);
    };
    Ok(NegLog::bits(s.shortest.len() as i64) <= NegLog::of(s.mass.clone()).plus_bits(c))
}
