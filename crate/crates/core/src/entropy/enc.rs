//! The `Enc(ψ)` tuple stream and its transform under a unitary.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;

use crate::bits::BitString;
use crate::codec::{encode_efficient, encode_rational, encode_tuple, Rational};
use crate::error::{Error, Result};
use crate::machine::{info_with_halting, HaltingApprox, UniverseSnapshot};
use crate::quantum::{fidelity, PrimitiveUnitary, PureState};

use super::catalog::StateCatalog;

/// Rationals in `(0, 1]`: `1`, then the Stern–Brocot subtree below `1/2`
/// in breadth-first order.
#[derive(Clone, Debug)]
pub struct RationalOrder {
    emitted: Vec<Rational>,
    queue: VecDeque<(BigInt, BigInt, BigInt, BigInt)>,
}

impl Default for RationalOrder {
    fn default() -> Self {
        Self::new()
    }
}

impl RationalOrder {
    pub fn new() -> Self {
        let mut queue = VecDeque::new();
        // bounds 0/1 and 1/1
        queue.push_back((0.into(), 1.into(), 1.into(), 1.into()));
        Self {
            emitted: vec![Rational::from_integer(1.into())],
            queue,
        }
    }

    pub fn get(&mut self, j: usize) -> Rational {
        while self.emitted.len() <= j {
            let (a, b, c, d) = self.queue.pop_front().expect("tree is infinite");
            let (p, q) = (&a + &c, &b + &d);
            self.queue.push_back((a, b, p.clone(), q.clone()));
            self.queue.push_back((p.clone(), q.clone(), c, d));
            self.emitted.push(Rational::new(p, q));
        }
        self.emitted[j].clone()
    }
}

/// One tuple `⟨⟨θ⟩, ⟨q⟩, bit⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncTuple {
    pub theta: usize,
    pub q: Rational,
    pub bit: bool,
    pub code: BitString,
}

enum Source<'a> {
    Direct(PureState),
    Transformed {
        adjoint: PrimitiveUnitary,
        inner: Box<EncStream<'a>>,
        preimage: Vec<Option<usize>>,
        cache: HashMap<(usize, usize), bool>,
        on_demand: bool,
    },
}

/// Pull-based `Enc` stream. Tuples run over pairs (catalog state `i`,
/// rational `j`) ordered by `(i + j, i)`.
pub struct EncStream<'a> {
    catalog: &'a StateCatalog,
    source: Source<'a>,
    rationals: RationalOrder,
    diagonal: usize,
    row: usize,
}

impl<'a> EncStream<'a> {
    pub fn new(psi: &PureState, catalog: &'a StateCatalog) -> Self {
        Self {
            catalog,
            source: Source::Direct(psi.clone()),
            rationals: RationalOrder::new(),
            diagonal: 0,
            row: 0,
        }
    }

    fn position(&mut self) -> Option<(usize, usize)> {
        let k = self.catalog.states().len();
        if k == 0 {
            return None;
        }
        if self.row > self.diagonal.min(k - 1) {
            self.diagonal += 1;
            self.row = 0;
        }
        let pos = (self.row, self.diagonal - self.row);
        self.row += 1;
        Some(pos)
    }

    /// The next tuple; `None` for an empty catalog.
    pub fn next_tuple(&mut self) -> Result<Option<EncTuple>> {
        let Some((i, j)) = self.position() else {
            return Ok(None);
        };
        let q = self.rationals.get(j);
        let bit = self.bit_at(i, j, &q)?;
        let theta = &self.catalog.states()[i].state;
        let code = encode_tuple(&[
            theta.encode(),
            encode_rational(&q),
            encode_efficient(&BitString::from_bits(vec![bit])),
        ]);
        Ok(Some(EncTuple { theta: i, q, bit, code }))
    }

    /// The first `n` tuples.
    pub fn take(&mut self, n: usize) -> Result<Vec<EncTuple>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.next_tuple()? {
                Some(t) => out.push(t),
                None => break,
            }
        }
        Ok(out)
    }

    /// The first `bits` bits of the concatenated tuple codes.
    pub fn prefix_bits(&mut self, bits: usize) -> Result<BitString> {
        let mut out = BitString::new();
        while out.len() < bits {
            match self.next_tuple()? {
                Some(t) => out.extend_from(&t.code),
                None => break,
            }
        }
        Ok(out.prefix(bits.min(out.len())))
    }

    fn bit_at(&mut self, i: usize, j: usize, q: &Rational) -> Result<bool> {
        let catalog = self.catalog;
        match &mut self.source {
            Source::Direct(psi) => Ok(fidelity(psi, &catalog.states()[i].state)? >= *q),
            Source::Transformed {
                adjoint,
                inner,
                preimage,
                cache,
                on_demand,
            } => match preimage[i] {
                Some(k) => {
                    while !cache.contains_key(&(k, j)) {
                        let t = inner.next_tuple()?.expect("catalog is nonempty");
                        let jt = inner.rationals_index_of_last();
                        cache.insert((t.theta, jt), t.bit);
                    }
                    Ok(cache[&(k, j)])
                }
                None if *on_demand => {
                    let pulled = adjoint.apply(&catalog.states()[i].state)?;
                    inner.bit_for_state(&pulled, q)
                }
                None => Err(Error::CatalogNotClosed),
            },
        }
    }

    fn rationals_index_of_last(&self) -> usize {
        self.diagonal - (self.row - 1)
    }

    /// `[|⟨ψ|θ⟩|² ≥ q]` for an arbitrary `θ`, answered by the source.
    pub fn bit_for_state(&mut self, theta: &PureState, q: &Rational) -> Result<bool> {
        match &mut self.source {
            Source::Direct(psi) => Ok(fidelity(psi, theta)? >= *q),
            Source::Transformed { adjoint, inner, .. } => {
                let pulled = adjoint.apply(theta)?;
                inner.bit_for_state(&pulled, q)
            }
        }
    }
}

/// Maps a stream for `ψ` to the stream for `Vψ`: the bit for `(θ, q)` is
/// the source bit for `(V*θ, q)`. With `on_demand` unset, an adjoint image
/// outside the catalog is [`Error::CatalogNotClosed`].
pub fn transform_enc<'a>(v: &PrimitiveUnitary, stream: EncStream<'a>, on_demand: bool) -> Result<EncStream<'a>> {
    let catalog = stream.catalog;
    let adjoint = v.adjoint();
    let mut preimage = Vec::with_capacity(catalog.states().len());
    for s in catalog.states() {
        let pulled = adjoint.apply(&s.state)?;
        preimage.push(catalog.state_index(&pulled));
    }
    Ok(EncStream {
        catalog,
        source: Source::Transformed {
            adjoint,
            inner: Box::new(stream),
            preimage,
            cache: HashMap::new(),
            on_demand,
        },
        rationals: RationalOrder::new(),
        diagonal: 0,
        row: 0,
    })
}

/// `K̂(⟨ψ⟩) - K̂(⟨ψ⟩ | ⟨⟩Ĥ)`, a finite proxy for the halting information of
/// `Enc(ψ)`.
pub fn state_info_with_halting(psi: &PureState, snap: &UniverseSnapshot, halting: &HaltingApprox) -> Result<i64> {
    info_with_halting(&psi.encode(), &BitString::new(), halting, snap)
}
