//! Left-total relayout of a snapshot.
//!
//! Halting programs are taken in order of convergence time (steps, then ξ)
//! and given consecutive intervals of width `2^-‖p‖` starting at 0. Each
//! interval is cut into its maximal dyadic subintervals; the strings naming
//! those subintervals are the new programs, with the original output.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::codec::Rational;
use crate::error::{Error, Result};
use crate::numeric::pow2;

use super::universe::{Record, UniverseSnapshot};

/// One laid-out original program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub program: BitString,
    pub start: Rational,
    pub width: Rational,
    pub pieces: Vec<BitString>,
}

#[derive(Clone, Debug)]
struct Line {
    program: BitString,
    output: BitString,
    original: usize,
}

/// Halting programs of one auxiliary string in lexicographic order, with
/// prefix sums of `2^-‖p‖`.
#[derive(Clone, Debug)]
struct Domain {
    lines: Vec<Line>,
    mass: Vec<Rational>,
}

impl Domain {
    fn new(mut lines: Vec<Line>) -> Self {
        lines.sort_by(|a, b| a.program.cmp(&b.program));
        let mut mass = Vec::with_capacity(lines.len() + 1);
        let mut acc = Rational::zero();
        mass.push(acc.clone());
        for l in &lines {
            acc += pow2(-(l.program.len() as i64));
            mass.push(acc.clone());
        }
        Self { lines, mass }
    }

    /// `(i1, i2, i3)`: `[0, i1)` lie left of `z`, `[i2, i3)` extend `z`, and
    /// `i2 - i1 = 1` exactly when a program is a prefix of `z`.
    fn split(&self, z: &BitString) -> (usize, usize, usize) {
        let i2 = self.lines.partition_point(|l| l.program < *z);
        let has_prefix = i2 > 0 && self.lines[i2 - 1].program.is_prefix_of(z);
        let i1 = i2 - usize::from(has_prefix);
        let i3 = i2 + self.lines[i2..].partition_point(|l| z.is_prefix_of(&l.program));
        (i1, i2, i3)
    }

    fn is_total(&self, z: &BitString) -> bool {
        let (i1, i2, i3) = self.split(z);
        i1 < i2 || &self.mass[i3] - &self.mass[i2] == pow2(-(z.len() as i64))
    }
}

/// A snapshot relaid out to be left-total, together with its layout.
#[derive(Clone, Debug)]
pub struct LeftTotalSnapshot {
    remapped: UniverseSnapshot,
    slots: Vec<Vec<Slot>>,
    domains: Vec<Domain>,
}

fn bits_of_value(v: &BigUint, width: usize) -> BitString {
    (0..width).rev().map(|i| v.bit(i as u64)).collect()
}

/// Maximal dyadic subintervals of `[a, a + 2^j)` in units of `2^-d`.
fn dyadic_pieces(a: &BigUint, j: usize, d: usize) -> Vec<BitString> {
    let end = a + (BigUint::one() << j);
    let mut a = a.clone();
    let mut out = Vec::new();
    while a < end {
        let mut k = a.trailing_zeros().map_or(d, |t| (t as usize).min(d));
        while &a + (BigUint::one() << k) > end {
            k -= 1;
        }
        out.push(bits_of_value(&(&a >> k), d - k));
        a += BigUint::one() << k;
    }
    out
}

fn layout(records: &[Record]) -> Vec<Slot> {
    let mut order: Vec<&Record> = records.iter().collect();
    order.sort_by(|a, b| a.steps.cmp(&b.steps).then_with(|| a.program.xi_cmp(&b.program)));
    let d = order.iter().map(|r| r.program.len()).max().unwrap_or(0);
    let mut a = BigUint::zero();
    let unit = pow2(-(d as i64));
    order
        .into_iter()
        .map(|r| {
            let j = d - r.program.len();
            let pieces = dyadic_pieces(&a, j, d);
            let slot = Slot {
                program: r.program.clone(),
                start: Rational::from_integer(a.clone().into()) * &unit,
                width: pow2(-(r.program.len() as i64)),
                pieces,
            };
            a += BigUint::one() << j;
            slot
        })
        .collect()
}

/// Relays out every auxiliary string's domain.
pub fn left_totalize(snap: &UniverseSnapshot) -> LeftTotalSnapshot {
    let mut records = Vec::new();
    let mut slots = Vec::new();
    let mut domains = Vec::new();
    for aux in 0..snap.auxes().len() {
        let recs = snap.records_for(aux);
        let by_program: std::collections::HashMap<&BitString, &Record> =
            recs.iter().map(|r| (&r.program, r)).collect();
        let lay = layout(recs);
        let mut lines = Vec::new();
        for (i, slot) in lay.iter().enumerate() {
            let r = by_program[&slot.program];
            for piece in &slot.pieces {
                records.push(Record {
                    program: piece.clone(),
                    aux,
                    output: r.output.clone(),
                    steps: r.steps,
                });
                lines.push(Line {
                    program: piece.clone(),
                    output: r.output.clone(),
                    original: i,
                });
            }
        }
        slots.push(lay);
        domains.push(Domain::new(lines));
    }
    let remapped = UniverseSnapshot::from_records(snap.config(), snap.auxes().to_vec(), Vec::new(), records)
        .expect("dyadic pieces are prefix-free");
    LeftTotalSnapshot {
        remapped,
        slots,
        domains,
    }
}

impl LeftTotalSnapshot {
    /// The relaid-out machine as an ordinary snapshot.
    pub fn snapshot(&self) -> &UniverseSnapshot {
        &self.remapped
    }

    /// Layout on `aux_id` in convergence order.
    pub fn slots(&self, aux_id: usize) -> &[Slot] {
        &self.slots[aux_id]
    }

    /// Original program behind a remapped one.
    pub fn original_of(&self, aux_id: usize, program: &BitString) -> Option<&BitString> {
        let dom = &self.domains[aux_id];
        let i = dom.lines.binary_search_by(|l| l.program.cmp(program)).ok()?;
        Some(&self.slots[aux_id][dom.lines[i].original].program)
    }

    /// Halting remapped programs on `aux_id`, lexicographic.
    pub fn programs(&self, aux_id: usize) -> impl Iterator<Item = (&BitString, &BitString)> + '_ {
        self.domains[aux_id].lines.iter().map(|l| (&l.program, &l.output))
    }

    pub fn omega(&self) -> &Rational {
        self.remapped.omega_lower()
    }

    pub fn is_total(&self, x: &BitString) -> bool {
        self.is_total_on(0, x)
    }

    /// Some prefix-free set `Z` with `Σ 2^-‖z‖ = 1` has every `xz` halting.
    pub fn is_total_on(&self, aux_id: usize, x: &BitString) -> bool {
        self.domains[aux_id].is_total(x)
    }

    /// First `(x, y)` with `y` halting, `x ◁ y` and `x` not total. Only the
    /// left siblings `y[..i]0` at the one bits of `y` need checking.
    pub fn left_total_violation(&self) -> Option<(usize, BitString, BitString)> {
        for (aux, dom) in self.domains.iter().enumerate() {
            for l in &dom.lines {
                for (i, b) in l.program.as_slice().iter().enumerate() {
                    if *b {
                        let x = l.program.prefix(i).child(false);
                        if !dom.is_total(&x) {
                            return Some((aux, x, l.program.clone()));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_left_total(&self) -> bool {
        self.left_total_violation().is_none()
    }

    /// `m_b(x)`: mass of programs for `x` that lie left of `b` or extend it.
    pub fn m_b(&self, x: &BitString, b: &BitString) -> Result<Rational> {
        self.weighted_mass(0, b, |out| if out == x { Some(Rational::one()) } else { None })
    }

    /// `Σ 2^-‖p‖ w(U'(p))` over programs `p ◁ b` or `b ⊑ p` on `aux_id`;
    /// programs with `w = None` are skipped.
    pub fn weighted_mass<F>(&self, aux_id: usize, b: &BitString, weight: F) -> Result<Rational>
    where
        F: Fn(&BitString) -> Option<Rational>,
    {
        let dom = &self.domains[aux_id];
        if !dom.is_total(b) {
            return Err(Error::NotTotal(b.to_string()));
        }
        let (i1, i2, i3) = dom.split(b);
        let mut acc = Rational::zero();
        for l in dom.lines[..i1].iter().chain(&dom.lines[i2..i3]) {
            if let Some(w) = weight(&l.output) {
                acc += pow2(-(l.program.len() as i64)) * w;
            }
        }
        Ok(acc)
    }

    /// Prefix-sum form of [`Self::weighted_mass`] for repeated queries.
    pub fn mass_line<F>(&self, aux_id: usize, weight: F) -> MassLine<'_>
    where
        F: Fn(&BitString) -> Option<Rational>,
    {
        let dom = &self.domains[aux_id];
        let mut sums = Vec::with_capacity(dom.lines.len() + 1);
        let mut acc = Rational::zero();
        sums.push(acc.clone());
        for l in &dom.lines {
            if let Some(w) = weight(&l.output) {
                acc += pow2(-(l.program.len() as i64)) * w;
            }
            sums.push(acc.clone());
        }
        MassLine { domain: dom, sums }
    }

    /// Shortest total prefix of `x`.
    pub fn shortest_total_prefix(&self, x: &BitString) -> Option<BitString> {
        (0..=x.len()).map(|i| x.prefix(i)).find(|v| self.is_total(v))
    }

    /// For total `b` whose parent is not total: `Some(true)` when
    /// `b = b⁻0` and `b⁻` is a prefix of the expansion of `Ω̂`; `None` when
    /// `b` is not such a string.
    pub fn border_check(&self, b: &BitString) -> Option<bool> {
        let parent = b.parent()?;
        if !self.is_total(b) || self.is_total(&parent) {
            return None;
        }
        let last_zero = b.get(b.len() - 1) == Some(false);
        Some(last_zero && parent == omega_expansion(self.omega(), parent.len()))
    }
}

/// Weighted masses of the left-or-extending program sets, answered in
/// logarithmic time.
pub struct MassLine<'a> {
    domain: &'a Domain,
    sums: Vec<Rational>,
}

impl MassLine<'_> {
    /// `None` when `b` is not total.
    pub fn mass(&self, b: &BitString) -> Option<Rational> {
        if !self.domain.is_total(b) {
            return None;
        }
        let (i1, i2, i3) = self.domain.split(b);
        Some(&self.sums[i1] + &self.sums[i3] - &self.sums[i2])
    }

    pub fn total(&self) -> &Rational {
        self.sums.last().expect("nonempty sums")
    }
}

/// First `n` bits of the binary expansion of `r ∈ [0, 1)`.
pub fn omega_expansion(r: &Rational, n: usize) -> BitString {
    let mut v = r.clone();
    let two = Rational::from_integer(2.into());
    (0..n)
        .map(|_| {
            v = &v * &two;
            let bit = v >= Rational::one();
            if bit {
                v -= Rational::one();
            }
            bit
        })
        .collect()
}

pub fn is_total(x: &BitString, lt: &LeftTotalSnapshot) -> bool {
    lt.is_total(x)
}

pub fn m_b(x: &BitString, b: &BitString, lt: &LeftTotalSnapshot) -> Result<Rational> {
    lt.m_b(x, b)
}
