//! Desk-scale checks of the selection bounds for primitive maps and of the
//! stochasticity bound through total prefixes.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::bits::BitString;
use crate::codec::{xi_index_to_string_u64, xi_string_to_index_u64, PrimitiveMap, PrimitiveMeasure, Rational};
use crate::error::{Error, Result};
use crate::machine::{info_with_halting, k_hat, shortest_program, HaltingApprox, LeftTotalSnapshot, UniverseSnapshot};
use crate::numeric::{pow2, within_log_bound, NegLog};

use super::covering::{family_hits, key_of_map, map_of_key, search_covering_family, CoveringFamily};
use super::stochastic::{deficiency, key_of, stochasticity, Penalty, StochasticityCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violation,
    ProxyInconclusive,
}

/// `lhs ≤ rhs + c_log·log(rhs + 2) + c_add`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LogSlack {
    pub c_log: u32,
    pub c_add: i64,
}

impl LogSlack {
    pub fn admits(&self, lhs: &NegLog, rhs: &NegLog) -> bool {
        within_log_bound(lhs, rhs, self.c_log, self.c_add)
    }
}

/// `Σ m(a)·2^-f(a)` over `a ∈ Dom f ∩ Supp m` with `f(a) ≤ cap`.
fn weighted_sum(f: &PrimitiveMap, m: &PrimitiveMeasure, cap: Option<u64>) -> Rational {
    f.iter()
        .filter(|(_, v)| cap.map_or(true, |c| *v <= c))
        .map(|(a, v)| m.mass(&BigUint::from(a)) * pow2(-(v as i64)))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Minimum of `f(a) + K̂(a|aux)` and its argument; `None` when no term is
/// finite.
fn selection_minimum<'a>(
    domain: impl Iterator<Item = (u64, u64)> + 'a,
    aux: &BitString,
    snap: &UniverseSnapshot,
) -> Result<Option<(i64, u64)>> {
    let mut best: Option<(i64, u64)> = None;
    for (a, v) in domain {
        if let Some(k) = k_hat(&xi_index_to_string_u64(a), aux, snap)?.bits {
            let t = v as i64 + k as i64;
            if best.map_or(true, |(b, _)| t < b) {
                best = Some((t, a));
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringOutcome {
    Found { family: CoveringFamily, hits_f: bool },
    TooLarge,
    NotFound,
}

#[derive(Clone, Debug)]
pub struct SelectionReport {
    pub sum: Rational,
    pub s: i64,
    /// `Σ ≥ 2^-s`.
    pub sum_at_least: bool,
    /// `Σ_{f(a) ≤ s} ≥ 2^-s-1`.
    pub truncated_at_least: bool,
    /// `min f(a) + K̂(a|⟨m⟩)` with its argument.
    pub lhs: Option<(i64, u64)>,
    pub stochasticity: Option<StochasticityCertificate>,
    pub rhs: Option<NegLog>,
    pub verdict: Verdict,
    /// Per `c = 1, 2, …` of the sweep.
    pub covering: Vec<(u64, CoveringOutcome)>,
    /// Smallest swept `c` whose family meets `f`.
    pub workable_c: Option<u64>,
}

/// `Q'` conditioned on maps `g` with `Σ_{g(a) ≤ s} m(a)2^-g(a) ≥ 2^-s-1`.
pub fn condition_on_heavy_maps(q: &PrimitiveMeasure, m: &PrimitiveMeasure, s: i64) -> Result<PrimitiveMeasure> {
    let floor = pow2(-s - 1);
    let kept: Vec<(BigUint, Rational)> = q
        .iter()
        .filter(|(key, _)| {
            map_of_key(key).is_ok_and(|g| weighted_sum(&g, m, Some(s as u64)) >= floor)
        })
        .map(|(k, w)| (k.clone(), w.clone()))
        .collect();
    let total = kept.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
    if total.is_zero() {
        return Err(Error::ZeroMass);
    }
    PrimitiveMeasure::from_pairs(kept.into_iter().map(|(k, w)| (k, w / &total)))
}

/// Compares `min f(a) + K̂(a|m)` with `-log Σ m(a)2^-f(a) + Ks(f|m)` and
/// runs the covering search for `c = 1..=max_c`.
pub fn selection_harness(
    f: &PrimitiveMap,
    m: &PrimitiveMeasure,
    snap: &UniverseSnapshot,
    slack: LogSlack,
    max_c: u64,
) -> Result<SelectionReport> {
    let sum = weighted_sum(f, m, None);
    if sum.is_zero() {
        return Err(Error::Undefined("Σ m(a)2^-f(a) is zero".into()));
    }
    let s = NegLog::of(sum.clone()).ceil().expect("positive sum");
    let sum_at_least = sum >= pow2(-s);
    let truncated_at_least = weighted_sum(f, m, Some(s.max(0) as u64)) >= pow2(-s - 1);
    let m_code = m.encode();
    let in_support = f.iter().filter(|(a, _)| !m.mass(&BigUint::from(*a)).is_zero());
    let lhs = selection_minimum(in_support, &m_code, snap)?;
    let cert = match stochasticity(&f.encode(), Penalty::TwoLog, &m_code, snap) {
        Ok(c) => Some(c),
        Err(Error::NoMeasureFound) => None,
        Err(e) => return Err(e),
    };
    let rhs = cert.as_ref().map(|c| NegLog::of(sum.clone()).plus(&c.value));
    let verdict = match (&lhs, &rhs) {
        (Some((l, _)), Some(r)) if slack.admits(&NegLog::bits(*l), r) => Verdict::Holds,
        (Some(_), Some(_)) => Verdict::Violation,
        _ => Verdict::ProxyInconclusive,
    };
    let mut covering = Vec::new();
    let mut workable_c = None;
    if let Some(cert) = &cert {
        let q = condition_on_heavy_maps(&cert.measure, m, s)?;
        let d = cert.k.max(1) as u64;
        for c in 1..=max_c {
            let outcome = match search_covering_family(&q, m, s.max(0) as u64, c, d) {
                Ok(family) => {
                    let hits_f = family_hits(f, &family);
                    if hits_f && workable_c.is_none() {
                        workable_c = Some(c);
                    }
                    CoveringOutcome::Found { family, hits_f }
                }
                Err(Error::InstanceTooLarge(_)) => CoveringOutcome::TooLarge,
                Err(Error::NotFound(_)) => CoveringOutcome::NotFound,
                Err(e) => return Err(e),
            };
            covering.push((c, outcome));
        }
    }
    Ok(SelectionReport {
        sum,
        s,
        sum_at_least,
        truncated_at_least,
        lhs,
        stochasticity: cert,
        rhs,
        verdict,
        covering,
        workable_c,
    })
}

impl SelectionReport {
    pub fn to_json(&self) -> Json {
        json!({
            "sum": self.sum.to_string(),
            "s": self.s,
            "sum_at_least": self.sum_at_least,
            "truncated_at_least": self.truncated_at_least,
            "lhs": self.lhs.map(|(v, _)| v),
            "lhs_argument": self.lhs.map(|(_, a)| a),
            "ks": self.stochasticity.as_ref().map(|c| c.value.to_string()),
            "ks_program": self.stochasticity.as_ref().map(|c| c.program.to_string()),
            "rhs": self.rhs.as_ref().map(|r| r.to_string()),
            "verdict": self.verdict,
            "covering": self.covering.iter().map(|(c, o)| match o {
                CoveringOutcome::Found { family, hits_f } => json!({
                    "c": c,
                    "expectation": family.expectation.to_string(),
                    "sizes": family.sets.iter().map(Vec::len).collect::<Vec<_>>(),
                    "hits_f": hits_f,
                }),
                CoveringOutcome::TooLarge => json!({ "c": c, "outcome": "too-large" }),
                CoveringOutcome::NotFound => json!({ "c": c, "outcome": "not-found" }),
            }).collect::<Vec<_>>(),
            "workable_c": self.workable_c,
        })
    }

    /// Whether every returned family meets its expectation bound.
    pub fn families_certified(&self) -> bool {
        self.covering.iter().all(|(c, o)| match o {
            CoveringOutcome::Found { family, .. } => crate::numeric::le_exp_neg(&family.expectation, c * family.d),
            _ => true,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BorderReport {
    pub sum: Rational,
    pub s: i64,
    /// Shortest total `b` with `S(b) < s`, through the packed layout.
    pub b: BitString,
    /// The same string by scanning every length in `◁` order.
    pub b_scan: Option<BitString>,
    pub s_of_b: i64,
    /// `S(b⁻)` is undefined.
    pub parent_not_total: bool,
    pub border: Option<bool>,
    pub lhs: Option<(i64, u64)>,
    pub info: Option<i64>,
    pub k_f: Option<usize>,
    pub verdict: Verdict,
}

/// Lengths scanned literally.
pub const SCAN_CAP: usize = 22;

fn bits_of(v: &BigUint, width: usize) -> BitString {
    (0..width).rev().map(|i| v.bit(i as u64)).collect()
}

/// `S(z) = ⌈-log Σ m̂_z(a)2^-f(a)⌉`, `None` off the total strings; `+∞`
/// is reported as `i64::MAX`.
fn s_of(line: &crate::machine::MassLine<'_>, z: &BitString) -> Option<i64> {
    line.mass(z).map(|w| NegLog::of(w).ceil().unwrap_or(i64::MAX))
}

/// Checks `min f(a) + K̂(a) ≤ -log Σ m̂(a)2^-f(a) + I(⟨f⟩;Ĥ)` on a
/// left-total snapshot and rebuilds the shortest total `b` with
/// `S(b) < s` two ways.
pub fn border_harness(
    f: &PrimitiveMap,
    lt: &LeftTotalSnapshot,
    halting: &HaltingApprox,
    slack: LogSlack,
) -> Result<BorderReport> {
    let weight = |out: &BitString| {
        let a = xi_string_to_index_u64(out).ok()?;
        f.get(a).map(|v| pow2(-(v as i64)))
    };
    let line = lt.mass_line(0, weight);
    let sum = line.total().clone();
    if sum.is_zero() {
        return Err(Error::Undefined("Σ m̂(a)2^-f(a) is zero".into()));
    }
    let s = 1 + NegLog::of(sum.clone()).ceil().expect("positive sum");
    let feasible = |z: &BitString| s_of(&line, z).is_some_and(|v| v < s);

    let depth = lt.programs(0).map(|(p, _)| p.len()).max().unwrap_or(0);
    let omega = lt.omega();
    let mut b = None;
    for len in 0..=depth {
        let scaled = omega * pow2(len as i64);
        let count = scaled.floor().to_integer().to_biguint().unwrap_or_default();
        if count.is_zero() {
            continue;
        }
        let last = &count - 1u32;
        if !feasible(&bits_of(&last, len)) {
            continue;
        }
        // feasibility is upward-closed along ◁ among total strings
        let (mut lo, mut hi) = (BigUint::zero(), last);
        while lo < hi {
            let mid = (&lo + &hi) >> 1;
            if feasible(&bits_of(&mid, len)) {
                hi = mid;
            } else {
                lo = mid + 1u32;
            }
        }
        b = Some(bits_of(&lo, len));
        break;
    }
    let b = b.ok_or_else(|| Error::NotFound("no total string reaches the threshold".into()))?;

    let mut b_scan = None;
    'scan: for len in 0..=SCAN_CAP.min(depth) {
        for idx in 0..(1u64 << len) {
            let z = BitString::from_u64(idx, len);
            if feasible(&z) {
                b_scan = Some(z);
                break 'scan;
            }
        }
    }

    let s_of_b = s_of(&line, &b).expect("b is total");
    let parent_not_total = b.parent().map_or(true, |p| !lt.is_total(&p));
    let snap = lt.snapshot();
    let empty = BitString::new();
    let lhs = selection_minimum(f.iter(), &empty, snap)?;
    let info = match info_with_halting(&f.encode(), &empty, halting, snap) {
        Ok(v) => Some(v),
        Err(Error::Undefined(_) | Error::AuxiliaryNotProbed) => None,
        Err(e) => return Err(e),
    };
    let k_f = k_hat(&f.encode(), &empty, snap)?.bits;
    let base = NegLog::of(sum.clone());
    let verdict = match lhs {
        None => Verdict::ProxyInconclusive,
        Some((l, _)) => {
            let l = NegLog::bits(l);
            if slack.admits(&l, &base.plus_bits(info.unwrap_or(0).max(0))) {
                Verdict::Holds
            } else if k_f.is_some_and(|k| !slack.admits(&l, &base.plus_bits(k as i64))) {
                Verdict::Violation
            } else {
                Verdict::ProxyInconclusive
            }
        }
    };
    Ok(BorderReport {
        sum,
        s,
        border: lt.border_check(&b),
        b,
        b_scan,
        s_of_b,
        parent_not_total,
        lhs,
        info,
        k_f,
        verdict,
    })
}

impl BorderReport {
    pub fn routes_agree(&self) -> bool {
        self.b_scan.as_ref() == Some(&self.b)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "sum": self.sum.to_string(),
            "s": self.s,
            "b": self.b.to_string(),
            "b_scan": self.b_scan.as_ref().map(|b| b.to_string()),
            "s_of_b": self.s_of_b,
            "parent_not_total": self.parent_not_total,
            "border": self.border,
            "lhs": self.lhs.map(|(v, _)| v),
            "info_proxy": self.info,
            "k_f": self.k_f,
            "verdict": self.verdict,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TotalPrefixReport {
    pub x_star: BitString,
    pub v: BitString,
    /// `Q(a) = Σ_w 2^-‖w‖ [U'(vw) = a]`, by output.
    pub q: Vec<(BitString, Rational)>,
    pub q_x: Rational,
    /// `Q(x) ≥ 2^{-‖x*‖+‖v‖}`.
    pub q_bound_holds: bool,
    /// `d(x|Q,v)` when `v` was probed as an auxiliary string.
    pub deficiency: Option<i64>,
    /// `⌊-log Q(x)⌋`, an upper bound on the deficiency.
    pub deficiency_upper: i64,
    /// `‖v‖ + max(d, 1)` with `d` exact when available.
    pub ks_bound: i64,
    pub info: Option<i64>,
    pub verdict: Verdict,
}

/// Rebuilds the measure of the shortest total prefix `v` of `x*` and
/// compares the stochasticity bound it certifies with `I(x;Ĥ)`.
pub fn total_prefix_harness(
    x: &BitString,
    lt: &LeftTotalSnapshot,
    halting: &HaltingApprox,
    slack: LogSlack,
) -> Result<TotalPrefixReport> {
    let snap = lt.snapshot();
    let empty = BitString::new();
    let x_star = shortest_program(x, &empty, snap)?.ok_or(Error::NoShortestProgram)?;
    let v = lt.shortest_total_prefix(&x_star).ok_or(Error::NoShortestProgram)?;
    let mut q: Vec<(BitString, Rational)> = Vec::new();
    for (p, out) in lt.programs(0).filter(|(p, _)| v.is_prefix_of(p)) {
        let w = pow2(v.len() as i64 - p.len() as i64);
        match q.iter_mut().find(|(o, _)| o == out) {
            Some((_, acc)) => *acc += w,
            None => q.push((out.clone(), w)),
        }
    }
    q.sort_by(|a, b| a.0.xi_cmp(&b.0));
    let q_x = q.iter().find(|(o, _)| o == x).map(|(_, w)| w.clone()).unwrap_or_else(Rational::zero);
    let q_bound_holds = q_x >= pow2(v.len() as i64 - x_star.len() as i64);
    let deficiency_upper = NegLog::of(q_x.clone()).floor().ok_or(Error::ZeroMass)?;
    let deficiency = if snap.is_probed(&v) {
        let measure = PrimitiveMeasure::from_pairs(
            q.iter()
                .filter_map(|(o, w)| key_of(o).ok().map(|k| (k, w.clone()))),
        )?;
        match deficiency(x, &measure, &v, snap) {
            Ok(d) => Some(d.bits),
            Err(Error::Undefined(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let ks_bound = v.len() as i64 + deficiency.unwrap_or(deficiency_upper).max(1);
    let info = match info_with_halting(x, &empty, halting, snap) {
        Ok(i) => Some(i),
        Err(Error::Undefined(_) | Error::AuxiliaryNotProbed) => None,
        Err(e) => return Err(e),
    };
    let verdict = match info {
        Some(i) if slack.admits(&NegLog::bits(ks_bound), &NegLog::bits(i.max(0))) => Verdict::Holds,
        _ => Verdict::ProxyInconclusive,
    };
    Ok(TotalPrefixReport {
        x_star,
        v,
        q,
        q_x,
        q_bound_holds,
        deficiency,
        deficiency_upper,
        ks_bound,
        info,
        verdict,
    })
}

impl TotalPrefixReport {
    pub fn to_json(&self) -> Json {
        json!({
            "x_star": self.x_star.to_string(),
            "v": self.v.to_string(),
            "support": self.q.len(),
            "q": self.q.iter().map(|(o, w)| json!([o.to_string(), w.to_string()])).collect::<Vec<_>>(),
            "q_x": self.q_x.to_string(),
            "q_bound_holds": self.q_bound_holds,
            "deficiency": self.deficiency,
            "deficiency_upper": self.deficiency_upper,
            "ks_bound": self.ks_bound,
            "info_proxy": self.info,
            "verdict": self.verdict,
        })
    }
}

/// Measure over encoded maps with the given weights, keyed as in
/// [`key_of_map`].
pub fn measure_over_maps(maps: &[(PrimitiveMap, Rational)]) -> Result<PrimitiveMeasure> {
    PrimitiveMeasure::from_pairs(maps.iter().map(|(g, w)| (key_of_map(g), w.clone())))
}
