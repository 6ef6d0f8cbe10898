//! Exhaustive search for a covering family `A = {A_n}`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::codec::{xi_index_to_string, BitReader, PrimitiveMap, PrimitiveMeasure, Rational};
use crate::error::{Error, Result};
use crate::numeric::le_exp_neg;

pub const MAX_SUPPORT: usize = 8;
pub const MAX_LEVEL: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringFamily {
    /// `A_0 … A_s`, each sorted.
    pub sets: Vec<Vec<BigUint>>,
    pub c: u64,
    pub d: u64,
    pub s: u64,
    /// `E_{g∼Q}[1(g, A)]`, exactly.
    pub expectation: Rational,
}

/// Decodes a key of `Q` (the ξ index of `⟨g⟩`) into `g`.
pub fn map_of_key(key: &BigUint) -> Result<PrimitiveMap> {
    let bits = xi_index_to_string(key);
    let mut r = BitReader::new(bits.as_slice());
    let g = r.read_map()?;
    if !r.is_at_end() {
        return Err(Error::MalformedCode("trailing bits after map".into()));
    }
    Ok(g)
}

/// Key of a map: the ξ index of `⟨g⟩`.
pub fn key_of_map(g: &PrimitiveMap) -> BigUint {
    crate::codec::xi_string_to_index(&g.encode()).expect("map codes are nonempty")
}

/// `|A_n| = min(c·d·2^{s+1-n}, |Supp(m)|)`.
pub fn level_size(c: u64, d: u64, s: u64, n: u64, support: usize) -> usize {
    let shift = s + 1 - n;
    let size = (c as u128 * d as u128).checked_shl(shift as u32).unwrap_or(u128::MAX);
    size.min(support as u128) as usize
}

struct Instance {
    support: Vec<BigUint>,
    /// `(Q(g), level masks g_0 … g_s)`.
    maps: Vec<(Rational, Vec<u16>)>,
}

fn instance(q: &PrimitiveMeasure, m: &PrimitiveMeasure, s: u64) -> Result<Instance> {
    let support: Vec<BigUint> = m.support().cloned().collect();
    if support.len() > MAX_SUPPORT || s > MAX_LEVEL {
        return Err(Error::InstanceTooLarge(format!("|Supp(m)| = {}, s = {s}", support.len())));
    }
    let mut maps = Vec::new();
    for (key, w) in q.iter() {
        let g = map_of_key(key)?;
        let mut masks = vec![0u16; s as usize + 1];
        for (i, a) in support.iter().enumerate() {
            if let Some(n) = a.to_u64().and_then(|a| g.get(a)) {
                if n <= s {
                    masks[n as usize] |= 1 << i;
                }
            }
        }
        maps.push((w.clone(), masks));
    }
    Ok(Instance { support, maps })
}

fn expectation(inst: &Instance, chosen: &[u16], full: u16, levels: usize) -> Rational {
    inst.maps
        .iter()
        .filter(|(_, masks)| {
            (0..levels).all(|n| {
                let a = chosen.get(n).copied().unwrap_or(full);
                masks[n] & a == 0
            })
        })
        .fold(Rational::zero(), |acc, (w, _)| acc + w)
}

/// `E_{g∼Q}[1(g, A)]` for an explicit family.
pub fn family_expectation(q: &PrimitiveMeasure, m: &PrimitiveMeasure, sets: &[Vec<BigUint>]) -> Result<Rational> {
    let s = sets.len().saturating_sub(1) as u64;
    let inst = instance(q, m, s)?;
    let mut chosen = Vec::with_capacity(sets.len());
    for set in sets {
        let mut mask = 0u16;
        for a in set {
            match inst.support.iter().position(|b| b == a) {
                Some(i) => mask |= 1 << i,
                None => return Err(Error::Undefined(format!("{a} is outside Supp(m)"))),
            }
        }
        chosen.push(mask);
    }
    let full = (1u16 << inst.support.len()) - 1;
    Ok(expectation(&inst, &chosen, full, sets.len()))
}

/// First family, in increasing mask order level by level, with
/// `E_{g∼Q}[1(g, A)] ≤ exp(-c·d)`. `A_n ⊆ Supp(m)`; `1(g, A) = 1` iff
/// `g⁻¹(n) ∩ Supp(m) ∩ A_n = ∅` for every `n ≤ s`.
pub fn search_covering_family(
    q: &PrimitiveMeasure,
    m: &PrimitiveMeasure,
    s: u64,
    c: u64,
    d: u64,
) -> Result<CoveringFamily> {
    let inst = instance(q, m, s)?;
    let width = inst.support.len();
    if width == 0 {
        return Err(Error::NotFound("empty support".into()));
    }
    let cd = c.checked_mul(d).ok_or_else(|| Error::InstanceTooLarge("c·d overflows".into()))?;
    let full = ((1u32 << width) - 1) as u16;
    let levels = s as usize + 1;
    let candidates: Vec<Vec<u16>> = (0..levels)
        .map(|n| {
            let k = level_size(c, d, s, n as u64, width);
            (0..=full).filter(|mask| mask.count_ones() as usize == k).collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(levels);
    if !dfs(&inst, &candidates, &mut chosen, full, levels, cd) {
        return Err(Error::NotFound("no family meets the bound".into()));
    }
    let sets = chosen
        .iter()
        .map(|mask| {
            (0..width)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| inst.support[i].clone())
                .collect()
        })
        .collect();
    Ok(CoveringFamily {
        sets,
        c,
        d,
        s,
        expectation: expectation(&inst, &chosen, full, levels),
    })
}

fn dfs(inst: &Instance, candidates: &[Vec<u16>], chosen: &mut Vec<u16>, full: u16, levels: usize, cd: u64) -> bool {
    // later levels at full support give the smallest reachable expectation
    if !le_exp_neg(&expectation(inst, chosen, full, levels), cd) {
        return false;
    }
    if chosen.len() == levels {
        return true;
    }
    for &mask in &candidates[chosen.len()] {
        chosen.push(mask);
        if dfs(inst, candidates, chosen, full, levels, cd) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A family with `c·d·2^{s+1-n}` independent draws from `m` at level `n`.
pub fn sample_family<R: Rng>(rng: &mut R, m: &PrimitiveMeasure, s: u64, c: u64, d: u64) -> Result<Vec<Vec<BigUint>>> {
    let support: Vec<BigUint> = m.support().cloned().collect();
    let weights: Vec<f64> = m.iter().map(|(_, w)| w.to_f64().unwrap_or(0.0)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|_| Error::ZeroMass)?;
    Ok((0..=s)
        .map(|n| {
            let draws = level_size(c, d, s, n, usize::MAX);
            let mut set: Vec<BigUint> = (0..draws).map(|_| support[dist.sample(rng)].clone()).collect();
            set.sort();
            set.dedup();
            set
        })
        .collect())
}

/// Whether `f_n ∩ A_n ≠ ∅` for some `n`.
pub fn family_hits(f: &PrimitiveMap, family: &CoveringFamily) -> bool {
    family.sets.iter().enumerate().any(|(n, set)| {
        set.iter()
            .any(|a| a.to_u64().and_then(|a| f.get(a)) == Some(n as u64))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn m4() -> PrimitiveMeasure {
        PrimitiveMeasure::uniform((0u32..4).map(BigUint::from)).unwrap()
    }

    fn map(pairs: &[(u64, u64)]) -> PrimitiveMap {
        PrimitiveMap::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn single_map_is_covered() {
        let g = map(&[(0, 1), (1, 5), (2, 0)]);
        let q = PrimitiveMeasure::from_pairs([(key_of_map(&g), r(1, 1))]).unwrap();
        let fam = search_covering_family(&q, &m4(), 1, 1, 1).unwrap();
        assert!(fam.expectation.is_zero());
        assert!(family_hits(&g, &fam));
        assert_eq!(fam.sets[0].len(), 4);
        assert_eq!(fam.sets[1].len(), 2);
        assert_eq!(family_expectation(&q, &m4(), &fam.sets).unwrap(), fam.expectation);
    }

    #[test]
    fn bound_holds_on_found_family() {
        let m = PrimitiveMeasure::uniform((0u32..8).map(BigUint::from)).unwrap();
        let gs = [
            map(&[(0, 3), (1, 3), (2, 3)]),
            map(&[(5, 2), (6, 3)]),
            map(&[(7, 3), (3, 3), (4, 2)]),
        ];
        let q = PrimitiveMeasure::from_pairs(gs.iter().map(|g| (key_of_map(g), r(1, 3)))).unwrap();
        for c in 1..=3 {
            let fam = search_covering_family(&q, &m, 3, c, 1).unwrap();
            assert!(le_exp_neg(&fam.expectation, c));
            assert_eq!(family_expectation(&q, &m, &fam.sets).unwrap(), fam.expectation);
            for (n, set) in fam.sets.iter().enumerate() {
                assert_eq!(set.len(), level_size(c, 1, 3, n as u64, 8));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hits = (0..100)
            .filter(|_| {
                let sets = sample_family(&mut rng, &m, 3, 1, 1).unwrap();
                le_exp_neg(&family_expectation(&q, &m, &sets).unwrap(), 1)
            })
            .count();
        assert!(hits >= 1);
    }

    #[test]
    fn oversized_instances_are_rejected() {
        let m = PrimitiveMeasure::uniform((0u32..9).map(BigUint::from)).unwrap();
        let q = PrimitiveMeasure::from_pairs([(key_of_map(&map(&[(0, 0)])), r(1, 1))]).unwrap();
        assert!(matches!(search_covering_family(&q, &m, 1, 1, 1), Err(Error::InstanceTooLarge(_))));
        assert!(matches!(search_covering_family(&q, &m4(), 4, 1, 1), Err(Error::InstanceTooLarge(_))));
    }
}
