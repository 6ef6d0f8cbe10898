use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qnc_core::algstats::{
    deficiency, family_expectation, key_of, key_of_map, map_of_key, search_covering_family, stochasticity, Penalty,
};
use qnc_core::codec::{
    decode_exact, encode_efficient, encode_integer, encode_rational, encode_string_tuple, encode_whole,
    xi_index_to_string, xi_string_to_index, CodeKind, Value,
};
use qnc_core::lab::AlgstatsLab;
use qnc_core::machine::{enumerate_universe, k_hat, left_totalize, MachineConfig, Record, UniverseSnapshot};
use qnc_core::numeric::{le_exp_neg, pow2, within_log_bound};
use qnc_core::quantum::generate::random_primitive_state;
use qnc_core::quantum::{fidelity, ComplexRational};
use qnc_core::{BitString, NegLog, PrimitiveMap, PrimitiveMeasure, Rational};

fn bits() -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..40).prop_map(BitString::from_bits)
}

fn rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1..=i64::MAX).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn small_universe() -> &'static UniverseSnapshot {
    static SNAP: OnceLock<UniverseSnapshot> = OnceLock::new();
    SNAP.get_or_init(|| enumerate_universe(MachineConfig { lmax: 12, steps: 5_000 }, &[], &[], None).unwrap())
}

fn stats_lab() -> &'static AlgstatsLab {
    static LAB: OnceLock<AlgstatsLab> = OnceLock::new();
    LAB.get_or_init(|| AlgstatsLab::build(None).unwrap())
}

/// `⌊-log₂ q⌋` by integer comparison.
fn floor_neg_log(q: &Rational) -> i64 {
    let mut k = 0i64;
    while pow2(k + 1) <= q.recip() {
        k += 1;
    }
    while pow2(k) > q.recip() {
        k -= 1;
    }
    k
}

fn weighted(f: &PrimitiveMap, m: &PrimitiveMeasure, cap: Option<u64>) -> Rational {
    f.iter()
        .filter(|(_, v)| cap.map_or(true, |c| *v <= c))
        .fold(Rational::zero(), |acc, (a, v)| acc + m.mass(&BigUint::from(a)) * pow2(-(v as i64)))
}

proptest! {
    #[test]
    fn strings_round_trip(x in bits()) {
        prop_assert_eq!(decode_exact(&encode_efficient(&x), CodeKind::String).unwrap(), Value::String(x.clone()));
        if x.is_empty() {
            prop_assert!(xi_string_to_index(&x).is_err());
        } else {
            prop_assert_eq!(xi_index_to_string(&xi_string_to_index(&x).unwrap()), x);
        }
    }

    #[test]
    fn wholes_and_integers_round_trip(n in any::<u128>(), z in any::<i128>()) {
        let n = BigUint::from(n);
        prop_assert_eq!(decode_exact(&encode_whole(&n), CodeKind::Whole).unwrap(), Value::Whole(n));
        let z = BigInt::from(z);
        prop_assert_eq!(decode_exact(&encode_integer(&z), CodeKind::Integer).unwrap(), Value::Integer(z));
    }

    #[test]
    fn rationals_round_trip(q in rational()) {
        prop_assert_eq!(decode_exact(&encode_rational(&q), CodeKind::Rational).unwrap(), Value::Rational(q));
    }

    #[test]
    fn tuples_round_trip(items in prop::collection::vec(bits(), 0..6)) {
        let code = encode_string_tuple(&items);
        prop_assert_eq!(decode_exact(&code, CodeKind::StringTuple).unwrap(), Value::StringTuple(items));
    }

    #[test]
    fn map_keys_round_trip(pairs in prop::collection::btree_map(0u64..200, 0u64..20, 0..6)) {
        let g = PrimitiveMap::from_pairs(pairs).unwrap();
        prop_assert_eq!(map_of_key(&key_of_map(&g)).unwrap(), g);
    }

    #[test]
    fn exp_bound_matches_float(p in 1u64..10_000, q in 1u64..10_000, x in 0u64..12) {
        let e = Rational::new(p.into(), q.into());
        let float = p as f64 / q as f64;
        let limit = (-(x as f64)).exp();
        if (float - limit).abs() > 1e-9 {
            prop_assert_eq!(le_exp_neg(&e, x), float <= limit);
        }
    }

    #[test]
    fn log_bound_is_monotone(a in 1i64..4_000, b in 1i64..4_000, c_add in -8i64..8) {
        let lhs = NegLog::bits(a);
        let base = NegLog::bits(b);
        if within_log_bound(&lhs, &base, 1, c_add) {
            prop_assert!(within_log_bound(&lhs, &base, 1, c_add + 1));
            prop_assert!(within_log_bound(&NegLog::bits(a - 1), &base, 1, c_add));
        }
    }

    #[test]
    fn selection_ledger(pairs in prop::collection::btree_map(0u64..16, 0u64..12, 1..8), support in 1usize..8) {
        let f = PrimitiveMap::from_pairs(pairs.clone()).unwrap();
        let keys: Vec<BigUint> = pairs.keys().take(support).map(|&a| BigUint::from(a)).collect();
        let m = PrimitiveMeasure::uniform(keys).unwrap();
        let sum = weighted(&f, &m, None);
        let s = NegLog::of(sum.clone()).ceil().unwrap();
        prop_assert!(sum >= pow2(-s));
        prop_assert!(weighted(&f, &m, Some(s.max(0) as u64)) >= pow2(-s - 1));
    }

    #[test]
    fn left_total_layout_tiles(mut lengths in prop::collection::vec(1usize..10, 1..9)) {
        lengths.sort();
        let records: Vec<Record> = lengths
            .iter()
            .enumerate()
            .map(|(i, &len)| {
                let mut p = BitString::repeat(true, i);
                while p.len() < len.max(i + 1) {
                    p.push(false);
                }
                Record { program: p, aux: 0, output: xi_index_to_string(&BigUint::from(i)), steps: (i + 1) as u64 }
            })
            .collect();
        let omega = records.iter().fold(Rational::zero(), |acc, r| acc + pow2(-(r.program.len() as i64)));
        let snap = UniverseSnapshot::from_records(MachineConfig::default(), vec![BitString::new()], vec![], records).unwrap();
        let lt = left_totalize(&snap);
        prop_assert!(lt.is_left_total());
        prop_assert_eq!(lt.omega(), &omega);
        let pieces = lt.programs(0).fold(Rational::zero(), |acc, (p, _)| acc + pow2(-(p.len() as i64)));
        prop_assert_eq!(pieces, omega);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_ignores_phase(seed in any::<u64>(), n in 1usize..3, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_primitive_state(&mut rng, n, 5);
        let phi = random_primitive_state(&mut rng, n, 5);
        let phase = [
            ComplexRational::new(Rational::new(3.into(), 5.into()), Rational::new((-4).into(), 5.into())),
            ComplexRational::i(),
            ComplexRational::new(-Rational::one(), Rational::zero()),
        ][which].clone();
        let base = fidelity(&psi, &phi).unwrap();
        prop_assert_eq!(fidelity(&psi.with_phase(&phase).unwrap(), &phi).unwrap(), base.clone());
        prop_assert!(!base.is_negative() && base <= Rational::one());
    }

    #[test]
    fn deficiency_formula(pick in any::<prop::sample::Index>(), extra in prop::collection::vec(1i64..8, 0..4)) {
        let snap = small_universe();
        let outputs: Vec<&BitString> = snap.outputs(0).into_iter().map(|(x, _)| x).filter(|x| !x.is_empty()).collect();
        let x = outputs[pick.index(outputs.len())].clone();
        let key = key_of(&x).unwrap();
        let mut weights = vec![(key.clone(), Rational::one())];
        for (i, w) in extra.iter().enumerate() {
            weights.push((&key + BigUint::from(i + 1), Rational::from_integer((*w).into())));
        }
        let total = weights.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
        let q = PrimitiveMeasure::from_pairs(weights.into_iter().map(|(k, w)| (k, w / &total))).unwrap();
        let d = deficiency(&x, &q, &BitString::new(), snap).unwrap();
        let k = k_hat(&x, &BitString::new(), snap).unwrap().bits.unwrap();
        prop_assert_eq!(d.bits, floor_neg_log(&q.mass(&key)) - k as i64);
    }

    #[test]
    fn covering_expectation_is_exact(
        maps in prop::collection::vec(prop::collection::btree_map(0u64..6, 0u64..3, 1..5), 1..5),
        s in 0u64..3,
        c in 1u64..3,
    ) {
        let m = PrimitiveMeasure::uniform((0u32..6).map(BigUint::from)).unwrap();
        let mut keys: Vec<BigUint> = maps.into_iter().map(|p| key_of_map(&PrimitiveMap::from_pairs(p).unwrap())).collect();
        keys.sort();
        keys.dedup();
        let share = Rational::new(1.into(), (keys.len() as i64).into());
        let q = PrimitiveMeasure::from_pairs(keys.iter().map(|k| (k.clone(), share.clone()))).unwrap();
        if let Ok(family) = search_covering_family(&q, &m, s, c, 1) {
            prop_assert!(le_exp_neg(&family.expectation, c));
            prop_assert_eq!(family.sets.len() as u64, s + 1);
            // an uncovered map misses every level's set
            let mut missed = Rational::zero();
            for (key, w) in q.iter() {
                let g = map_of_key(key).unwrap();
                let hit = family.sets.iter().enumerate().any(|(n, set)| {
                    set.iter().any(|a| num_traits::ToPrimitive::to_u64(a).and_then(|a| g.get(a)) == Some(n as u64))
                });
                if !hit {
                    missed += w;
                }
            }
            prop_assert_eq!(&missed, &family.expectation);
            prop_assert_eq!(family_expectation(&q, &m, &family.sets).unwrap(), missed);
        }
    }
}

#[test]
fn stochasticity_certificates_are_valid() {
    let lab = stats_lab();
    for inst in &lab.instances {
        let x = inst.f.encode();
        let alpha = inst.m.encode();
        let Ok(cert) = stochasticity(&x, Penalty::TwoLog, &alpha, &lab.snapshot) else {
            continue;
        };
        assert!(cert.measure.is_probability());
        assert!(!cert.measure.mass(&key_of(&x).unwrap()).is_zero());
        assert_eq!(cert.j, cert.program.len());
        assert_eq!(cert.k, cert.deficiency.bits.max(1));
        assert_eq!(cert.value, Penalty::TwoLog.score(cert.j, cert.k));
        let aux = lab.snapshot.aux_id(&alpha).unwrap();
        let record = lab
            .snapshot
            .records_for(aux)
            .iter()
            .find(|r| r.program == cert.program)
            .expect("certificate program halts");
        assert_eq!(decode_exact(&record.output, CodeKind::Measure).unwrap(), Value::Measure(cert.measure.clone()));
        assert_eq!(cert.measure, inst.q);
    }
}
