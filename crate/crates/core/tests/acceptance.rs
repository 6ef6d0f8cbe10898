//! Acceptance suite. Prints one pass/fail line per criterion and exits
//! nonzero if any criterion fails or overruns its time limit.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qnc_core::algstats::{condition_on_heavy_maps, map_of_key, total_prefix_harness, CoveringOutcome, LogSlack, Verdict};
use qnc_core::codec::{
    decode_exact, decode_stream, encode_efficient, encode_integer, encode_rational, encode_string_set,
    encode_string_tuple, encode_unary_guarded, encode_whole, xi_index_to_string_u64, CodeKind, Value,
};
use qnc_core::entropy::circuit_density;
use qnc_core::lab::{
    dominance_table, entropy_json, entropy_rows, gap_csv, gap_rows, population, AlgstatsLab, QuantumLab,
};
use qnc_core::machine::{
    enumerate_programs, enumerate_universe, k_hat, left_totalize, m_hat, run, HaltingApprox, LeftTotalSnapshot,
    MachineConfig, Outcome, Record, UniverseSnapshot,
};
use qnc_core::numeric::{le_exp_neg, pow2};
use qnc_core::protocol::evaluate;
use qnc_core::quantum::generate::{
    cayley_unitary, diagonal_unitary, permutation_unitary, random_primitive_state, random_skew_hermitian,
    random_unitary,
};
use qnc_core::quantum::{
    best_input_overlap, fidelity, pad_and_apply, psd_dominates, synthesize_preparation, Circuit, ComplexRational,
    Matrix, PureState, SemiDensityMatrix,
};
use qnc_core::{BitString, PrimitiveMap, PrimitiveMeasure, Rational, SlackTable};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn f64_of(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn random_bits<R: Rng>(rng: &mut R, max_len: usize) -> BitString {
    let len = rng.gen_range(0..=max_len);
    BitString::from_bits((0..len).map(|_| rng.gen()).collect())
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let p: i64 = rng.gen_range(-1_000_000..=1_000_000);
    let q: i64 = rng.gen_range(1..=1_000_000);
    r(p, q)
}

fn random_whole<R: Rng>(rng: &mut R) -> BigUint {
    let hi: u64 = if rng.gen_bool(0.2) { rng.gen() } else { 0 };
    let shift = rng.gen_range(0..64);
    (BigUint::from(hi) << 64u32) + BigUint::from(rng.gen_range(0..=u64::MAX >> shift))
}

/// `(kind, value, code)` for a random value of the grammar.
fn random_value<R: Rng>(rng: &mut R, kind: CodeKind) -> (Value, BitString) {
    match kind {
        CodeKind::UnaryGuarded => {
            let x = random_bits(rng, 24);
            (Value::String(x.clone()), encode_unary_guarded(&x))
        }
        CodeKind::String => {
            let x = random_bits(rng, 64);
            (Value::String(x.clone()), encode_efficient(&x))
        }
        CodeKind::Whole => {
            let n = random_whole(rng);
            (Value::Whole(n.clone()), encode_whole(&n))
        }
        CodeKind::Integer => {
            let z = BigInt::from(rng.gen::<i64>()) * BigInt::from(rng.gen_range(1..1000u32));
            (Value::Integer(z.clone()), encode_integer(&z))
        }
        CodeKind::Rational => {
            let q = random_rational(rng);
            (Value::Rational(q.clone()), encode_rational(&q))
        }
        CodeKind::StringSet => {
            let items: Vec<BitString> = (0..rng.gen_range(0..5)).map(|_| random_bits(rng, 12)).collect();
            let code = encode_string_set(&items);
            // decoded order follows the sorted element codes
            let mut sorted: Vec<(BitString, BitString)> = items.iter().map(|x| (encode_efficient(x), x.clone())).collect();
            sorted.sort();
            sorted.dedup();
            (Value::StringSet(sorted.into_iter().map(|(_, x)| x).collect()), code)
        }
        CodeKind::StringTuple => {
            let items: Vec<BitString> = (0..rng.gen_range(0..5)).map(|_| random_bits(rng, 12)).collect();
            (Value::StringTuple(items.clone()), encode_string_tuple(&items))
        }
        CodeKind::Map => {
            let keys: BTreeSet<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..1000)).collect();
            let g = PrimitiveMap::from_pairs(keys.into_iter().map(|k| (k, rng.gen_range(0..50)))).unwrap();
            (Value::Map(g.clone()), g.encode())
        }
        CodeKind::Measure => {
            let keys: BTreeSet<u64> = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..1000)).collect();
            let q = PrimitiveMeasure::from_pairs(
                keys.into_iter()
                    .map(|k| (BigUint::from(k), r(rng.gen_range(1..10), rng.gen_range(1..100)))),
            )
            .unwrap();
            (Value::Measure(q.clone()), q.encode())
        }
    }
}

const KINDS: [CodeKind; 9] = [
    CodeKind::UnaryGuarded,
    CodeKind::String,
    CodeKind::Whole,
    CodeKind::Integer,
    CodeKind::Rational,
    CodeKind::StringSet,
    CodeKind::StringTuple,
    CodeKind::Map,
    CodeKind::Measure,
];

/// `Σ 2^-|c|` and prefix-freeness of a code set.
fn kraft_and_prefix_free(codes: &[BitString]) -> (Rational, bool) {
    let mut sorted = codes.to_vec();
    sorted.sort();
    sorted.dedup();
    let sum = sorted.iter().fold(Rational::zero(), |acc, c| acc + pow2(-(c.len() as i64)));
    let free = sorted.windows(2).all(|w| !w[0].is_prefix_of(&w[1]));
    (sum, free)
}

fn codec_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in KINDS {
        for _ in 0..10_000 {
            let (value, code) = random_value(&mut rng, kind);
            let back = decode_exact(&code, kind).map_err(|e| format!("{kind:?}: {e}"))?;
            ensure!(back == value, "{kind:?} round trip changed {value:?}");
            let mut padded = code.clone();
            padded.extend_from(&random_bits(&mut rng, 8));
            let (_, used) = decode_stream(padded.as_slice(), kind).map_err(|e| format!("{kind:?}: {e}"))?;
            ensure!(used == code.len(), "{kind:?} read {used} of {} bits", code.len());
        }
        for _ in 0..20 {
            let codes: Vec<BitString> = (0..200).map(|_| random_value(&mut rng, kind).1).collect();
            let (sum, free) = kraft_and_prefix_free(&codes);
            ensure!(free, "{kind:?} sample is not prefix-free");
            ensure!(sum <= Rational::one(), "{kind:?} Kraft sum {sum}");
        }
    }
    // all short strings at once
    let all: Vec<BitString> = (0..(1u64 << 11) - 1).map(xi_index_to_string_u64).map(|x| encode_efficient(&x)).collect();
    let (sum, free) = kraft_and_prefix_free(&all);
    ensure!(free && sum <= Rational::one(), "short-string Kraft sum {sum}");
    ensure!(encode_efficient(&BitString::from("11111")) == BitString::from("11011011111"), "⟨11111⟩");
    ensure!(xi_index_to_string_u64(6) == BitString::from("000"), "ξ_6");
    Ok(format!("{} grammars x 10^4 values", KINDS.len()))
}

fn machine_suite(c_machine: i64) -> Check {
    let config = MachineConfig::default();
    let snap = enumerate_universe(config, &[], &[], None).map_err(|e| e.to_string())?;
    let empty = BitString::new();
    // rerun every complete program of the budget
    let mut halting: Vec<BitString> = Vec::new();
    let mut parsed: Vec<BitString> = Vec::new();
    for (bits, _) in enumerate_programs(config.lmax) {
        if let Outcome::Halted { .. } = run(&bits, &empty, config.steps) {
            halting.push(bits.clone());
        }
        parsed.push(bits);
    }
    let mut recorded: Vec<BitString> = snap.records_for(0).iter().map(|r| r.program.clone()).collect();
    recorded.sort();
    halting.sort();
    ensure!(recorded == halting, "snapshot domain differs from a direct rerun");
    let (_, free) = kraft_and_prefix_free(&parsed);
    ensure!(free, "program codes are not prefix-free");
    ensure!(snap.prefix_violation().is_none(), "domain is not prefix-free");

    let small = enumerate_universe(MachineConfig { lmax: 12, steps: 5_000 }, &[], &[], None).map_err(|e| e.to_string())?;
    ensure!(small.omega_lower() <= snap.omega_lower(), "Ω̂ decreased");
    for (x, _) in small.outputs(0) {
        let a = m_hat(x, &empty, &small).map_err(|e| e.to_string())?;
        let b = m_hat(x, &empty, &snap).map_err(|e| e.to_string())?;
        ensure!(a <= b, "m̂({x}) decreased");
    }
    let (hs, hb) = (HaltingApprox::from_snapshot(&small), HaltingApprox::from_snapshot(&snap));
    ensure!(
        hs.bits.as_slice().iter().zip(hb.bits.as_slice()).all(|(s, b)| !s || *b),
        "Ĥ lost a bit"
    );

    for (x, stats) in snap.outputs(0) {
        let k = k_hat(x, &empty, &snap).map_err(|e| e.to_string())?.bits.ok_or("no program")?;
        // K̂ ≤ -log m̂ + c  ⇔  m̂ ≤ 2^(c - K̂)
        ensure!(stats.mass <= pow2(c_machine - k as i64), "coding bound fails for {x}");
    }
    Ok(format!("{} halting of {} programs", halting.len(), parsed.len()))
}

/// Pieces tile `[0, Ω̂)` left to right without gaps or overlaps.
fn tiles_prefix_of_unit(lt: &LeftTotalSnapshot, aux: usize) -> bool {
    let mut spans: Vec<(Rational, Rational)> = lt
        .programs(aux)
        .map(|(p, _)| {
            let start = p
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .fold(Rational::zero(), |acc, (i, _)| acc + pow2(-(i as i64) - 1));
            (start, pow2(-(p.len() as i64)))
        })
        .collect();
    spans.sort();
    let mut end = Rational::zero();
    for (start, width) in spans {
        if start != end {
            return false;
        }
        end = start + width;
    }
    &end <= &Rational::one()
}

fn fixture(lengths: &[usize]) -> UniverseSnapshot {
    let records = lengths
        .iter()
        .enumerate()
        .map(|(i, &len)| {
            let mut p = BitString::repeat(true, i);
            p.push(false);
            while p.len() < len {
                p.push(false);
            }
            Record {
                program: p,
                aux: 0,
                output: xi_index_to_string_u64(i as u64),
                steps: i as u64 + 1,
            }
        })
        .collect();
    UniverseSnapshot::from_records(MachineConfig::default(), vec![BitString::new()], vec![], records).unwrap()
}

fn left_total_suite(stats: &AlgstatsLab) -> Check {
    let default = enumerate_universe(MachineConfig::default(), &[], &[], None).map_err(|e| e.to_string())?;
    let lt = left_totalize(&default);
    ensure!(lt.is_left_total(), "default remap is not left-total");
    ensure!(tiles_prefix_of_unit(&lt, 0), "default remap leaves a gap");
    ensure!(stats.left_total.is_left_total(), "lab remap is not left-total");
    for aux in 0..stats.left_total.snapshot().auxes().len() {
        ensure!(tiles_prefix_of_unit(&stats.left_total, aux), "lab remap leaves a gap on aux {aux}");
    }

    // seven programs of lengths 2,3,6,7,8,9,9 laid out by running time
    let lt = left_totalize(&fixture(&[2, 3, 6, 7, 8, 9, 9]));
    let mut start = Rational::zero();
    for ((p, _), len) in lt.programs(0).zip([2usize, 3, 6, 7, 8, 9, 9]) {
        let scaled = (&start * pow2(len as i64)).to_integer().to_u64().unwrap();
        ensure!(*p == BitString::from_u64(scaled, len), "piece {p} should start at {start}");
        start += pow2(-(len as i64));
    }
    ensure!(lt.omega() == &r(13, 32), "Ω̂ = {}", lt.omega());
    ensure!(lt.is_left_total(), "fixture is not left-total");
    let x = xi_index_to_string_u64(3);
    let no_halting = HaltingApprox {
        bits: BitString::new(),
        config: MachineConfig::default(),
    };
    let rep = total_prefix_harness(&x, &lt, &no_halting, LogSlack { c_log: 0, c_add: 0 }).map_err(|e| e.to_string())?;
    ensure!(rep.x_star == BitString::from("0110010"), "x* = {}", rep.x_star);
    ensure!(rep.v == BitString::from("01100"), "v = {}", rep.v);
    let masses: Vec<Rational> = rep.q.iter().map(|(_, w)| w.clone()).collect();
    ensure!(masses == [r(1, 2), r(1, 4), r(1, 8), r(1, 16), r(1, 16)], "Q = {masses:?}");
    ensure!(rep.q_x == r(1, 4), "Q(x) = {}", rep.q_x);
    ensure!(rep.q_x == pow2(rep.v.len() as i64 - rep.x_star.len() as i64), "Q(x) ≠ 2^(-|x*|+|v|)");
    Ok(format!("{} remapped pieces", lt.programs(0).count()))
}

fn is_unitary(m: &Matrix) -> bool {
    m.adjoint().mul(m).map(|p| p.is_identity()).unwrap_or(false)
}

fn to_f64(c: &ComplexRational) -> (f64, f64) {
    (f64_of(&c.re), f64_of(&c.im))
}

/// Random search with shrinking perturbations for `max_θ |⟨ψ|V|θ0⟩|²`.
fn overlap_oracle<R: Rng>(rng: &mut R, circuit: &Circuit, psi: &PureState) -> f64 {
    let v = circuit.unitary().matrix();
    let dim = v.dim();
    let pad = circuit.qubits() - circuit.inputs();
    let inputs = 1usize << circuit.inputs();
    // row vector ψ*V restricted to the padded input columns
    let row: Vec<(f64, f64)> = (0..inputs)
        .map(|a| {
            let mut acc = (0.0, 0.0);
            for i in 0..dim {
                let (pr, pi) = to_f64(&psi.amplitudes()[i]);
                let (vr, vi) = to_f64(v.get(i, a << pad));
                acc.0 += pr * vr + pi * vi;
                acc.1 += pr * vi - pi * vr;
            }
            acc
        })
        .collect();
    let objective = |theta: &[(f64, f64)]| {
        let norm: f64 = theta.iter().map(|(a, b)| a * a + b * b).sum();
        let (mut re, mut im) = (0.0, 0.0);
        for ((rr, ri), (tr, ti)) in row.iter().zip(theta) {
            re += rr * tr - ri * ti;
            im += rr * ti + ri * tr;
        }
        (re * re + im * im) / norm
    };
    let mut best: Vec<(f64, f64)> = vec![(1.0, 0.0); inputs];
    let mut best_val = objective(&best);
    for _ in 0..2_000 {
        let t: Vec<(f64, f64)> = (0..inputs).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let val = objective(&t);
        if val > best_val {
            best = t;
            best_val = val;
        }
    }
    let mut step = 0.5;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..40 {
            let t: Vec<(f64, f64)> = best
                .iter()
                .map(|(a, b)| (a + step * rng.gen_range(-1.0..1.0), b + step * rng.gen_range(-1.0..1.0)))
                .collect();
            let val = objective(&t);
            if val > best_val {
                best = t;
                best_val = val;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_val
}

fn quantum_suite(lab: &QuantumLab, c_dominance: i64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut unitaries: Vec<Matrix> = Vec::new();
    for n in 1..=3 {
        for _ in 0..10 {
            unitaries.push(random_unitary(&mut rng, n).matrix().clone());
        }
        let dim = 1usize << n;
        unitaries.push(cayley_unitary(&random_skew_hermitian(&mut rng, dim, 5)).map_err(|e| e.to_string())?.matrix().clone());
        let perm: Vec<usize> = (0..dim).rev().collect();
        unitaries.push(permutation_unitary(n, &perm).map_err(|e| e.to_string())?.matrix().clone());
        let phases: Vec<ComplexRational> = (0..dim)
            .map(|j| if j % 2 == 0 { ComplexRational::new(r(3, 5), r(4, 5)) } else { ComplexRational::i() })
            .collect();
        unitaries.push(diagonal_unitary(&phases).map_err(|e| e.to_string())?.matrix().clone());
    }
    unitaries.extend(lab.seed_circuits.iter().map(|c| c.unitary().matrix().clone()));
    unitaries.extend(lab.catalog.circuits().iter().map(|c| c.circuit.unitary().matrix().clone()));
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let theta = random_primitive_state(&mut rng, n, 5);
        let prep = synthesize_preparation(&theta).map_err(|e| e.to_string())?;
        let out = pad_and_apply(&prep, &PureState::zero_state(0)).map_err(|e| e.to_string())?;
        ensure!(fidelity(&theta, &out).map_err(|e| e.to_string())?.is_one(), "preparation misses");
        unitaries.push(prep.unitary().matrix().clone());
    }
    ensure!(unitaries.iter().all(is_unitary), "a generated unitary is not exactly unitary");

    let phases = [ComplexRational::new(r(3, 5), r(4, 5)), ComplexRational::i(), ComplexRational::new(r(-5, 13), r(12, 13))];
    for i in 0..1_000 {
        let n = 1 + i % 2;
        let psi = random_primitive_state(&mut rng, n, 6);
        let phi = random_primitive_state(&mut rng, n, 6);
        let base = fidelity(&psi, &phi).map_err(|e| e.to_string())?;
        let turned = phi.with_phase(&phases[i % 3]).map_err(|e| e.to_string())?;
        ensure!(fidelity(&psi, &turned).map_err(|e| e.to_string())? == base, "phase changed fidelity");
        ensure!(fidelity(&phi, &psi).map_err(|e| e.to_string())? == base, "fidelity is not symmetric");
    }

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let circuit = Circuit::new(random_unitary(&mut rng, 2), 1).map_err(|e| e.to_string())?;
        let psi = random_primitive_state(&mut rng, 2, 6);
        let (value, witness) = best_input_overlap(&circuit, &psi).map_err(|e| e.to_string())?;
        ensure!(witness.evaluate(&circuit, &psi).map_err(|e| e.to_string())? == value, "witness misses its value");
        let oracle = overlap_oracle(&mut rng, &circuit, &psi);
        worst = worst.max((f64_of(&value) - oracle).abs());
    }
    ensure!(worst <= 1e-6, "overlap off by {worst:e}");

    let table = dominance_table(&lab.catalog, None).map_err(|e| e.to_string())?;
    let mu = lab.catalog.mu().map_err(|e| e.to_string())?;
    let mut largest = 0;
    for (i, c) in table.iter().enumerate() {
        let c = c.ok_or(format!("circuit {i} has no dominance constant"))?;
        ensure!(c <= c_dominance, "circuit {i} needs {c} > {c_dominance}");
        let gamma = circuit_density(&lab.catalog, i).map_err(|e| e.to_string())?;
        let weighted = SemiDensityMatrix::new(gamma.matrix().scale(&lab.catalog.circuits()[i].weight)).map_err(|e| e.to_string())?;
        ensure!(psd_dominates(&weighted, &mu, &pow2(c)).map_err(|e| e.to_string())?, "circuit {i} at {c}");
        if c > 0 {
            ensure!(!psd_dominates(&weighted, &mu, &pow2(c - 1)).map_err(|e| e.to_string())?, "circuit {i} not minimal");
        }
        largest = largest.max(c);
    }
    Ok(format!("{} unitaries, overlap error {worst:.1e}, dominance ≤ {largest}", unitaries.len()))
}

fn entropy_chain(lab: &QuantumLab, slack: &SlackTable) -> Check {
    let states = population(&lab.catalog);
    ensure!(states.len() >= 200, "only {} states", states.len());
    for prefix in ["catalog-", "primitive-", "approximate-"] {
        ensure!(states.iter().any(|(id, _)| id.starts_with(prefix)), "no {prefix} states");
    }
    let k = slack.chain();
    let rows = entropy_rows(&states, &lab.catalog, None).map_err(|e| e.to_string())?;
    for ((id, psi), (_, rep)) in states.iter().zip(&rows) {
        ensure!(!rep.violations(&k).any(), "{id}: {:?}", rep.violations(&k));
        ensure!(rep.hg == rep.hg_mu, "{id}: Hg routes differ");
        ensure!(rep.witnesses_reproduce(psi, &lab.catalog).map_err(|e| e.to_string())?, "{id}: witnesses");
    }
    Ok(format!("{} states", rows.len()))
}

fn transmission_gap(lab: &QuantumLab, slack: &SlackTable) -> Check {
    let mut states = population(&lab.catalog);
    states.push(("exotic".into(), lab.exotic.clone()));
    let rows = gap_rows(&states, lab, &slack.gap(), None).map_err(|e| e.to_string())?;
    let kept = rows.iter().filter(|r| !r.flagged).count();
    ensure!(kept >= 100, "only {kept} non-flagged states");
    for row in &rows {
        ensure!(!row.fails(), "{} exceeds the gap bound", row.id);
        ensure!(row.mixed.total() <= row.classical.total(), "{}: mixed above classical", row.id);
    }
    let exotic = rows.iter().find(|r| r.id == "exotic").ok_or("no exotic row")?;
    ensure!(exotic.flagged, "exotic state not flagged ({})", exotic.info);
    for (row, (_, psi)) in rows.iter().zip(&states).step_by(10) {
        let c = evaluate(psi, &row.classical.strategy, &lab.snapshot).map_err(|e| e.to_string())?;
        ensure!(c.total() == row.classical.total(), "{}: classical replay differs", row.id);
        let m = evaluate(psi, &row.mixed.strategy, &lab.snapshot).map_err(|e| e.to_string())?;
        ensure!(m.l == row.mixed.l && m.m == row.mixed.m, "{}: mixed replay differs", row.id);
    }
    Ok(format!("{kept} non-flagged of {}", rows.len()))
}

/// `E_{g∼Q}[1(g, A)]` recomputed from decoded maps.
fn direct_expectation(q: &PrimitiveMeasure, m: &PrimitiveMeasure, sets: &[Vec<BigUint>]) -> Rational {
    let mut total = Rational::zero();
    for (key, w) in q.iter() {
        let g = map_of_key(key).unwrap();
        let missed = sets.iter().enumerate().all(|(n, set)| {
            !set.iter().any(|a| {
                !m.mass(a).is_zero() && a.to_u64().and_then(|a| g.get(a)) == Some(n as u64)
            })
        });
        if missed {
            total += w;
        }
    }
    total
}

fn statistics_harnesses(lab: &AlgstatsLab, slack: &SlackTable) -> Check {
    let reports = lab
        .run(slack.selection(), slack.border(), slack.total_prefix(), None)
        .map_err(|e| e.to_string())?;
    ensure!(reports.selection.len() == 20, "{} instances", reports.selection.len());
    let mut families = 0;
    for (i, (inst, rep)) in lab.instances.iter().zip(&reports.selection).enumerate() {
        ensure!(rep.verdict != Verdict::Violation, "instance {i} violates the selection bound");
        let sum = inst
            .f
            .iter()
            .fold(Rational::zero(), |acc, (a, v)| acc + inst.m.mass(&BigUint::from(a)) * pow2(-(v as i64)));
        let truncated = inst
            .f
            .iter()
            .filter(|(_, v)| (*v as i64) <= rep.s)
            .fold(Rational::zero(), |acc, (a, v)| acc + inst.m.mass(&BigUint::from(a)) * pow2(-(v as i64)));
        ensure!(sum == rep.sum, "instance {i}: Σ differs");
        ensure!(sum >= pow2(-rep.s) && rep.sum_at_least, "instance {i}: Σ < 2^-s");
        ensure!(truncated >= pow2(-rep.s - 1) && rep.truncated_at_least, "instance {i}: truncation too light");
        let q = condition_on_heavy_maps(&inst.q, &inst.m, rep.s).map_err(|e| e.to_string())?;
        for (c, outcome) in &rep.covering {
            match outcome {
                CoveringOutcome::Found { family, .. } => {
                    let e = direct_expectation(&q, &inst.m, &family.sets);
                    ensure!(e == family.expectation, "instance {i}, c = {c}: expectation differs");
                    ensure!(le_exp_neg(&e, c * family.d), "instance {i}, c = {c}: bound fails");
                    ensure!(f64_of(&e) <= (-((c * family.d) as f64)).exp() + 1e-12, "instance {i}: float check");
                    families += 1;
                }
                CoveringOutcome::NotFound => return Err(format!("instance {i}, c = {c}: no family")),
                CoveringOutcome::TooLarge => {}
            }
        }
    }
    ensure!(reports.selection.iter().any(|r| r.verdict == Verdict::Holds), "no instance holds");
    for (i, rep) in reports.border.iter().enumerate() {
        ensure!(rep.routes_agree(), "instance {i}: b = {} but scan gives {:?}", rep.b, rep.b_scan);
        ensure!(rep.s_of_b < rep.s && rep.parent_not_total, "instance {i}: b is not minimal");
        ensure!(rep.verdict != Verdict::Violation, "instance {i} violates the border bound");
    }
    for (x, rep) in &reports.total_prefix {
        ensure!(rep.q_bound_holds, "Q(x) bound fails for {x}");
    }
    Ok(format!("{families} covering families, {} border instances", reports.border.len()))
}

fn reports(workers: usize) -> Result<Vec<(&'static str, Vec<u8>)>, String> {
    let w = Some(workers);
    let e = |e: qnc_core::Error| e.to_string();
    let slack = SlackTable::frozen();
    let mut out = Vec::new();
    let snap = enumerate_universe(MachineConfig::default(), &[], &[], w).map_err(e)?;
    let mut text = Vec::new();
    snap.write_text(&mut text).map_err(e)?;
    out.push(("universe", text));
    let mut text = Vec::new();
    left_totalize(&snap).snapshot().write_text(&mut text).map_err(e)?;
    out.push(("left-total", text));
    out.push(("halting", HaltingApprox::from_snapshot(&snap).to_text().into_bytes()));
    let lab = QuantumLab::build(w).map_err(e)?;
    out.push(("catalog", lab.catalog.to_text().into_bytes()));
    let mut states = population(&lab.catalog);
    let rows = entropy_rows(&states, &lab.catalog, w).map_err(e)?;
    out.push(("entropy", entropy_json(&rows, &slack.chain()).to_string().into_bytes()));
    states.push(("exotic".into(), lab.exotic.clone()));
    out.push(("transmit", gap_csv(&gap_rows(&states, &lab, &slack.gap(), w).map_err(e)?).into_bytes()));
    let stats = AlgstatsLab::build(w).map_err(e)?;
    let reps = stats
        .run(slack.selection(), slack.border(), slack.total_prefix(), w)
        .map_err(e)?;
    out.push(("algstats", reps.to_json(&stats.instances).to_string().into_bytes()));
    Ok(out)
}

fn determinism() -> Check {
    let first = reports(1)?;
    let again = reports(1)?;
    let wide = reports(4)?;
    for ((name, a), ((_, b), (_, c))) in first.iter().zip(again.iter().zip(&wide)) {
        ensure!(a == b, "{name} differs between runs");
        ensure!(a == c, "{name} differs between 1 and 4 workers");
    }
    Ok(format!("{} reports", first.len()))
}

fn main() -> ExitCode {
    let slack = SlackTable::frozen();
    let quantum = QuantumLab::build(None);
    let stats = AlgstatsLab::build(None);
    let (quantum, stats) = match (quantum, stats) {
        (Ok(q), Ok(s)) => (q, s),
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL lab construction: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Check + '_>)> = vec![
        ("1 codec suite", 10, Box::new(codec_suite)),
        ("2 machine suite", 120, Box::new(|| machine_suite(slack.get("c_machine")))),
        ("3 left-total transform", 30, Box::new(|| left_total_suite(&stats))),
        ("4 quantum suite", 180, Box::new(|| quantum_suite(&quantum, slack.get("c_dominance")))),
        ("5 entropy chain", 300, Box::new(|| entropy_chain(&quantum, &slack))),
        ("6 transmission gap", 300, Box::new(|| transmission_gap(&quantum, &slack))),
        ("7 statistics harnesses", 300, Box::new(|| statistics_harnesses(&stats, &slack))),
        ("8 determinism", 600, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, limit, check) in &criteria {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        let line = match outcome {
            Ok(note) if secs <= *limit as f64 => format!("PASS {name} ({secs:.1}s / {limit}s): {note}"),
            Ok(note) => format!("FAIL {name} ({secs:.1}s / {limit}s over time): {note}"),
            Err(why) => format!("FAIL {name} ({secs:.1}s / {limit}s): {why}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
