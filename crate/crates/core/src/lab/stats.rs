//! Selection-bound laboratory: seeded `(f, m)` instances, a universe with
//! planted literals and the needed auxiliary strings probed, and the three
//! harness batches.

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::algstats::{
    border_harness, condition_on_heavy_maps, family_expectation, measure_over_maps, sample_family, CoveringOutcome, selection_harness, total_prefix_harness, BorderReport, LogSlack,
    SelectionReport, TotalPrefixReport, Verdict,
};
use crate::bits::BitString;
use crate::codec::{pair_with_tail, xi_index_to_string_u64, PrimitiveMap, PrimitiveMeasure, Rational};
use crate::error::Result;
use crate::machine::{
    combined_aux, enumerate_universe, left_totalize, HaltingApprox, LeftTotalSnapshot, MachineConfig, Program,
    UniverseSnapshot,
};

pub const STATS_CONFIG: MachineConfig = MachineConfig { lmax: 10, steps: 10_000 };
pub const INSTANCES: usize = 20;
/// Largest `c` of the covering sweep.
pub const MAX_C: u64 = 8;
const INSTANCE_SEED: u64 = 5;
/// Points are `0 … POINTS-1`.
const POINTS: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsInstance {
    pub f: PrimitiveMap,
    pub m: PrimitiveMeasure,
    /// Measure over maps that explains `f` given `m`.
    pub q: PrimitiveMeasure,
}

impl StatsInstance {
    pub fn measure_program(&self) -> BitString {
        Program::lit(&self.q.encode()).encode()
    }
}

fn random_map<R: Rng>(rng: &mut R, points: &[u64], top: u64) -> Result<PrimitiveMap> {
    PrimitiveMap::from_pairs(points.iter().map(|&a| (a, rng.gen_range(0..=top))))
}

/// `m` on 2 to 6 points with weights in `1..=4`; `f` on the support of `m`
/// with values at most 2, plus one point outside it; two alternative maps.
pub fn stats_instances(count: usize) -> Result<Vec<StatsInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut points: Vec<u64> = (0..POINTS).collect();
        points.shuffle(&mut rng);
        let k = rng.gen_range(2..=6);
        let mut support = points[..k].to_vec();
        support.sort_unstable();
        let weights: Vec<u64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
        let total: u64 = weights.iter().sum();
        let m = PrimitiveMeasure::from_pairs(
            support
                .iter()
                .zip(&weights)
                .map(|(&a, &w)| (BigUint::from(a), Rational::new(w.into(), total.into()))),
        )?;
        let mut dom = support.clone();
        dom.push(points[k]);
        let f = random_map(&mut rng, &dom, 2)?;
        let g1 = random_map(&mut rng, &support, 3)?;
        let g2 = random_map(&mut rng, &support, 3)?;
        if g1 == f || g2 == f || g1 == g2 {
            continue;
        }
        let half = Rational::new(1.into(), 2.into());
        let quarter = Rational::new(1.into(), 4.into());
        let q = measure_over_maps(&[(f.clone(), half), (g1, quarter.clone()), (g2, quarter)])?;
        out.push(StatsInstance { f, m, q });
    }
    Ok(out)
}

pub struct AlgstatsLab {
    pub snapshot: UniverseSnapshot,
    pub left_total: LeftTotalSnapshot,
    pub halting: HaltingApprox,
    pub instances: Vec<StatsInstance>,
}

impl AlgstatsLab {
    /// Plants `ξ_a` for every point, `⟨f⟩` and `⟨Q⟩` per instance; probes
    /// `⟨⟩Ĥ`, `⟨m⟩` and `⟨v⟩⟨m⟩` for each measure program `v`.
    pub fn build(workers: Option<usize>) -> Result<Self> {
        let instances = stats_instances(INSTANCES)?;
        let mut plants: Vec<BitString> = (0..POINTS)
            .map(|a| Program::lit(&xi_index_to_string_u64(a)).encode())
            .collect();
        for inst in &instances {
            plants.push(Program::lit(&inst.f.encode()).encode());
            plants.push(inst.measure_program());
        }
        plants.sort_by(|a, b| a.xi_cmp(b));
        plants.dedup();
        let stage_a = enumerate_universe(STATS_CONFIG, &[], &plants, workers)?;
        let halting = HaltingApprox::from_snapshot(&stage_a);
        let mut auxes = vec![combined_aux(&BitString::new(), &halting)];
        for inst in &instances {
            let m = inst.m.encode();
            auxes.push(pair_with_tail(&inst.measure_program(), &m));
            auxes.push(m);
        }
        auxes.sort_by(|a, b| a.xi_cmp(b));
        auxes.dedup();
        let snapshot = enumerate_universe(STATS_CONFIG, &auxes, &plants, workers)?;
        Ok(Self {
            left_total: left_totalize(&snapshot),
            snapshot,
            halting,
            instances,
        })
    }

    /// Strings the total-prefix harness is run on: every `ξ_a` and `⟨f⟩`.
    pub fn total_prefix_targets(&self) -> Vec<BitString> {
        let mut xs: Vec<BitString> = (0..POINTS).map(xi_index_to_string_u64).collect();
        xs.extend(self.instances.iter().map(|i| i.f.encode()));
        xs.sort_by(|a, b| a.xi_cmp(b));
        xs.dedup();
        xs
    }

    pub fn run(
        &self,
        selection: LogSlack,
        border: LogSlack,
        total_prefix: LogSlack,
        workers: Option<usize>,
    ) -> Result<StatsReports> {
        super::in_pool(workers, || -> Result<StatsReports> {
            let selection = self
                .instances
                .par_iter()
                .map(|i| selection_harness(&i.f, &i.m, &self.snapshot, selection, MAX_C))
                .collect::<Result<Vec<_>>>()?;
            let border = self
                .instances
                .par_iter()
                .map(|i| border_harness(&i.f, &self.left_total, &self.halting, border))
                .collect::<Result<Vec<_>>>()?;
            let total_prefix = self
                .total_prefix_targets()
                .par_iter()
                .map(|x| Ok((x.clone(), total_prefix_harness(x, &self.left_total, &self.halting, total_prefix)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(StatsReports {
                selection,
                border,
                total_prefix,
            })
        })?
    }
}

pub struct StatsReports {
    pub selection: Vec<SelectionReport>,
    pub border: Vec<BorderReport>,
    pub total_prefix: Vec<(BitString, TotalPrefixReport)>,
}

impl StatsReports {
    pub fn to_json(&self, instances: &[StatsInstance]) -> serde_json::Value {
        json!({
            "selection": self.selection.iter().zip(instances).map(|(r, i)| json!({
                "f": i.f.encode().to_string(),
                "m": i.m.encode().to_string(),
                "report": r.to_json(),
            })).collect::<Vec<_>>(),
            "border": self.border.iter().map(BorderReport::to_json).collect::<Vec<_>>(),
            "total_prefix": self.total_prefix.iter().map(|(x, r)| json!({
                "x": x.to_string(),
                "report": r.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Hard failures: violations, ledger breaks, uncertified families,
    /// disagreeing routes or a broken `Q(x)` bound.
    pub fn hard_failures(&self) -> usize {
        let selection = self
            .selection
            .iter()
            .filter(|r| {
                r.verdict == Verdict::Violation
                    || !r.sum_at_least
                    || !r.truncated_at_least
                    || !r.families_certified()
                    || r.covering.iter().any(|(_, o)| *o == CoveringOutcome::NotFound)
            })
            .count();
        let border = self
            .border
            .iter()
            .filter(|r| r.verdict == Verdict::Violation || !r.routes_agree())
            .count();
        let total_prefix = self
            .total_prefix
            .iter()
            .filter(|(_, r)| r.verdict == Verdict::Violation || !r.q_bound_holds)
            .count();
        selection + border + total_prefix
    }
}

/// How many of `draws` random families, drawn with the first swept `c`,
/// meet the expectation bound; `None` without a found family.
pub fn monte_carlo_hits<R: rand::Rng>(
    inst: &StatsInstance,
    report: &SelectionReport,
    rng: &mut R,
    draws: usize,
) -> Result<Option<usize>> {
    let Some(family) = report.covering.iter().find_map(|(_, o)| match o {
        CoveringOutcome::Found { family, .. } => Some(family),
        _ => None,
    }) else {
        return Ok(None);
    };
    let q = condition_on_heavy_maps(&inst.q, &inst.m, report.s)?;
    let mut hits = 0;
    for _ in 0..draws {
        let sets = sample_family(rng, &inst.m, family.s, family.c, family.d)?;
        if crate::numeric::le_exp_neg(&family_expectation(&q, &inst.m, &sets)?, family.c * family.d) {
            hits += 1;
        }
    }
    Ok(Some(hits))
}
