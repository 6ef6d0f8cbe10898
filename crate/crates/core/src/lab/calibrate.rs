//! Measures the slack constants on the standard universes.

use crate::error::Result;
use crate::machine::{coding_slack, enumerate_universe, MachineConfig};
use crate::numeric::{required_additive_slack, NegLog};
use crate::slack::SlackTable;

use super::quantum::{dominance_table, entropy_rows, gap_rows, population, QuantumLab};
use super::stats::AlgstatsLab;

pub struct Calibration {
    pub table: SlackTable,
    /// Entries with no finite witness, left at their previous value.
    pub unmeasured: Vec<String>,
}

fn fold_max(acc: &mut Option<i64>, v: Option<i64>) {
    if let Some(v) = v {
        *acc = Some(acc.map_or(v, |a| a.max(v)));
    }
}

/// Starts from `base` (fixed coefficients and thresholds are kept) and
/// replaces each additive constant with the smallest value that holds on
/// every measured instance.
pub fn calibrate(base: &SlackTable, workers: Option<usize>) -> Result<Calibration> {
    let mut table = base.clone();
    let mut measured: Vec<(&str, Option<i64>)> = Vec::new();

    let default = enumerate_universe(MachineConfig::default(), &[], &[], workers)?;
    let lab = QuantumLab::build(workers)?;
    let stats = AlgstatsLab::build(workers)?;
    let mut c_machine = None;
    for snap in [&default, &lab.snapshot, &stats.snapshot] {
        fold_max(&mut c_machine, coding_slack(snap, 0));
    }
    measured.push(("c_machine", c_machine));

    let k = base.chain();
    let states = population(&lab.catalog);
    let rows = entropy_rows(&states, &lab.catalog, workers)?;
    let (mut c1, mut c2, mut c4) = (None, None, None);
    for (_, r) in &rows {
        fold_max(&mut c1, required_additive_slack(&r.hg, &r.hv.value, 0));
        fold_max(&mut c2, required_additive_slack(&r.hg, &r.hc.value, 0));
        fold_max(&mut c4, required_additive_slack(&r.hc.value, &r.hv.value, k.c3));
    }
    measured.push(("c1", c1));
    measured.push(("c2", c2));
    measured.push(("c4", c4));
    let mut dominance = None;
    for c in dominance_table(&lab.catalog, workers)? {
        fold_max(&mut dominance, c);
    }
    measured.push(("c_dominance", dominance));

    let g = base.gap();
    let mut gap_states = states;
    gap_states.push(("exotic".into(), lab.exotic.clone()));
    let mut c6 = None;
    for r in gap_rows(&gap_states, &lab, &g, workers)?.iter().filter(|r| !r.flagged) {
        fold_max(&mut c6, required_additive_slack(&r.classical.total(), &r.mixed.total(), g.c5));
    }
    measured.push(("c6", c6));

    let reports = stats.run(base.selection(), base.border(), base.total_prefix(), workers)?;
    let mut selection = None;
    for r in &reports.selection {
        if let (Some((l, _)), Some(rhs)) = (r.lhs, &r.rhs) {
            fold_max(&mut selection, required_additive_slack(&NegLog::bits(l), rhs, base.selection().c_log));
        }
    }
    measured.push(("selection_c_add", selection));
    let mut border = None;
    for r in &reports.border {
        if let Some((l, _)) = r.lhs {
            let rhs = NegLog::of(r.sum.clone()).plus_bits(r.info.unwrap_or(0).max(0));
            fold_max(&mut border, required_additive_slack(&NegLog::bits(l), &rhs, base.border().c_log));
        }
    }
    measured.push(("border_c_add", border));
    let mut total_prefix = None;
    for (_, r) in &reports.total_prefix {
        if let Some(i) = r.info {
            fold_max(
                &mut total_prefix,
                required_additive_slack(&NegLog::bits(r.ks_bound), &NegLog::bits(i.max(0)), base.total_prefix().c_log),
            );
        }
    }
    measured.push(("total_prefix_c_add", total_prefix));

    let mut unmeasured = Vec::new();
    for (name, v) in measured {
        match v {
            Some(v) => table.set(name, v),
            None => unmeasured.push(name.to_string()),
        }
    }
    Ok(Calibration { table, unmeasured })
}
