//! Deficiency of randomness, stochasticity, covering families and the
//! selection harnesses.

mod covering;
mod harness;
mod stochastic;

pub use covering::{
    family_expectation, family_hits, key_of_map, level_size, map_of_key, sample_family, search_covering_family,
    CoveringFamily, MAX_LEVEL, MAX_SUPPORT,
};
pub use harness::{
    border_harness, condition_on_heavy_maps, measure_over_maps, selection_harness, total_prefix_harness,
    BorderReport, CoveringOutcome, LogSlack, SelectionReport, TotalPrefixReport, Verdict, SCAN_CAP,
};
pub use stochastic::{
    candidate_aux, deficiency, key_of, stochasticity, DeficiencyValue, Penalty, StochasticityCertificate,
};
