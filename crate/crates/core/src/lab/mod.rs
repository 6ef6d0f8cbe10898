//! Standard universes with planted programs, test populations, calibration
//! and reports.

mod calibrate;
mod quantum;
mod stats;

pub use calibrate::{calibrate, Calibration};
pub use quantum::{
    dominance_table, entropy_json, entropy_rows, exotic_program, gap_csv, gap_rows, population, quantum_plants, read_states,
    write_states,
    QuantumLab, EXOTIC_BITS, LAB_QUBITS, QUANTUM_CONFIG,
};
pub use stats::{
    monte_carlo_hits, stats_instances, AlgstatsLab, StatsInstance, StatsReports, INSTANCES, MAX_C, STATS_CONFIG,
};

use crate::error::{Error, Result};

/// Runs `job` on a pool of `workers` threads, or on the global pool.
pub(crate) fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| Error::Config(e.to_string())),
    }
}
