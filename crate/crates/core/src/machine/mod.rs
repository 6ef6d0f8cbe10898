//! The reference machine, its bounded enumeration and the estimators read
//! off a snapshot.

pub mod estimate;
pub mod interp;
pub mod lefttotal;
pub mod program;
pub mod universe;

pub use estimate::{
    coding_lemma_holds, coding_slack, combined_aux, info_with_halting, k_hat, m_hat, mutual_info,
    shortest_program, ComplexityValue,
};
pub use interp::{run, run_program, Outcome, MAX_QUBITS};
pub use lefttotal::{is_total, left_totalize, m_b, omega_expansion, LeftTotalSnapshot, MassLine, Slot};
pub use program::{CircOp, ParseStatus, Program, Xform, MAX_DEPTH};
pub use universe::{
    enumerate_programs, enumerate_universe, HaltingApprox, MachineConfig, OutputStats, Record,
    UniverseSnapshot, MACHINE_VERSION,
};
