//! Exact-arithmetic pure states, unitaries, circuits and semi-density
//! matrices.

mod circuit;
mod complex;
pub mod generate;
mod matrix;
mod state;

pub use circuit::{best_input_overlap, pad_and_apply, synthesize_preparation, Circuit, OverlapWitness};
pub use complex::{parse_fraction, ComplexRational};
pub use matrix::{is_psd, mu_aggregate, psd_dominates, Matrix, PrimitiveUnitary, SemiDensityMatrix};
pub use state::{fidelity, PureState, StateKind, NORM_TOLERANCE_BITS};
