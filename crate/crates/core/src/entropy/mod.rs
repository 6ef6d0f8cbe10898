//! Entropy estimators over a cataloged universe of primitive states and
//! circuits, and the `Enc` stream.

mod catalog;
mod enc;
mod estimators;

pub use catalog::{CatalogCircuit, CatalogState, StateCatalog};
pub use enc::{state_info_with_halting, transform_enc, EncStream, EncTuple, RationalOrder};
pub use estimators::{
    circuit_density, dominance_constant, hc, hc_term, hg, hg_via_mu, hv, hv_term, ChainConstants, ChainViolations,
    EntropyReport, EntropyRow, HcValue, HvValue,
};
