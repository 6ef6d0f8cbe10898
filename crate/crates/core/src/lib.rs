//! Algorithmic information laboratory: self-delimiting codes, a concrete
//! prefix-free reference machine with bounded enumeration, exact-arithmetic
//! quantum states, entropy estimators, the two-channel transmission game and
//! algorithmic statistics harnesses.

pub mod algstats;
pub mod bits;
pub mod codec;
pub mod entropy;
pub mod error;
pub mod lab;
pub mod machine;
pub mod numeric;
pub mod protocol;
pub mod quantum;
pub mod slack;

pub use bits::BitString;
pub use codec::{PrimitiveMap, PrimitiveMeasure, Rational};
pub use error::{Error, Result};
pub use numeric::NegLog;
pub use slack::SlackTable;
