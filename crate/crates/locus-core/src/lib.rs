//! locus-core: construction and certification of locally recoverable
//! erasure codes built from cyclic structure.
//!
//! The toolkit builds three code families from declarative parameters —
//! hierarchical LRC cyclic codes (including an unbounded-length variant),
//! tailbiting convolutional codes with row locality derived from quasicyclic
//! block codes, and bicyclic codes with availability two — and certifies the
//! claimed parameters (dimension, distance bounds, locality, optimality)
//! with independent brute-force oracles at desk scale.

pub mod bicyclic;
pub mod conv;
pub mod cyclic;
pub mod error;
pub mod field;
pub mod hlrc;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
