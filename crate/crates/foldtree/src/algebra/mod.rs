//! Symmetric groups, truncated F₂[ħ]-series and the Hecke algebra H_κ.

mod hecke;
mod perm;
mod series;

pub use hecke::{verify_relations, HeckeElement, RelationReport};
pub use perm::Permutation;
pub use series::{HbarSeries, MAX_TRUNCATION};
