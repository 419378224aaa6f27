//! Folded ribbon trees (T, σ, l).
//!
//! Edges point toward the root v₀. At an internal vertex the cyclic order
//! starts with the outgoing edge and then lists the incoming edges in the
//! opposite sense to the one in which the boundary walk from v₀ meets the
//! stem leaves v₁,…,v_m. With children c₁,…,c_k in walk order the order is
//! therefore (parent, c_k, …, c₁), and the vertex rule
//! σ(e_{v,0}) = σ(e_{v,|v|−1})⋯σ(e_{v,1}) reads σ(parent) = σ(c₁)⋯σ(c_k).

mod enumerate;
mod shape;
mod tree;
mod validate;

pub use enumerate::{enumerate, EnumerateOptions, Enumerator};
pub use shape::{LeafKind, Shape};
pub use tree::{Edge, EdgeClass, FoldedRibbonTree, Labels, Topology, VertexKind};
pub use validate::{Clause, ValidationReport, Violation};
