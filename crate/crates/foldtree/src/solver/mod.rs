//! Folded Morse flow trees as boundary value problems.
//!
//! Each strand of the cover is parametrized away from v₀. A strand with
//! sheet labels (h_l, h_r) over an edge with region labels (i_l, i_r)
//! follows ∇(f_{i_l,h_l} − f_{i_r,h_r}) in that direction, which is the
//! field ∇(f_{i_r,h_r} − f_{i_l,h_l}) traversed toward v₀. Positions are
//! shot outward from seeds at the strands over the vertex next to v₀.

mod collapse;
mod flow;
pub mod linalg;
mod moduli;
mod problem;
mod verify;

pub use collapse::{linearized_collapse, CollapseEdge, CollapseGraph, CollapseResult};
pub use flow::{affine_flow, exp_flow, flow_jet, FlowJet};
pub use moduli::{assemble, dimension, rigid_trees, solve_moduli, solve_tree, Found, ModuliResult, SolverConfig, TreeOutcome};
pub use problem::{FlowTreeProblem, Layout, Shot, Tolerances};
pub use verify::{action_deficit, c0_bound_check, sample_trajectories, Trajectory};
