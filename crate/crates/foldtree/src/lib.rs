//! Folded Morse flow trees on κ-fold symmetric products of the plane.
//!
//! The crate enumerates permutation-decorated folded ribbon trees, builds
//! their branched covers, solves the flow-tree boundary value problems by
//! Newton shooting and assembles the resulting composition maps over
//! F₂[ħ]/(ħ^{N+1}). For wrapped-fiber data the endomorphism algebra comes
//! out as the Hecke algebra H_κ.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod ainfty;
pub mod algebra;
pub mod cover;
mod error;
pub mod geom;
pub mod morse;
pub mod solver;
pub mod trees;

pub use error::Error;
