//! Constant-mean-curvature surfaces in hyperbolic 3-space.
//!
//! The crate computes minimizers of `I_H = A + 2·H·V` over triangulated
//! surfaces in the Poincaré ball that are asymptotic to a star-shaped ideal
//! curve, sweeps `H` across `(-1, 1)`, and checks that the resulting leaves
//! behave like a foliation: disjoint, ordered, gap-free and confined to their
//! shifted convex hulls. Closed-form leaves (equidistant caps for round
//! circles, constant-curvature arcs in the hyperbolic plane) serve as ground
//! truth.
//!
//! Everything here is pure computation on `alloc` collections; file formats,
//! configuration and the command line live in the companion `hyperleaf`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod error;
pub mod geometry;
pub mod math;
pub mod mesh;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use math::Vec3;
