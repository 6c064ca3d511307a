//! Sampling-based motion planning for rigid bodies whose configuration
//! spaces carry finite symmetry groups.
//!
//! The crate provides:
//!
//! - [`geometry`]: closed-form Riemannian primitives (distance, geodesics,
//!   samplers) on SO(2), SO(3), SE(2), SE(3) and finite products of these;
//! - [`symmetry`]: construction and verification of the finite rotation
//!   groups that describe body symmetries, and their action on configurations;
//! - [`quotient`]: the planning primitives on the quotient of configuration
//!   space by a symmetry group, the directed roadmap, and path lifting;
//! - [`collision`]: convex collision checking in 2D and 3D;
//! - [`worldgen`]: seeded random worlds and feasible start/goal problems;
//! - [`planners`]: RRT, BiRRT, RRT*, and PRM* over either the quotient space
//!   or the base space (the symmetry-unaware baseline is the trivial-group
//!   instantiation of the same code path);
//! - [`bounds`]: closed-form sample-complexity bound evaluators and
//!   Monte-Carlo verification of the geometric facts they rely on.

pub mod bounds;
pub mod collision;
pub mod error;
pub mod geometry;
pub mod planners;
pub mod quotient;
pub mod symmetry;
pub mod worldgen;

pub use error::{Error, Result};
