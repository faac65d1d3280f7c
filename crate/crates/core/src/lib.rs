//! Exact combinatorics of simple closed curves on punctured surfaces.
//!
//! Curves are normal coordinates on a fixed ideal triangulation. On top of that sit
//! geometric intersection numbers, cut-surface bookkeeping, the goodness predicates on
//! curve-complex simplices, curve-graph spheres, subsurface projection and the
//! constructive surgery procedures on labelled disks.

pub mod classify;
pub mod complex;
pub mod construct;
pub mod cut;
pub mod error;
pub mod intersection;
pub mod normal;
pub mod projection;
pub mod surface;
pub mod surgery;

pub use error::{CoreError, Result};
