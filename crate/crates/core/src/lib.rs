//! Analytic global placement of standard-cell netlists.
//!
//! Cells are treated as positive charges; the density map is equalized by
//! solving a Neumann Poisson problem with fast cosine/sine transforms, and
//! the placer minimizes smoothed wirelength plus a penalized potential
//! energy with nonlinear conjugate gradient.
//!
//! The full flow (initial placement, filler insertion, global placement,
//! legalization, detailed improvement) is driven by [`flow::run`].

// Grid and matrix kernels index several arrays in lockstep.
#![allow(clippy::needless_range_loop)]

pub mod density;
pub mod engine;
pub mod error;
pub mod figures;
pub mod flow;
pub mod grid;
pub mod initial;
pub mod legalize;
pub mod model;
pub mod poisson;
pub mod wirelength;

pub use error::{PlaceError, Result};
