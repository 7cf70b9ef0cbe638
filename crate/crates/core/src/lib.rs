//! Compact symmetric spaces built from Lie algebra data: curvature of
//! `G/H` from the bracket, products of two such spaces, pointwise bounds for
//! minimal submanifolds, Lie triple systems and Hopf-type fibrations.
//!
//! The background metric is `−B` with `B` the Killing form, and curvature is
//! `R_{X,Y}Z = −[[X,Y],Z]` on `m`.

pub mod campaign;
pub mod error;
pub mod json;
pub mod lie;
pub mod product;
pub mod sampling;
pub mod simons;
pub mod submersion;
pub mod symmetric;
pub mod tolerance;
pub mod triple;
pub use nalgebra;
