//! Numerical laboratory for harmonic functions on minimal disks.
//!
//! The crate builds triangulated patches of closed-form conformal minimal
//! immersions ([`surfaces`], [`mesh`]), solves discrete Dirichlet problems
//! and extracts level sets on extrinsic ball components ([`harmonic`]), and
//! measures oscillation decay, growth rates and the related constants
//! ([`analysis`]).

// `!(x > 0.0)` is used throughout so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fit;
pub mod harmonic;
pub mod mesh;
pub mod rng;
pub mod surfaces;

pub use error::{Error, Result};
pub use mesh::{triangulate, BallComponent, SurfaceMesh};
pub use surfaces::{ImmersionSpec, SurfaceKind, Vec3};
