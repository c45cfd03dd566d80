//! Numerical solver and a-priori estimate certification for the second
//! boundary value problem of the special Lagrangian equation in the plane.
//!
//! Given uniformly convex domains `Ω` and `Ω̃`, find a uniformly convex
//! potential `u` and a constant `c` with
//!
//! ```text
//! F(D²u) = arctan λ₁ + arctan λ₂ = c   in Ω,
//! ∇u(Ω) = Ω̃.
//! ```
//!
//! The crate is organised as:
//!
//! * [`domain`] – convex domains, defining functions and sublevel families,
//! * [`slag`] – matrix algebra of the Lagrangian angle operator,
//! * [`grid`] – boundary fitted polar grids and finite differences on them,
//! * [`solver`] – residual, exact linearization, Newton and continuation,
//! * [`checks`] – runtime certification of the a-priori estimates,
//! * [`config`] – run configuration files.
//!
//! Data-parallel loops over grid nodes go through [`exec`], which uses rayon
//! when the `parallel` feature is enabled and falls back to plain iteration
//! otherwise.

// `!(x > 0.0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod domain;
mod error;
pub mod exec;
pub mod geometry;
pub mod grid;
pub mod slag;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Mat2, Vec2};
pub use slag::SymMatrix2;
