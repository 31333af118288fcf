//! Finite elements for parabolic Neumann problems on smooth planar domains.
//!
//! The smooth domain `Omega` is replaced by an inscribed polygon `Omega_h`
//! whose boundary vertices lie on the curve. The crate provides the geometry
//! of the curve, a quality mesher that respects that constraint, `P1`–`P3`
//! Lagrange spaces, time stepping and spectral evaluation of the discrete
//! semigroup, regularized Green's functions, and configurable experiment
//! drivers that measure convergence rates and boundary-skin effects.

pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod greens;
pub mod mesh;
pub mod parabolic;

pub use error::{Error, Result};

/// Planar point / vector type used throughout.
pub type Vec2 = nalgebra::Vector2<f64>;
