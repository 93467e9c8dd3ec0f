//! Numerical toolkit for nonlocal elliptic problems with gradient constraints.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: convex bodies in one and two dimensions, their gauges,
//!   support functions, polars, derivatives and smooth strictly convex
//!   approximations.
//! - [`domain`]: the open set `U`, its boundary parametrisation and the
//!   exterior data `φ`.
//! - [`obstacle`]: the gauge-distance obstacles `ρ`, `ρ̄`, their first and
//!   second derivatives, ridge detection and exterior-ball barriers.
//! - [`grid`] and [`operator`]: grid fields and monotone quadratures of the
//!   fractional Laplacian and the extremal (Pucci) operators.
//! - [`solver`] and [`sweep`]: the discrete double obstacle and gradient
//!   constraint problems, and the smoothing sweep over approximating bodies.
//! - [`diagnostics`]: coincidence sets, Hölder quotients and the aggregated
//!   verification suite.
//! - [`config`] and [`run`]: the TOML run configuration and the subcommand
//!   driver used by the `nlgc` binary.

pub mod config;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod obstacle;
pub mod operator;
pub mod run;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};

pub type Point = nalgebra::Vector2<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Library version string, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn outer(a: &Point, b: &Point) -> Mat2 {
    a * b.transpose()
}
