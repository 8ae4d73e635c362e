//! Numerical toolkit for the Heisenberg group ℍⁿ and geometric Hardy
//! inequalities for the sub-elliptic gradient on half-spaces and convex
//! polytopes.
//!
//! The crate is `no_std` (with `alloc`). Enable `std` for `std::error::Error`
//! integration, `parallel` for rayon-backed integration and multi-starts, and
//! `serde` for (de)serializable reports and geometry.
//!
//! Layout:
//! - [`heis`]: points, group law, dilations, the left-invariant frame, scalar
//!   fields and the horizontal gradient.
//! - [`metrics`]: Kaplan gauge/distance and a direct-transcription solver for
//!   the Carnot–Carathéodory distance.
//! - [`domains`]: half-spaces, polytopes, the nearest-facet partition and the
//!   Hardy weights.
//! - [`fields`] and [`quadrature`]: concrete test functions and integration.
//! - [`hardy`]: both sides of the inequalities and the algebraic lemmas.
//! - [`sharpness`]: trial-function sweeps towards the sharp constants.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod domains;
pub mod fields;
pub mod hardy;
pub mod heis;
pub mod linalg;
pub mod metrics;
mod parallel;
pub mod quadrature;
pub mod sharpness;

pub use domains::{Domain, HalfSpace, Polytope, WeightAggregation, WeightSpec};
pub use hardy::{HardyError, QuotientReport};
pub use metrics::{CCResult, SolverConfig};
pub use heis::{AxisBox, HeisError, HorizontalVector, Point, ScalarField};
pub use quadrature::{IntegralValue, QuadratureError, QuadratureSpec, Rule};
