//! Simulation and analysis toolkit for swarm aggregation with a single
//! binary sight sensor.
//!
//! Each robot reads one bit: whether another robot lies in its line (or
//! cone) of sight. The bit selects one of two wheel-velocity pairs. This
//! crate provides:
//!
//! - [`geometry`]: enclosing disc, convex hull, dispersion, cluster fraction
//!   and the hexagonal-packing dispersion baseline.
//! - [`continuous`]: a disc-robot physics simulator with differential-drive
//!   kinematics, contact resolution, sensing error and motion noise, plus
//!   generators for deadlocked and symmetric starting configurations.
//! - [`cone`]: closed-form rotation bounds for a cone-of-sight sensor and a
//!   geometric/simulated verifier for them.
//! - [`discrete`]: the triangular-lattice variant with random sequential
//!   activation, error probability and deadlock perturbation.
//! - [`experiments`]: aggregation detection, parameter sweeps, CSV output and
//!   the command-line front end.
//!
//! Runs are deterministic for a given seed.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// per-robot loops index several parallel arrays
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cone;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod output;

pub use error::{Error, Result};
pub use geometry::{Disc, MetricsSample, Point2};
