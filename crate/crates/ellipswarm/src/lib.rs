//! Quadratically constrained quadratic programs solved by a modified
//! particle swarm, and a linear classifier built on top of the solver.
//!
//! The swarm explores ellipsoidal feasible regions directly: every particle
//! starts inside its region and position updates that would leave it are
//! rejected, so no penalty terms or projections are needed. Three problem
//! shapes are covered: nearest point on an ellipsoid to an outside target,
//! shortest path between two disjoint ellipsoids (one swarm in each), and
//! linear objectives over an ellipsoid. Two deterministic baselines (a
//! central-cut ellipsoid method and a damped interior ascent) provide
//! reference traces for the linear case.
//!
//! The classifier fits one ellipsoid per class from sample means and
//! covariances, connects pairs of classes by the shortest path between
//! their ellipsoids, and places the separating hyperplane through the
//! midpoint of that path.

pub mod baselines;
pub mod classifier;
pub mod data;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod pso;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::Ellipsoid;
pub use pso::PsoConfig;
pub use solver::{SolveResult, TracePoint};

