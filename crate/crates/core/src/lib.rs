//! Directed multiflow min-max theory at desk scale.
//!
//! Exact-rational tools for directed terminal weights: metric predicates,
//! tight-span geometry, tree realizations, and maximum multiflow solvers.

pub mod classify;
pub mod cli;
pub mod distances;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod network;
pub mod rational;
pub mod solvers;

pub use classify::{IntervalRepresentation, OrientedTreeRealization};
pub use distances::{DirectedDistance, LaminarDecomposition, PartialCut};
pub use error::{Error, Result};
pub use geometry::{LabeledPoint, PointClassification, TightnessGraph};
pub use network::Network;
pub use rational::Rational;
pub use solvers::{Multiflow, SolveReport};
