//! Orienteering with time windows on restricted graph classes.
//!
//! Solvers for directed paths, directed cycles, dynamic (interval-active)
//! paths, trees and bounded-treewidth graphs, an exhaustive oracle for
//! cross-checking them, and generators for random and reduction instances.

pub mod cycle;
pub mod dynamic;
pub mod envelope;
pub mod error;
pub mod generators;
pub mod model;
pub mod oracle;
pub mod path;
pub mod tree;
pub mod treewidth;

pub use error::{Result, SolveError};
pub use model::{
    validate_instance, validate_walk, EdgeSpec, Instance, Solution, TimeWindow, Topology,
    VertexSpec, Walk, WalkReport,
};
