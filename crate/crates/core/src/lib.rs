//! Isochrone queries on road networks.
//!
//! An isochrone for source `s` and time limit `tau` is reported as the set of
//! directed edges with exactly one endpoint within distance `tau` of `s`.
//! The crate provides the plain Dijkstra baseline, two multilevel-overlay
//! engines (isoCRP, isoGRASP) and three contraction-based engines
//! (isoPHAST-CD, -CP, -DT), all returning identical edge sets.

pub mod ch;
pub mod coords;
pub mod dijkstra;
pub mod dimacs;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod heap;
pub mod isochrone;
pub mod isophast;
pub mod mld;
pub mod partition;
pub mod permutation;
pub mod scratch;
pub mod synth;
pub mod weight;
pub mod workload;

pub use coords::Coordinates;
pub use error::{Error, Result};
pub use graph::Graph;
pub use isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
pub use permutation::Permutation;
pub use weight::Weight;

/// Travel time in seconds.
pub type Dist = u32;
/// Road graph with second-resolution travel times.
pub type RoadGraph = Graph<Dist>;
