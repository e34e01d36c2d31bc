//! Benchmarking toolkit for community detection.
//!
//! The crate generates community-structured benchmark networks with a
//! modified LFR model (half the nodes fully embedded in their community,
//! the other half with normally distributed mixing), runs a set of
//! community detection algorithms on them and evaluates the estimated
//! partitions two ways: with partition-comparison scores (FCC, RI, ARI,
//! NMI) and with community-level topological curves (size distribution,
//! embeddedness, scaled density, internal transitivity, average distance,
//! hub dominance).

pub mod detection;
pub mod generator;
pub mod graph;
pub mod harness;
pub mod io;
pub mod measures;
pub mod partition;
pub mod topology;

pub use graph::{Graph, GraphError, WeightedAggregate};
pub use measures::PartitionScores;
pub use partition::Partition;
