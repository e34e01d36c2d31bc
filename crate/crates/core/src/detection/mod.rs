//! Community detection algorithms. Every algorithm returns a full cover of
//! the node set and is deterministic for a given graph and configuration.

mod dendrogram;
mod fast_greedy;
mod label_propagation;
mod louvain;
mod markov;
mod walktrap;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::io::{self, FormatError};
use crate::partition::Partition;

pub use dendrogram::{Dendrogram, Merge};
pub use fast_greedy::fast_greedy;
pub use label_propagation::{label_propagation, LabelPropagationOutcome};
pub use louvain::louvain;
pub use markov::{markov_cluster, MarkovOutcome};
pub use walktrap::{walktrap, walktrap_distance};

#[derive(Debug, Error)]
pub enum DetectionError {
    #[error("modularity is undefined on a graph without edges")]
    NoEdges,
    #[error("partition covers {partition} nodes but the graph has {graph}")]
    PartitionSize { partition: usize, graph: usize },
    #[error("invalid detection configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    FastGreedy,
    Louvain,
    Walktrap,
    LabelPropagation,
    MarkovCluster,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::FastGreedy,
        Algorithm::Louvain,
        Algorithm::Walktrap,
        Algorithm::LabelPropagation,
        Algorithm::MarkovCluster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FastGreedy => "fast_greedy",
            Algorithm::Louvain => "louvain",
            Algorithm::Walktrap => "walktrap",
            Algorithm::LabelPropagation => "label_propagation",
            Algorithm::MarkovCluster => "markov_cluster",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub walktrap_steps: usize,
    pub mcl_expansion: u32,
    pub mcl_inflation: f64,
    pub mcl_prune_threshold: f64,
    pub mcl_max_iterations: usize,
    pub lpa_max_sweeps: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Louvain,
            seed: 0,
            walktrap_steps: 4,
            mcl_expansion: 2,
            mcl_inflation: 2.0,
            mcl_prune_threshold: 1e-5,
            mcl_max_iterations: 100,
            lpa_max_sweeps: 100,
        }
    }
}

impl DetectionConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), DetectionError> {
        let fail = |m: &str| Err(DetectionError::InvalidConfig(m.to_string()));
        if self.walktrap_steps < 1 {
            return fail("walktrap steps must be at least 1");
        }
        if self.mcl_expansion < 2 {
            return fail("MCL expansion must be at least 2");
        }
        if !(self.mcl_inflation > 1.0) {
            return fail("MCL inflation must exceed 1");
        }
        if !(0.0..=0.01).contains(&self.mcl_prune_threshold) {
            return fail("MCL prune threshold must lie in [0, 0.01]");
        }
        if self.mcl_max_iterations == 0 || self.lpa_max_sweeps == 0 {
            return fail("iteration caps must be positive");
        }
        Ok(())
    }
}

/// Output of [`detect`] with the metadata worth persisting next to it.
#[derive(Debug, Clone)]
pub struct Detection {
    pub partition: Partition,
    /// `None` on an edgeless graph.
    pub modularity: Option<f64>,
    pub iterations: usize,
    /// False when an iteration cap was hit.
    pub converged: bool,
    pub dendrogram: Option<Dendrogram>,
}

pub fn detect(graph: &Graph, config: &DetectionConfig) -> Result<Detection, DetectionError> {
    config.validate()?;
    let (partition, iterations, converged, dendrogram) = match config.algorithm {
        Algorithm::FastGreedy => {
            let (p, d) = fast_greedy(graph);
            (p, d.len(), true, Some(d))
        }
        Algorithm::Louvain => {
            let (p, levels) = louvain::louvain_with_levels(graph, config.seed);
            (p, levels, true, None)
        }
        Algorithm::Walktrap => {
            let (p, d) = walktrap(graph, config.walktrap_steps);
            (p, d.len(), true, Some(d))
        }
        Algorithm::LabelPropagation => {
            let out = label_propagation(graph, config.seed, config.lpa_max_sweeps);
            (out.partition, out.sweeps, out.converged, None)
        }
        Algorithm::MarkovCluster => {
            let out = markov_cluster(graph, config);
            (out.partition, out.iterations, out.converged, None)
        }
    };
    Ok(Detection {
        modularity: modularity(graph, &partition).ok(),
        partition,
        iterations,
        converged,
        dendrogram,
    })
}

/// `Q = Σ_c [m_c / m - (d_c / 2m)^2]` with `m_c` the links inside `c` and
/// `d_c` its total degree.
pub fn modularity(graph: &Graph, partition: &Partition) -> Result<f64, DetectionError> {
    if partition.node_count() != graph.node_count() {
        return Err(DetectionError::PartitionSize {
            partition: partition.node_count(),
            graph: graph.node_count(),
        });
    }
    let m = graph.edge_count();
    if m == 0 {
        return Err(DetectionError::NoEdges);
    }
    let k = partition.community_count();
    let mut inside = vec![0usize; k];
    let mut degree = vec![0usize; k];
    for v in 0..graph.node_count() {
        degree[partition.community_of(v)] += graph.degree(v);
    }
    for (u, v) in graph.edges() {
        if partition.community_of(u) == partition.community_of(v) {
            inside[partition.community_of(u)] += 1;
        }
    }
    let m = m as f64;
    Ok((0..k)
        .map(|c| inside[c] as f64 / m - (degree[c] as f64 / (2.0 * m)).powi(2))
        .sum())
}

/// Reads a membership file produced by an external tool.
pub fn load_external_partition(
    path: impl AsRef<Path>,
    node_count: Option<usize>,
) -> Result<Partition, DetectionError> {
    Ok(io::load_external_partition(path.as_ref(), node_count)?)
}
