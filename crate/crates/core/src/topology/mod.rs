//! Community-level topological properties.
//!
//! Per node: embeddedness. Per community: size, scaled density, internal
//! transitivity, average distance and hub dominance. The [`binning`] module
//! turns per-community values into curves over logarithmic size bins and
//! [`powerlaw`] tests whether a size distribution follows a power law.

pub mod binning;
pub mod powerlaw;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::partition::Partition;

pub use binning::{bin_by_size, size_distribution, Bin, BinnedSeries, CommunityProperty};
pub use powerlaw::{fit_power_law, PowerLawError, PowerLawFit, PowerLawFitter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("partition covers {partition} nodes but the graph has {graph}")]
    PartitionSize { partition: usize, graph: usize },
    #[error("measure needs a community of at least {needed} nodes, got {size}")]
    CommunityTooSmall { size: usize, needed: usize },
    #[error("no community with at least two nodes to bin")]
    NothingToBin,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Logarithmic bins per decade of community size used by default.
pub const DEFAULT_BINS_PER_DECADE: usize = 5;
/// Equal-width bins of the embeddedness histogram.
pub const EMBEDDEDNESS_BINS: usize = 10;

fn check_cover(graph: &Graph, partition: &Partition) -> Result<(), TopologyError> {
    if graph.node_count() != partition.node_count() {
        return Err(TopologyError::PartitionSize {
            partition: partition.node_count(),
            graph: graph.node_count(),
        });
    }
    Ok(())
}

/// Internal/external split of one node's links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeEmbeddedness {
    pub node: usize,
    pub internal_degree: usize,
    pub external_degree: usize,
    /// `internal_degree / degree`.
    pub embeddedness: f64,
}

/// Embeddedness of every non-isolated node.
pub fn embeddedness(
    graph: &Graph,
    partition: &Partition,
) -> Result<Vec<NodeEmbeddedness>, TopologyError> {
    check_cover(graph, partition)?;
    Ok((0..graph.node_count())
        .filter(|&v| graph.degree(v) > 0)
        .map(|v| {
            let own = partition.community_of(v);
            let internal = graph
                .neighbors(v)
                .iter()
                .filter(|&&u| partition.community_of(u) == own)
                .count();
            let degree = graph.degree(v);
            NodeEmbeddedness {
                node: v,
                internal_degree: internal,
                external_degree: degree - internal,
                embeddedness: internal as f64 / degree as f64,
            }
        })
        .collect())
}

/// Histogram of embeddedness values over `bins` equal-width bins of
/// `[0, 1]` (the last bin is closed), plus exact counts at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddednessHistogram {
    pub counts: Vec<usize>,
    pub exactly_zero: usize,
    pub exactly_one: usize,
    pub total: usize,
}

impl EmbeddednessHistogram {
    pub fn new(values: &[NodeEmbeddedness], bins: usize) -> Self {
        let mut counts = vec![0; bins];
        let (mut zero, mut one) = (0, 0);
        for v in values {
            let e = v.embeddedness;
            let idx = ((e * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
            if v.internal_degree == 0 {
                zero += 1;
            }
            if v.external_degree == 0 {
                one += 1;
            }
        }
        Self {
            counts,
            exactly_zero: zero,
            exactly_one: one,
            total: values.len(),
        }
    }

    pub fn fraction_one(&self) -> f64 {
        self.exactly_one as f64 / self.total.max(1) as f64
    }

    pub fn fraction_zero(&self) -> f64 {
        self.exactly_zero as f64 / self.total.max(1) as f64
    }
}

/// Community cardinalities (in community id order).
pub fn community_sizes(partition: &Partition) -> Vec<usize> {
    partition.sizes()
}

/// How nodes with fewer than two internal neighbors enter the internal
/// transitivity average. Their local transitivity is undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitivityMode {
    /// They count as zero and stay in the denominator.
    #[default]
    ContributeZero,
    /// They are left out of the average.
    ExcludeLowDegree,
}

/// Mean over community members of `2 l(i) / (k_int (k_int - 1))`, with
/// `l(i)` the links among the internal neighbors of `i`.
pub fn internal_transitivity(
    graph: &Graph,
    community: &[usize],
    mode: TransitivityMode,
) -> Result<f64, TopologyError> {
    let (sub, _) = graph.induced_subgraph(community)?;
    Ok(transitivity_of(&sub, mode))
}

fn transitivity_of(sub: &Graph, mode: TransitivityMode) -> f64 {
    let n = sub.node_count();
    let mut mark = vec![false; n];
    let mut total = 0.0;
    let mut counted = 0usize;
    for v in 0..n {
        let k = sub.degree(v);
        if k < 2 {
            if mode == TransitivityMode::ContributeZero {
                counted += 1;
            }
            continue;
        }
        for &u in sub.neighbors(v) {
            mark[u] = true;
        }
        let mut links = 0usize;
        for &u in sub.neighbors(v) {
            links += sub
                .neighbors(u)
                .iter()
                .filter(|&&w| w > u && mark[w])
                .count();
        }
        for &u in sub.neighbors(v) {
            mark[u] = false;
        }
        total += 2.0 * links as f64 / (k * (k - 1)) as f64;
        counted += 1;
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

/// `2 m_C / (n_C - 1)`: the community density multiplied by its size.
pub fn scaled_density(size: usize, internal_edges: usize) -> Result<f64, TopologyError> {
    if size < 2 {
        return Err(TopologyError::CommunityTooSmall { size, needed: 2 });
    }
    Ok(2.0 * internal_edges as f64 / (size - 1) as f64)
}

/// Mean shortest-path length inside a community's induced subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageDistance {
    /// Mean over connected pairs; `None` when no pair is connected.
    pub mean: Option<f64>,
    /// Set when at least one pair of members cannot reach each other
    /// inside the community.
    pub disconnected: bool,
}

pub fn average_distance(
    graph: &Graph,
    community: &[usize],
) -> Result<AverageDistance, TopologyError> {
    let (sub, _) = graph.induced_subgraph(community)?;
    if sub.node_count() < 2 {
        return Err(TopologyError::CommunityTooSmall {
            size: sub.node_count(),
            needed: 2,
        });
    }
    Ok(distance_of(&sub))
}

fn distance_of(sub: &Graph) -> AverageDistance {
    let n = sub.node_count();
    let mut sum = 0u64;
    let mut pairs = 0u64;
    let mut dist = vec![usize::MAX; n];
    let mut queue = Vec::with_capacity(n);
    for source in 0..n {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push(source);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in sub.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push(v);
                }
            }
        }
        // Only count each unordered pair once.
        for &v in &queue[1..] {
            if v > source {
                sum += dist[v] as u64;
                pairs += 1;
            }
        }
    }
    let all_pairs = (n as u64) * (n as u64 - 1) / 2;
    AverageDistance {
        mean: (pairs > 0).then(|| sum as f64 / pairs as f64),
        disconnected: pairs < all_pairs,
    }
}

/// Maximal internal degree over `n_C - 1`.
pub fn hub_dominance(graph: &Graph, community: &[usize]) -> Result<f64, TopologyError> {
    let (sub, _) = graph.induced_subgraph(community)?;
    hub_of(&sub)
}

fn hub_of(sub: &Graph) -> Result<f64, TopologyError> {
    let n = sub.node_count();
    if n < 2 {
        return Err(TopologyError::CommunityTooSmall { size: n, needed: 2 });
    }
    let max = (0..n).map(|v| sub.degree(v)).max().unwrap_or(0);
    Ok(max as f64 / (n - 1) as f64)
}

/// Topological summary of one community.
///
/// Size-dependent properties are `None` for singletons, which are kept in
/// the size distribution but left out of every per-community curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityProfile {
    pub community: usize,
    pub size: usize,
    pub internal_edges: usize,
    pub scaled_density: Option<f64>,
    pub internal_transitivity: f64,
    pub average_distance: Option<f64>,
    pub hub_dominance: Option<f64>,
    pub disconnected: bool,
}

impl CommunityProfile {
    pub fn is_singleton(&self) -> bool {
        self.size < 2
    }

    fn from_subgraph(community: usize, sub: &Graph, mode: TransitivityMode) -> Self {
        let size = sub.node_count();
        let internal_edges = sub.edge_count();
        let (distance, hub) = if size >= 2 {
            (Some(distance_of(sub)), hub_of(sub).ok())
        } else {
            (None, None)
        };
        Self {
            community,
            size,
            internal_edges,
            scaled_density: scaled_density(size, internal_edges).ok(),
            internal_transitivity: transitivity_of(sub, mode),
            average_distance: distance.and_then(|d| d.mean),
            hub_dominance: hub,
            disconnected: distance.is_some_and(|d| d.disconnected),
        }
    }
}

/// One profile per community, in community id order.
pub fn profile_communities(
    graph: &Graph,
    partition: &Partition,
    mode: TransitivityMode,
) -> Result<Vec<CommunityProfile>, TopologyError> {
    check_cover(graph, partition)?;
    let communities = partition.communities();
    let build = |(id, members): (usize, &Vec<usize>)| -> Result<CommunityProfile, TopologyError> {
        let (sub, _) = graph.induced_subgraph(members)?;
        Ok(CommunityProfile::from_subgraph(id, &sub, mode))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        communities.par_iter().enumerate().map(build).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        communities.iter().enumerate().map(build).collect()
    }
}

/// Every curve describing one community structure: the size distribution,
/// one binned series per [`CommunityProperty`] and the embeddedness
/// histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub community_count: usize,
    pub largest_community: usize,
    pub size_distribution: Option<BinnedSeries>,
    /// Properties with nothing to bin (only singletons) are left out.
    pub curves: Vec<BinnedSeries>,
    pub embeddedness: EmbeddednessHistogram,
}

impl TopologySummary {
    pub fn compute(
        graph: &Graph,
        partition: &Partition,
        mode: TransitivityMode,
        bins_per_decade: usize,
    ) -> Result<Self, TopologyError> {
        let profiles = profile_communities(graph, partition, mode)?;
        let embedded = embeddedness(graph, partition)?;
        Ok(Self::from_parts(&profiles, &embedded, bins_per_decade))
    }

    /// Pools any number of profiles and node values, for instance those of
    /// several networks drawn from the same regime.
    pub fn from_parts(
        profiles: &[CommunityProfile],
        embedded: &[NodeEmbeddedness],
        bins_per_decade: usize,
    ) -> Self {
        let sizes: Vec<usize> = profiles.iter().map(|p| p.size).collect();
        Self {
            community_count: profiles.len(),
            largest_community: sizes.iter().copied().max().unwrap_or(0),
            size_distribution: size_distribution(&sizes, bins_per_decade),
            curves: CommunityProperty::ALL
                .iter()
                .filter_map(|&prop| bin_by_size(profiles, prop, bins_per_decade).ok())
                .collect(),
            embeddedness: EmbeddednessHistogram::new(embedded, EMBEDDEDNESS_BINS),
        }
    }

    pub fn curve(&self, property: CommunityProperty) -> Option<&BinnedSeries> {
        self.curves.iter().find(|c| c.property == property.name())
    }
}
