//! Modified LFR benchmark generator.
//!
//! Degrees and community sizes follow truncated power laws. Each node gets a
//! mixing coefficient `mu` (the share of its links leaving its community);
//! in the bimodal mode half of the nodes have `mu = 0`. The pipeline is:
//! degrees, configuration model, mixing targets, community sizes, node
//! assignment, then degree-preserving rewiring toward the internal-degree
//! targets.

pub mod communities;
pub mod configuration;
pub mod degrees;
pub mod mixing;
pub mod rewire;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::partition::Partition;

pub use communities::{assign_nodes, sample_community_sizes};
pub use configuration::configuration_model;
pub use degrees::{sample_powerlaw_degrees, DegreeLaw};
pub use mixing::{internal_degree_targets, sample_mixing_coefficients, MixingMode};
pub use rewire::{rewire_to_internal_degrees, rewire_to_mixing, RewireOutcome, RewireStats};

/// Fresh community-size draws tried before assignment is declared infeasible.
const SIZE_REDRAWS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no power law with max degree {max_degree} has mean {avg_degree}")]
    NoFeasibleMinDegree { avg_degree: f64, max_degree: usize },
    #[error("degree sum {0} is odd")]
    OddDegreeSum(usize),
    #[error("could not make the graph simple: {remaining} bad edges left")]
    RepairFailed { remaining: usize },
    #[error("community sizes in [{min_size}, {max_size}] cannot sum to {n}")]
    InfeasibleSizeBounds {
        min_size: usize,
        max_size: usize,
        n: usize,
    },
    #[error("community sizes sum to {sizes}, expected {n}")]
    SizeSumMismatch { sizes: usize, n: usize },
    #[error("no community can hold node {node} with internal degree {internal_degree}")]
    AssignmentInfeasible { node: usize, internal_degree: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Degree exponent.
    pub gamma: f64,
    /// Community size exponent.
    pub beta: f64,
    pub mixing: MixingMode,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `max(2, smallest internal degree + 1)`.
    #[serde(default)]
    pub min_community: Option<usize>,
    /// Defaults to the maximum degree.
    #[serde(default)]
    pub max_community: Option<usize>,
}

impl LfrParams {
    /// The 25 000-node network with bimodal mixing used for the
    /// topological comparisons.
    pub fn large_bimodal() -> Self {
        Self {
            n: 25_000,
            avg_degree: 11.0,
            max_degree: 2850,
            gamma: 3.0,
            beta: 2.0,
            mixing: MixingMode::bimodal(),
            seed: 0,
            min_community: Some(3),
            max_community: Some(2300),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let fail = |m: String| Err(GeneratorError::InvalidParams(m));
        if self.n < 10 {
            return fail(format!("n = {} is below 10", self.n));
        }
        if !(self.gamma > 2.0) {
            return fail(format!("degree exponent {} must exceed 2", self.gamma));
        }
        if !(1.0..=2.0).contains(&self.beta) {
            return fail(format!("size exponent {} must lie in [1, 2]", self.beta));
        }
        if !(self.avg_degree >= 1.0)
            || self.avg_degree > self.max_degree as f64
            || self.max_degree >= self.n
        {
            return fail(format!(
                "need 1 <= avg degree ({}) <= max degree ({}) < n ({})",
                self.avg_degree, self.max_degree, self.n
            ));
        }
        if let (Some(lo), Some(hi)) = (self.min_community, self.max_community) {
            if lo > hi {
                return fail(format!("community bounds {lo} > {hi}"));
            }
        }
        if self.max_community.is_some_and(|hi| hi > self.n) {
            return fail("max community exceeds n".into());
        }
        self.mixing
            .validate()
            .map_err(GeneratorError::InvalidParams)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub params: LfrParams,
    pub achieved_avg_degree: f64,
    /// Mean over nodes of `|k_int - target| / k` against the targets the
    /// rewiring aimed for (after clamping and parity fixes).
    pub mean_target_deviation: f64,
    /// Mean over nodes of `|mu_realised - mu_drawn|`.
    pub mean_mixing_deviation: f64,
    /// Nodes whose internal-degree target was lowered to fit the largest
    /// community.
    pub clamped_nodes: usize,
    pub unsatisfied_nodes: usize,
    pub accepted_swaps: usize,
    pub rewiring_attempts: usize,
    pub converged: bool,
    pub size_redraws: usize,
    pub community_count: usize,
    pub min_community: usize,
    pub max_community: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub graph: Graph,
    pub partition: Partition,
    pub mixing_targets: Vec<f64>,
    pub internal_degrees: Vec<usize>,
    pub report: GenerationReport,
}

impl GeneratedNetwork {
    /// Realised mixing coefficient of each node (0 for isolated nodes).
    pub fn realised_mixing(&self) -> Vec<f64> {
        (0..self.graph.node_count())
            .map(|v| {
                let k = self.graph.degree(v);
                if k == 0 {
                    0.0
                } else {
                    1.0 - self.internal_degrees[v] as f64 / k as f64
                }
            })
            .collect()
    }
}

pub fn generate_lfr(params: &LfrParams) -> Result<GeneratedNetwork, GeneratorError> {
    params.validate()?;
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let degrees = sample_powerlaw_degrees(
        n,
        params.avg_degree,
        params.max_degree,
        params.gamma,
        &mut rng,
    )?;
    let graph = configuration_model(&degrees, &mut rng)?;
    let mixing = sample_mixing_coefficients(n, params.mixing, &mut rng);
    let mut targets = internal_degree_targets(&degrees, &mixing);

    let min_size = params
        .min_community
        .unwrap_or_else(|| (targets.iter().copied().min().unwrap_or(0) + 1).max(2));
    let max_size = params.max_community.unwrap_or(params.max_degree).min(n);

    let mut redraws = 0;
    let (partition, clamped) = loop {
        let sizes = sample_community_sizes(n, params.beta, min_size, max_size, &mut rng)?;
        let cap = sizes.iter().copied().max().unwrap_or(1) - 1;
        let mut clamped = 0;
        let capped: Vec<usize> = targets
            .iter()
            .map(|&t| {
                if t > cap {
                    clamped += 1;
                    cap
                } else {
                    t
                }
            })
            .collect();
        match assign_nodes(&sizes, &capped, &mut rng) {
            Ok(p) => {
                targets = capped;
                break (p, clamped);
            }
            Err(e) if redraws + 1 >= SIZE_REDRAWS => return Err(e),
            Err(_) => redraws += 1,
        }
    };
    fix_parity(&partition, &degrees, &mut targets, &mut rng);

    let out = rewire_to_internal_degrees(&graph, &partition, &targets, &mut rng);
    let sizes = partition.sizes();
    let mixing_dev = (0..n)
        .filter(|&v| degrees[v] > 0)
        .map(|v| ((1.0 - out.internal_degrees[v] as f64 / degrees[v] as f64) - mixing[v]).abs())
        .sum::<f64>()
        / n.max(1) as f64;
    let report = GenerationReport {
        params: params.clone(),
        achieved_avg_degree: 2.0 * out.graph.edge_count() as f64 / n as f64,
        mean_target_deviation: out.stats.mean_deviation,
        mean_mixing_deviation: mixing_dev,
        clamped_nodes: clamped,
        unsatisfied_nodes: out.stats.unsatisfied_nodes,
        accepted_swaps: out.stats.accepted_swaps,
        rewiring_attempts: out.stats.attempts,
        converged: out.stats.converged,
        size_redraws: redraws,
        community_count: partition.community_count(),
        min_community: sizes.iter().copied().min().unwrap_or(0),
        max_community: sizes.iter().copied().max().unwrap_or(0),
    };
    Ok(GeneratedNetwork {
        graph: out.graph,
        partition,
        mixing_targets: mixing,
        internal_degrees: out.internal_degrees,
        report,
    })
}

/// Internal degrees inside one community must sum to an even number. When a
/// community's sum is odd, one random member moves its target by one,
/// downward if possible.
fn fix_parity<R: rand::Rng + ?Sized>(
    partition: &Partition,
    degrees: &[usize],
    targets: &mut [usize],
    rng: &mut R,
) {
    let sizes = partition.sizes();
    for mut members in partition.communities() {
        if members.iter().map(|&v| targets[v]).sum::<usize>() % 2 == 0 {
            continue;
        }
        members.shuffle(rng);
        let cap = sizes[partition.community_of(members[0])] - 1;
        if let Some(&v) = members.iter().find(|&&v| targets[v] > 0) {
            targets[v] -= 1;
        } else if let Some(&v) = members.iter().find(|&&v| targets[v] < degrees[v].min(cap)) {
            targets[v] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> LfrParams {
        LfrParams {
            n: 1000,
            avg_degree: 10.0,
            max_degree: 50,
            gamma: 2.5,
            beta: 1.5,
            mixing: MixingMode::Constant { mu: 0.3 },
            seed,
            min_community: Some(20),
            max_community: Some(100),
        }
    }

    #[test]
    fn constant_mixing_is_reached() {
        let net = generate_lfr(&small(1)).unwrap();
        assert_eq!(net.partition.node_count(), 1000);
        let r = &net.report;
        assert!((9.0..=11.0).contains(&r.achieved_avg_degree), "{r:?}");
        assert!(r.mean_target_deviation < 0.05, "{r:?}");
        assert!(r.min_community >= 20 && r.max_community <= 100);
        let mu = net.realised_mixing();
        let mean = mu.iter().sum::<f64>() / mu.len() as f64;
        assert!((mean - 0.3).abs() < 0.05, "{mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_lfr(&small(5)).unwrap();
        let b = generate_lfr(&small(5)).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.partition, b.partition);
        let c = generate_lfr(&small(6)).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn bimodal_half_isolated_from_outside() {
        let mut p = small(2);
        p.mixing = MixingMode::bimodal();
        let net = generate_lfr(&p).unwrap();
        let zero_targets = net.mixing_targets.iter().filter(|&&m| m == 0.0).count();
        assert_eq!(zero_targets, 500);
        let fully_internal = (0..1000)
            .filter(|&v| net.internal_degrees[v] == net.graph.degree(v))
            .count();
        assert!(fully_internal >= 450, "{fully_internal} {:?}", net.report);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = small(0);
        p.gamma = 2.0;
        assert!(matches!(
            generate_lfr(&p),
            Err(GeneratorError::InvalidParams(_))
        ));
        let mut p = small(0);
        p.max_degree = 1000;
        assert!(p.validate().is_err());
        let mut p = small(0);
        p.beta = 2.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn params_roundtrip_json() {
        let p = LfrParams::large_bimodal();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<LfrParams>(&s).unwrap(), p);
    }
}
