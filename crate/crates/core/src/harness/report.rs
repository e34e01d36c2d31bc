//! Report types and ranking.

use serde::{Deserialize, Serialize};

use crate::generator::{GenerationReport, LfrParams};
use crate::measures::PartitionScores;
use crate::topology::{PowerLawFit, TopologySummary};

/// Source tag of the ground-truth partition in curve listings.
pub const REFERENCE_SOURCE: &str = "reference";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Fcc,
    Ri,
    Ari,
    Nmi,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Fcc, Measure::Ri, Measure::Ari, Measure::Nmi];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Fcc => "fcc",
            Measure::Ri => "ri",
            Measure::Ari => "ari",
            Measure::Nmi => "nmi",
        }
    }

    pub fn of(self, scores: &PartitionScores) -> f64 {
        match self {
            Measure::Fcc => scores.fcc,
            Measure::Ri => scores.ri,
            Measure::Ari => scores.ari,
            Measure::Nmi => scores.nmi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub master_seed: u64,
    pub regimes: Vec<RegimeReport>,
    pub failures: Vec<Failure>,
}

impl EvaluationReport {
    pub fn result_count(&self) -> usize {
        self.regimes
            .iter()
            .flat_map(|r| &r.samples)
            .map(|s| s.results.len())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub name: String,
    pub params: LfrParams,
    pub samples: Vec<SampleReport>,
    /// Scores averaged over the samples each source succeeded on.
    pub mean_scores: Vec<SourceScores>,
    pub ranking: Vec<MeasureRanking>,
    /// Curves pooled over all samples, reference first.
    pub curves: Vec<SourceCurves>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub index: usize,
    pub seed: u64,
    pub generation: GenerationReport,
    pub reference: StructureStats,
    pub results: Vec<SourceResult>,
}

/// Headline numbers of one community structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureStats {
    pub community_count: usize,
    pub largest_community: usize,
    /// Share of nodes with all their links inside their community.
    pub fully_embedded_fraction: f64,
    /// `None` when too few communities to fit.
    pub size_fit: Option<PowerLawFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceResult {
    pub source: String,
    /// True for partitions loaded from files rather than computed here.
    pub external: bool,
    pub scores: PartitionScores,
    pub modularity: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub structure: StructureStats,
    /// Only recorded on request; it would break byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceScores {
    pub source: String,
    pub samples: usize,
    pub scores: PartitionScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceCurves {
    pub source: String,
    pub summary: TopologySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRanking {
    pub measure: Measure,
    pub entries: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub source: String,
    pub value: f64,
    pub rank: usize,
    /// Another source has exactly the same value.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub regime: String,
    pub sample: Option<usize>,
    pub source: Option<String>,
    pub message: String,
}

/// Competition ranking: rank 1 is the highest value and tied sources
/// share the best rank of their group (`0.9, 0.9, 0.5` ranks `1, 1, 3`).
/// Entries come back in input order.
pub fn rank_algorithms(scores: &[(String, f64)]) -> Vec<RankEntry> {
    scores
        .iter()
        .map(|(source, value)| {
            let better = scores.iter().filter(|(_, v)| v > value).count();
            let equal = scores.iter().filter(|(_, v)| v == value).count();
            RankEntry {
                source: source.clone(),
                value: *value,
                rank: better + 1,
                tied: equal > 1,
            }
        })
        .collect()
}

pub fn rank_all(mean_scores: &[SourceScores]) -> Vec<MeasureRanking> {
    Measure::ALL
        .iter()
        .map(|&measure| {
            let column: Vec<(String, f64)> = mean_scores
                .iter()
                .map(|s| (s.source.clone(), measure.of(&s.scores)))
                .collect();
            MeasureRanking {
                measure,
                entries: rank_algorithms(&column),
            }
        })
        .collect()
}
