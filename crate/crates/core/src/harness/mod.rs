//! Experiment harness: generate benchmark samples per regime, run the
//! detection algorithms (and any external partitions) on them, score every
//! estimate and pool the topological curves, then persist everything.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! report.json, failures.json, scores.csv, ranking.csv
//! curves/<regime>/<property>__<source>.csv
//! <regime>/sample_<i>/graph.txt, reference.txt, generation.json
//! <regime>/sample_<i>/<source>.membership.txt, <source>.json
//! ```
//!
//! With `record_runtime` off (the default) two runs with the same
//! configuration produce byte-identical files.

mod report;
mod tables;

use std::collections::HashSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{self, DetectionConfig};
use crate::generator::{generate_lfr, GeneratedNetwork, LfrParams};
use crate::graph::Graph;
use crate::io;
use crate::measures::PartitionScores;
use crate::partition::Partition;
use crate::topology::{
    embeddedness, profile_communities, CommunityProfile, EmbeddednessHistogram, NodeEmbeddedness,
    PowerLawFitter, TopologySummary, TransitivityMode, DEFAULT_BINS_PER_DECADE,
};

pub use report::{
    rank_algorithms, rank_all, EvaluationReport, Failure, Measure, MeasureRanking, RankEntry,
    RegimeReport, SampleReport, SourceCurves, SourceResult, SourceScores, StructureStats,
    REFERENCE_SOURCE,
};
pub use tables::{emit_tables, write_curves};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("report holds no results to tabulate")]
    EmptyReport,
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A named parameter set. Its `seed` field is ignored; sample seeds come
/// from the experiment's master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub name: String,
    pub params: LfrParams,
}

/// A partition computed outside this crate for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalPartition {
    pub source: String,
    pub regime: String,
    pub sample: usize,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub regimes: Vec<Regime>,
    pub sample_count: usize,
    pub algorithms: Vec<DetectionConfig>,
    pub external_partitions: Vec<ExternalPartition>,
    pub output_dir: PathBuf,
    pub master_seed: u64,
    pub bins_per_decade: usize,
    pub transitivity: TransitivityMode,
    /// Wall-clock times make reruns differ, so they are opt-in.
    pub record_runtime: bool,
    /// Bootstrap replicates of the community-size power-law test.
    pub size_fit_replicates: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            regimes: Vec::new(),
            sample_count: 5,
            algorithms: Vec::new(),
            external_partitions: Vec::new(),
            output_dir: PathBuf::from("output"),
            master_seed: 0,
            bins_per_decade: DEFAULT_BINS_PER_DECADE,
            transitivity: TransitivityMode::default(),
            record_runtime: false,
            size_fit_replicates: 100,
        }
    }
}

fn safe_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !name.starts_with('.')
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.regimes.is_empty() {
            return fail("at least one regime is required".into());
        }
        if self.sample_count == 0 {
            return fail("sample_count must be at least 1".into());
        }
        if self.algorithms.is_empty() && self.external_partitions.is_empty() {
            return fail("no algorithm or external partition to evaluate".into());
        }
        if self.bins_per_decade == 0 {
            return fail("bins_per_decade must be at least 1".into());
        }
        let mut names = HashSet::new();
        for r in &self.regimes {
            if !safe_name(&r.name) {
                return fail(format!("regime name {:?} is not a safe file name", r.name));
            }
            if !names.insert(r.name.as_str()) {
                return fail(format!("duplicate regime {:?}", r.name));
            }
            r.params
                .validate()
                .map_err(|e| HarnessError::Config(format!("regime {}: {e}", r.name)))?;
        }
        let mut sources = HashSet::new();
        for a in &self.algorithms {
            a.validate()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            if !sources.insert(a.algorithm.name().to_string()) {
                return fail(format!("algorithm {} listed twice", a.algorithm));
            }
        }
        let mut external = HashSet::new();
        for e in &self.external_partitions {
            if !safe_name(&e.source) || e.source == REFERENCE_SOURCE {
                return fail(format!(
                    "external source name {:?} is not allowed",
                    e.source
                ));
            }
            if sources.contains(&e.source) {
                return fail(format!(
                    "external source {:?} clashes with an algorithm",
                    e.source
                ));
            }
            if !names.contains(e.regime.as_str()) {
                return fail(format!(
                    "external partition names unknown regime {:?}",
                    e.regime
                ));
            }
            if e.sample >= self.sample_count {
                return fail(format!(
                    "external partition sample {} out of range",
                    e.sample
                ));
            }
            if !external.insert((&e.source, &e.regime, e.sample)) {
                return fail(format!(
                    "external partition {}/{}/{} given twice",
                    e.source, e.regime, e.sample
                ));
            }
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of sample `sample` of regime number `regime`.
pub fn sample_seed(master: u64, regime: usize, sample: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ regime as u64) ^ sample as u64)
}

/// Seed handed to a stochastic algorithm on one sample.
pub fn algorithm_seed(sample_seed: u64, configured: u64) -> u64 {
    splitmix64(sample_seed ^ splitmix64(configured))
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

fn catch<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(format!("panicked: {msg}"))
    })
}

/// Everything measured on one partition of one sample.
struct Evaluated {
    structure: StructureStats,
    profiles: Vec<CommunityProfile>,
    embedded: Vec<NodeEmbeddedness>,
}

fn evaluate_structure(
    graph: &Graph,
    partition: &Partition,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Evaluated, String> {
    let profiles =
        profile_communities(graph, partition, cfg.transitivity).map_err(|e| e.to_string())?;
    let embedded = embeddedness(graph, partition).map_err(|e| e.to_string())?;
    let sizes: Vec<u64> = partition.sizes().into_iter().map(|s| s as u64).collect();
    let fitter = PowerLawFitter {
        replicates: cfg.size_fit_replicates,
        seed,
        ..PowerLawFitter::default()
    };
    let structure = StructureStats {
        community_count: partition.community_count(),
        largest_community: partition.largest_community_size(),
        fully_embedded_fraction: EmbeddednessHistogram::new(&embedded, 1).fraction_one(),
        size_fit: fitter.fit(&sizes).ok(),
    };
    Ok(Evaluated {
        structure,
        profiles,
        embedded,
    })
}

enum Estimate {
    Computed(DetectionConfig),
    External(PathBuf),
}

struct SourceOutcome {
    result: SourceResult,
    partition: Partition,
    evaluated: Evaluated,
}

fn run_source(
    name: &str,
    estimate: &Estimate,
    net: &GeneratedNetwork,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<SourceOutcome, String> {
    catch(|| {
        let start = Instant::now();
        let (partition, modularity, iterations, converged, external) = match estimate {
            Estimate::Computed(det) => {
                let mut det = det.clone();
                det.seed = algorithm_seed(seed, det.seed);
                let out = detection::detect(&net.graph, &det).map_err(|e| e.to_string())?;
                (
                    out.partition,
                    out.modularity,
                    Some(out.iterations),
                    Some(out.converged),
                    false,
                )
            }
            Estimate::External(path) => {
                let p = detection::load_external_partition(path, Some(net.graph.node_count()))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let q = detection::modularity(&net.graph, &p).ok();
                (p, q, None, None, true)
            }
        };
        let runtime = start.elapsed().as_secs_f64() * 1e3;
        let scores =
            PartitionScores::compute(&net.partition, &partition).map_err(|e| e.to_string())?;
        if !scores.in_range() {
            return Err(format!("scores out of range: {scores:?}"));
        }
        let evaluated = evaluate_structure(&net.graph, &partition, cfg, seed)?;
        Ok(SourceOutcome {
            result: SourceResult {
                source: name.to_string(),
                external,
                scores,
                modularity,
                iterations,
                converged,
                structure: evaluated.structure.clone(),
                runtime_ms: cfg.record_runtime.then_some(runtime),
            },
            partition,
            evaluated,
        })
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Pooled profiles and node values of one source over a regime's samples.
#[derive(Default)]
struct Pool {
    profiles: Vec<CommunityProfile>,
    embedded: Vec<NodeEmbeddedness>,
}

impl Pool {
    fn add(&mut self, e: Evaluated) {
        self.profiles.extend(e.profiles);
        self.embedded.extend(e.embedded);
    }
}

fn run_regime(
    index: usize,
    regime: &Regime,
    cfg: &ExperimentConfig,
    failures: &mut Vec<Failure>,
) -> Result<RegimeReport, HarnessError> {
    let regime_dir = cfg.output_dir.join(&regime.name);
    let sample_ids: Vec<usize> = (0..cfg.sample_count).collect();
    let networks = par_map(&sample_ids, |&i| {
        let seed = sample_seed(cfg.master_seed, index, i);
        let params = regime.params.clone().with_seed(seed);
        let net = catch(|| generate_lfr(&params).map_err(|e| e.to_string()));
        (i, seed, net)
    });

    let mut sources: Vec<(String, Option<DetectionConfig>)> = cfg
        .algorithms
        .iter()
        .map(|a| (a.algorithm.name().to_string(), Some(a.clone())))
        .collect();
    let mut external_names: Vec<String> = cfg
        .external_partitions
        .iter()
        .filter(|e| e.regime == regime.name)
        .map(|e| e.source.clone())
        .collect();
    external_names.sort();
    external_names.dedup();
    sources.extend(external_names.into_iter().map(|s| (s, None)));

    let mut pools: Vec<Pool> = (0..=sources.len()).map(|_| Pool::default()).collect();
    let mut samples = Vec::new();

    for (i, seed, net) in networks {
        let net = match net {
            Ok(net) => net,
            Err(message) => {
                failures.push(Failure {
                    regime: regime.name.clone(),
                    sample: Some(i),
                    source: None,
                    message: format!("generation failed: {message}"),
                });
                continue;
            }
        };
        let dir = regime_dir.join(format!("sample_{i}"));
        create_dir(&dir)?;
        let graph_path = dir.join("graph.txt");
        io::save_edge_list(&net.graph, &graph_path).map_err(io_err(&graph_path))?;
        let reference_path = dir.join("reference.txt");
        io::save_membership(&net.partition, &reference_path).map_err(io_err(&reference_path))?;
        write_json(&dir.join("generation.json"), &net.report)?;

        let reference = match evaluate_structure(&net.graph, &net.partition, cfg, seed) {
            Ok(e) => e,
            Err(message) => {
                failures.push(Failure {
                    regime: regime.name.clone(),
                    sample: Some(i),
                    source: Some(REFERENCE_SOURCE.into()),
                    message,
                });
                continue;
            }
        };
        let reference_stats = reference.structure.clone();
        pools[0].add(reference);

        let jobs: Vec<(usize, &String, Option<Estimate>)> = sources
            .iter()
            .enumerate()
            .map(|(k, (name, det))| {
                let estimate = match det {
                    Some(d) => Some(Estimate::Computed(d.clone())),
                    None => cfg
                        .external_partitions
                        .iter()
                        .find(|e| &e.source == name && e.regime == regime.name && e.sample == i)
                        .map(|e| Estimate::External(e.path.clone())),
                };
                (k, name, estimate)
            })
            .collect();
        let outcomes = par_map(&jobs, |(k, name, estimate)| {
            (
                *k,
                estimate
                    .as_ref()
                    .map(|e| run_source(name, e, &net, seed, cfg)),
            )
        });

        let mut results = Vec::new();
        for (k, outcome) in outcomes {
            let name = &sources[k].0;
            match outcome {
                None => {}
                Some(Ok(out)) => {
                    let path = dir.join(format!("{name}.membership.txt"));
                    io::save_membership(&out.partition, &path).map_err(io_err(&path))?;
                    write_json(&dir.join(format!("{name}.json")), &out.result)?;
                    pools[k + 1].add(out.evaluated);
                    results.push(out.result);
                }
                Some(Err(message)) => failures.push(Failure {
                    regime: regime.name.clone(),
                    sample: Some(i),
                    source: Some(name.clone()),
                    message,
                }),
            }
        }
        samples.push(SampleReport {
            index: i,
            seed,
            generation: net.report,
            reference: reference_stats,
            results,
        });
    }

    let mean_scores: Vec<SourceScores> = sources
        .iter()
        .filter_map(|(name, _)| {
            let hits: Vec<&PartitionScores> = samples
                .iter()
                .flat_map(|s| &s.results)
                .filter(|r| &r.source == name)
                .map(|r| &r.scores)
                .collect();
            if hits.is_empty() {
                return None;
            }
            let n = hits.len() as f64;
            let mean = |f: fn(&PartitionScores) -> f64| hits.iter().map(|s| f(s)).sum::<f64>() / n;
            Some(SourceScores {
                source: name.clone(),
                samples: hits.len(),
                scores: PartitionScores {
                    fcc: mean(|s| s.fcc),
                    ri: mean(|s| s.ri),
                    ari: mean(|s| s.ari),
                    nmi: mean(|s| s.nmi),
                },
            })
        })
        .collect();

    let names =
        std::iter::once(REFERENCE_SOURCE.to_string()).chain(sources.iter().map(|s| s.0.clone()));
    let curves = names
        .zip(pools)
        .filter(|(_, pool)| !pool.profiles.is_empty())
        .map(|(source, pool)| SourceCurves {
            source,
            summary: TopologySummary::from_parts(
                &pool.profiles,
                &pool.embedded,
                cfg.bins_per_decade,
            ),
        })
        .collect();

    Ok(RegimeReport {
        name: regime.name.clone(),
        params: regime.params.clone(),
        samples,
        ranking: rank_all(&mean_scores),
        mean_scores,
        curves,
    })
}

/// Runs the whole experiment and writes every artifact under
/// `cfg.output_dir`. Failures of single samples or sources are recorded in
/// the report instead of aborting the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvaluationReport, HarnessError> {
    cfg.validate()?;
    create_dir(&cfg.output_dir)?;
    let mut failures = Vec::new();
    let mut regimes = Vec::new();
    for (index, regime) in cfg.regimes.iter().enumerate() {
        regimes.push(run_regime(index, regime, cfg, &mut failures)?);
    }
    let report = EvaluationReport {
        master_seed: cfg.master_seed,
        regimes,
        failures,
    };
    write_json(&cfg.output_dir.join("report.json"), &report)?;
    write_json(&cfg.output_dir.join("failures.json"), &report.failures)?;
    if report.result_count() > 0 {
        emit_tables(&report, &cfg.output_dir)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::Algorithm;

    fn small_regime(mixing: f64) -> Regime {
        Regime {
            name: "classic".into(),
            params: LfrParams {
                n: 1000,
                avg_degree: 15.0,
                max_degree: 50,
                gamma: 2.5,
                beta: 1.5,
                mixing: crate::generator::MixingMode::Constant { mu: mixing },
                seed: 0,
                min_community: Some(20),
                max_community: Some(100),
            },
        }
    }

    fn config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            regimes: vec![small_regime(0.05)],
            sample_count: 2,
            algorithms: vec![DetectionConfig::new(Algorithm::Louvain)],
            output_dir: dir.to_path_buf(),
            size_fit_replicates: 10,
            ..Default::default()
        }
    }

    #[test]
    fn easy_regime_scores_high() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_experiment(&config(dir.path())).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        let regime = &report.regimes[0];
        assert_eq!(regime.samples.len(), 2);
        for s in regime.samples.iter().flat_map(|s| &s.results) {
            let sc = s.scores;
            assert!(
                sc.fcc >= 0.8 && sc.ri >= 0.8 && sc.ari >= 0.8 && sc.nmi >= 0.8,
                "{sc:?}"
            );
        }
        assert_eq!(regime.curves[0].source, REFERENCE_SOURCE);
        for name in ["report.json", "failures.json", "scores.csv", "ranking.csv"] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
        let sample = dir.path().join("classic/sample_1");
        for name in [
            "graph.txt",
            "reference.txt",
            "generation.json",
            "louvain.membership.txt",
            "louvain.json",
        ] {
            assert!(sample.join(name).is_file(), "{name}");
        }
    }

    #[test]
    fn rejects_config_without_sources() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        cfg.algorithms.clear();
        assert!(matches!(run_experiment(&cfg), Err(HarnessError::Config(_))));
        cfg.algorithms = vec![DetectionConfig::new(Algorithm::Louvain)];
        cfg.regimes[0].name = "../escape".into();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut cfg = config(a.path());
        cfg.sample_count = 1;
        cfg.algorithms
            .push(DetectionConfig::new(Algorithm::LabelPropagation));
        run_experiment(&cfg).unwrap();
        cfg.output_dir = b.path().to_path_buf();
        run_experiment(&cfg).unwrap();
        for rel in [
            "report.json",
            "scores.csv",
            "ranking.csv",
            "classic/sample_0/graph.txt",
            "classic/sample_0/label_propagation.membership.txt",
        ] {
            let x = fs::read(a.path().join(rel)).unwrap();
            let y = fs::read(b.path().join(rel)).unwrap();
            assert!(x == y, "{rel} differs");
        }
    }

    #[test]
    fn external_partition_enters_evaluation() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        cfg.sample_count = 1;
        let seed = sample_seed(cfg.master_seed, 0, 0);
        let net = generate_lfr(&cfg.regimes[0].params.clone().with_seed(seed)).unwrap();
        let path = dir.path().join("truth.txt");
        io::save_membership(&net.partition, &path).unwrap();
        cfg.external_partitions.push(ExternalPartition {
            source: "oracle".into(),
            regime: "classic".into(),
            sample: 0,
            path,
        });
        let report = run_experiment(&cfg).unwrap();
        let oracle = report.regimes[0].samples[0]
            .results
            .iter()
            .find(|r| r.source == "oracle")
            .unwrap();
        assert!(oracle.external);
        assert_eq!(oracle.scores.nmi, 1.0);
        assert_eq!(oracle.scores.fcc, 1.0);
    }

    #[test]
    fn seeds_differ_per_sample_and_regime() {
        let s: HashSet<u64> = (0..3)
            .flat_map(|r| (0..10).map(move |i| sample_seed(7, r, i)))
            .collect();
        assert_eq!(s.len(), 30);
    }
}
