use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use commbench::detection::{self, Algorithm, DetectionConfig};
use commbench::generator::{generate_lfr, LfrParams, MixingMode};
use commbench::harness::{run_experiment, write_curves, ExperimentConfig};
use commbench::io;
use commbench::measures::PartitionScores;
use commbench::topology::{TopologySummary, TransitivityMode, DEFAULT_BINS_PER_DECADE};

const OUTPUT_ENV: &str = "COMMBENCH_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "commbench",
    version,
    about = "Community detection benchmarking toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark network with its reference partition.
    Generate(GenerateArgs),
    /// Run a community detection algorithm on an edge list.
    Detect(DetectArgs),
    /// Score an estimated partition against a reference partition.
    Evaluate(EvaluateArgs),
    /// Compute the topological curves of a partition.
    Profile(ProfileArgs),
    /// Run a full experiment described by a JSON config file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct OutputDir {
    /// Output directory.
    #[arg(long, env = OUTPUT_ENV, default_value = "commbench-output")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 25000 nodes, mean degree 11, bimodal mixing.
    LargeBimodal,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 15.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 50)]
    max_degree: usize,
    /// Degree exponent.
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    /// Community size exponent.
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    /// `bimodal` or a constant mixing coefficient in [0, 1].
    #[arg(long, default_value = "bimodal")]
    mixing: String,
    #[arg(long, default_value_t = MixingMode::DEFAULT_BIMODAL_MEAN)]
    mixing_mean: f64,
    #[arg(long, default_value_t = MixingMode::DEFAULT_BIMODAL_SD)]
    mixing_sd: f64,
    #[arg(long)]
    min_community: Option<usize>,
    #[arg(long)]
    max_community: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputDir,
}

#[derive(Args)]
struct DetectArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Node count, when isolated nodes trail the highest id in the file.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 4)]
    walktrap_steps: usize,
    #[arg(long, default_value_t = 2)]
    mcl_expansion: u32,
    #[arg(long, default_value_t = 2.0)]
    mcl_inflation: f64,
    #[arg(long, default_value_t = 1e-5)]
    mcl_prune_threshold: f64,
    #[arg(long, default_value_t = 100)]
    mcl_max_iterations: usize,
    #[arg(long, default_value_t = 100)]
    lpa_max_sweeps: usize,
    /// Store the wall-clock runtime in the metadata (makes reruns differ).
    #[arg(long)]
    record_runtime: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputDir,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    estimated: PathBuf,
    /// Write the scores here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for uniformity; scoring is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transitivity {
    ContributeZero,
    ExcludeLowDegree,
}

impl From<Transitivity> for TransitivityMode {
    fn from(t: Transitivity) -> Self {
        match t {
            Transitivity::ContributeZero => TransitivityMode::ContributeZero,
            Transitivity::ExcludeLowDegree => TransitivityMode::ExcludeLowDegree,
        }
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    membership: PathBuf,
    /// Tag written in the `source` column.
    #[arg(long, default_value = "reference")]
    source: String,
    #[arg(long, default_value_t = DEFAULT_BINS_PER_DECADE)]
    bins_per_decade: usize,
    #[arg(long, value_enum, default_value = "contribute-zero")]
    transitivity: Transitivity,
    /// Accepted for uniformity; profiling is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputDir,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long, env = OUTPUT_ENV)]
    out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!(
            "unknown algorithm {s:?}, expected one of {}",
            names.join(", ")
        )
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let params = match args.preset {
        Some(Preset::LargeBimodal) => LfrParams::large_bimodal(),
        None => LfrParams {
            n: args.n,
            avg_degree: args.avg_degree,
            max_degree: args.max_degree,
            gamma: args.gamma,
            beta: args.beta,
            mixing: if args.mixing == "bimodal" {
                MixingMode::Bimodal {
                    mean: args.mixing_mean,
                    sd: args.mixing_sd,
                }
            } else {
                let mu = args.mixing.parse().with_context(|| {
                    format!(
                        "--mixing {:?} is neither `bimodal` nor a number",
                        args.mixing
                    )
                })?;
                MixingMode::Constant { mu }
            },
            seed: 0,
            min_community: args.min_community,
            max_community: args.max_community,
        },
    }
    .with_seed(args.seed);
    let net = generate_lfr(&params)?;
    let out = &args.output.out;
    create_dir(out)?;
    io::save_edge_list(&net.graph, &out.join("graph.txt"))?;
    io::save_membership(&net.partition, &out.join("reference.txt"))?;
    write_json(&out.join("generation.json"), &net.report)?;
    eprintln!(
        "generated {} nodes, {} edges, {} communities into {}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.partition.community_count(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct DetectionRecord {
    config: DetectionConfig,
    node_count: usize,
    community_count: usize,
    modularity: Option<f64>,
    iterations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

fn detect(args: DetectArgs) -> Result<()> {
    let graph = io::load_edge_list(&args.graph, args.nodes)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let config = DetectionConfig {
        algorithm: args.algorithm,
        seed: args.seed,
        walktrap_steps: args.walktrap_steps,
        mcl_expansion: args.mcl_expansion,
        mcl_inflation: args.mcl_inflation,
        mcl_prune_threshold: args.mcl_prune_threshold,
        mcl_max_iterations: args.mcl_max_iterations,
        lpa_max_sweeps: args.lpa_max_sweeps,
    };
    let start = Instant::now();
    let out = detection::detect(&graph, &config)?;
    let runtime = start.elapsed().as_secs_f64() * 1e3;
    let dir = &args.output.out;
    create_dir(dir)?;
    let name = args.algorithm.name();
    io::save_membership(&out.partition, &dir.join(format!("{name}.membership.txt")))?;
    let record = DetectionRecord {
        config,
        node_count: graph.node_count(),
        community_count: out.partition.community_count(),
        modularity: out.modularity,
        iterations: out.iterations,
        converged: out.converged,
        runtime_ms: args.record_runtime.then_some(runtime),
    };
    write_json(&dir.join(format!("{name}.json")), &record)?;
    eprintln!(
        "{name}: {} communities, Q = {}",
        record.community_count,
        record
            .modularity
            .map_or("undefined".into(), |q| format!("{q:.4}"))
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let reference = io::load_external_partition(&args.reference, None)
        .with_context(|| format!("reading {}", args.reference.display()))?;
    let estimated = io::load_external_partition(&args.estimated, Some(reference.node_count()))
        .with_context(|| format!("reading {}", args.estimated.display()))?;
    let scores = PartitionScores::compute(&reference, &estimated)?;
    match args.out {
        Some(path) => write_json(&path, &scores)?,
        None => println!("{}", serde_json::to_string_pretty(&scores)?),
    }
    Ok(())
}

fn profile(args: ProfileArgs) -> Result<()> {
    if args.bins_per_decade == 0 {
        bail!("--bins-per-decade must be at least 1");
    }
    let partition = io::load_external_partition(&args.membership, None)
        .with_context(|| format!("reading {}", args.membership.display()))?;
    let graph = io::load_edge_list(&args.graph, Some(partition.node_count()))
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let summary = TopologySummary::compute(
        &graph,
        &partition,
        args.transitivity.into(),
        args.bins_per_decade,
    )?;
    let written = write_curves(&summary, &args.source, &args.output.out)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    let report = run_experiment(&cfg)?;
    for regime in &report.regimes {
        for mean in &regime.mean_scores {
            let s = mean.scores;
            println!(
                "{}\t{}\tfcc {:.3}\tri {:.3}\tari {:.3}\tnmi {:.3}",
                regime.name, mean.source, s.fcc, s.ri, s.ari, s.nmi
            );
        }
    }
    for f in &report.failures {
        eprintln!(
            "failure: {} sample {:?} source {:?}: {}",
            f.regime, f.sample, f.source, f.message
        );
    }
    eprintln!("report written to {}", cfg.output_dir.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Detect(a) => detect(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Profile(a) => profile(a),
        Command::Experiment(a) => experiment(a),
    }
}
