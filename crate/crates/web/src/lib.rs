//! WebAssembly bindings for the browser demo.
//!
//! Each export takes and returns JSON strings. The work is done by plain
//! Rust functions returning `Result<String, String>` so it can be tested
//! natively; the exports only convert errors into JavaScript exceptions.
//!
//! Networks are not kept between calls: they are regenerated from their
//! parameters, which is cheap at demo sizes and keeps every call
//! reproducible.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use commbench::detection::{self, Algorithm, DetectionConfig};
use commbench::generator::{generate_lfr, GeneratedNetwork, GenerationReport, LfrParams};
use commbench::measures::PartitionScores;
use commbench::topology::{
    BinnedSeries, CommunityProperty, TopologySummary, TransitivityMode, DEFAULT_BINS_PER_DECADE,
};
use commbench::Partition;

/// Larger networks make the page unresponsive.
pub const MAX_NODES: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct NetworkView {
    pub nodes: usize,
    pub edges: usize,
    pub report: GenerationReport,
    pub summary: TopologySummary,
}

#[derive(Debug, Serialize)]
pub struct DetectionView {
    pub algorithm: Algorithm,
    pub communities: usize,
    pub largest_community: usize,
    pub modularity: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub scores: PartitionScores,
    pub summary: TopologySummary,
}

#[derive(Debug, Serialize)]
pub struct CurveComparison {
    pub property: String,
    pub reference: Option<BinnedSeries>,
    pub estimated: Option<BinnedSeries>,
}

#[derive(Debug, Deserialize)]
struct DetectRequest {
    params: LfrParams,
    #[serde(default)]
    config: Option<DetectionConfig>,
    #[serde(default)]
    algorithm: Option<Algorithm>,
}

fn build(params_json: &str) -> Result<GeneratedNetwork, String> {
    let params: LfrParams =
        serde_json::from_str(params_json).map_err(|e| format!("invalid parameters: {e}"))?;
    if params.n > MAX_NODES {
        return Err(format!("the demo is limited to {MAX_NODES} nodes"));
    }
    generate_lfr(&params).map_err(|e| e.to_string())
}

fn summarize(net: &GeneratedNetwork, partition: &Partition) -> Result<TopologySummary, String> {
    TopologySummary::compute(
        &net.graph,
        partition,
        TransitivityMode::default(),
        DEFAULT_BINS_PER_DECADE,
    )
    .map_err(|e| e.to_string())
}

fn run_detection(
    request_json: &str,
) -> Result<(GeneratedNetwork, DetectionConfig, detection::Detection), String> {
    let request: DetectRequest =
        serde_json::from_str(request_json).map_err(|e| format!("invalid request: {e}"))?;
    let config = match (request.config, request.algorithm) {
        (Some(c), _) => c,
        (None, Some(a)) => DetectionConfig::new(a).with_seed(request.params.seed),
        (None, None) => return Err("request needs `algorithm` or `config`".into()),
    };
    let params = serde_json::to_string(&request.params).map_err(|e| e.to_string())?;
    let net = build(&params)?;
    let found = detection::detect(&net.graph, &config).map_err(|e| e.to_string())?;
    Ok((net, config, found))
}

/// Generates a network from `LfrParams` JSON and profiles its reference
/// partition.
pub fn generate_json(params_json: &str) -> Result<String, String> {
    let net = build(params_json)?;
    let summary = summarize(&net, &net.partition)?;
    let view = NetworkView {
        nodes: net.graph.node_count(),
        edges: net.graph.edge_count(),
        report: net.report,
        summary,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Runs one algorithm on the network described by
/// `{"params": LfrParams, "algorithm": name}` (or a full `config`) and
/// scores it against the reference partition.
pub fn detect_json(request_json: &str) -> Result<String, String> {
    let (net, config, found) = run_detection(request_json)?;
    let scores =
        PartitionScores::compute(&net.partition, &found.partition).map_err(|e| e.to_string())?;
    let view = DetectionView {
        algorithm: config.algorithm,
        communities: found.partition.community_count(),
        largest_community: found.partition.largest_community_size(),
        modularity: found.modularity,
        iterations: found.iterations,
        converged: found.converged,
        scores,
        summary: summarize(&net, &found.partition)?,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Reference and estimated curves of one property side by side. The
/// property is `community_size`, or one of the per-community properties.
pub fn compare_curves_json(request_json: &str, property: &str) -> Result<String, String> {
    let (net, _, found) = run_detection(request_json)?;
    let pick = |s: TopologySummary| -> Result<Option<BinnedSeries>, String> {
        if property == "community_size" {
            return Ok(s.size_distribution);
        }
        let p = CommunityProperty::ALL
            .into_iter()
            .find(|p| p.name() == property)
            .ok_or_else(|| format!("unknown property {property:?}"))?;
        Ok(s.curve(p).cloned())
    };
    let view = CurveComparison {
        property: property.to_string(),
        reference: pick(summarize(&net, &net.partition)?)?,
        estimated: pick(summarize(&net, &found.partition)?)?,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn generate(params_json: &str) -> Result<String, JsError> {
    generate_json(params_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn detect(request_json: &str) -> Result<String, JsError> {
    detect_json(request_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = compareCurves)]
pub fn compare_curves(request_json: &str, property: &str) -> Result<String, JsError> {
    compare_curves_json(request_json, property).map_err(|e| JsError::new(&e))
}
