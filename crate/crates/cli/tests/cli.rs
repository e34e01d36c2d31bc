use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn commbench(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_commbench"));
    cmd.args(args).env_remove("COMMBENCH_OUTPUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("COMMBENCH_OUTPUT_DIR", dir);
    }
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn generate(dir: &Path, seed: &str) {
    commbench(
        &[
            "generate",
            "--n",
            "400",
            "--avg-degree",
            "10",
            "--max-degree",
            "30",
            "--mixing",
            "0.1",
            "--min-community",
            "15",
            "--max-community",
            "50",
            "--seed",
            seed,
        ],
        Some(dir),
    );
}

#[test]
fn pipeline_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "3");
    for f in ["graph.txt", "reference.txt", "generation.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let graph = dir.join("graph.txt");
    let det = dir.join("det");
    commbench(
        &[
            "detect",
            "--graph",
            graph.to_str().unwrap(),
            "--nodes",
            "400",
            "--algorithm",
            "louvain",
            "--seed",
            "1",
            "--out",
            det.to_str().unwrap(),
        ],
        None,
    );
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(det.join("louvain.json")).unwrap()).unwrap();
    assert!(meta["modularity"].as_f64().unwrap() > 0.5);
    assert!(meta.get("runtime_ms").is_none());

    let out = commbench(
        &[
            "evaluate",
            "--reference",
            dir.join("reference.txt").to_str().unwrap(),
            "--estimated",
            det.join("louvain.membership.txt").to_str().unwrap(),
        ],
        None,
    );
    let scores: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(scores["nmi"].as_f64().unwrap() > 0.8, "{scores}");

    let curves = dir.join("curves");
    commbench(
        &[
            "profile",
            "--graph",
            graph.to_str().unwrap(),
            "--membership",
            dir.join("reference.txt").to_str().unwrap(),
            "--out",
            curves.to_str().unwrap(),
        ],
        None,
    );
    let text = fs::read_to_string(curves.join("scaled_density__reference.csv")).unwrap();
    assert!(text.starts_with("bin_low,bin_high,mean,count,property,source"));
}

#[test]
fn generation_is_reproducible() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    generate(a.path(), "9");
    generate(b.path(), "9");
    generate(c.path(), "10");
    let read = |d: &Path| fs::read(d.join("graph.txt")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
}

#[test]
fn experiment_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(
        &config,
        r#"{
  "regimes": [{"name": "easy", "params": {
    "n": 300, "avg_degree": 10, "max_degree": 30, "gamma": 2.5, "beta": 1.5,
    "mixing": {"mode": "constant", "mu": 0.1}, "min_community": 15, "max_community": 50}}],
  "sample_count": 1,
  "algorithms": [{"algorithm": "fast_greedy"}, {"algorithm": "label_propagation"}],
  "size_fit_replicates": 5
}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = commbench(
        &[
            "experiment",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "4",
        ],
        Some(&out_dir),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("fast_greedy") && stdout.contains("label_propagation"));
    assert!(out_dir.join("ranking.csv").is_file());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["master_seed"], 4);
}

#[test]
fn unknown_algorithm_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_commbench"))
        .args(["detect", "--graph", "x.txt", "--algorithm", "infomap"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown algorithm"));
}
