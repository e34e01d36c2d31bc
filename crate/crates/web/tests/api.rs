use commbench_web::{compare_curves_json, detect_json, generate_json};
use serde_json::{json, Value};

fn params() -> Value {
    json!({
        "n": 500, "avg_degree": 10, "max_degree": 30, "gamma": 2.5, "beta": 1.5,
        "mixing": {"mode": "constant", "mu": 0.1},
        "seed": 5, "min_community": 15, "max_community": 60
    })
}

#[test]
fn generate_reports_counts_and_curves() {
    let out: Value = serde_json::from_str(&generate_json(&params().to_string()).unwrap()).unwrap();
    assert_eq!(out["nodes"], 500);
    assert!(out["edges"].as_u64().unwrap() > 2000);
    assert_eq!(out["summary"]["curves"].as_array().unwrap().len(), 4);
    assert!(out["summary"]["size_distribution"]["bins"].is_array());
}

#[test]
fn detect_scores_against_reference() {
    let req = json!({"params": params(), "algorithm": "louvain"}).to_string();
    let out: Value = serde_json::from_str(&detect_json(&req).unwrap()).unwrap();
    assert_eq!(out["algorithm"], "louvain");
    assert!(out["scores"]["nmi"].as_f64().unwrap() > 0.8);
    // Same request, same answer.
    assert_eq!(detect_json(&req).unwrap(), detect_json(&req).unwrap());
}

#[test]
fn compare_curves_side_by_side() {
    let req = json!({"params": params(), "algorithm": "walktrap"}).to_string();
    let out: Value =
        serde_json::from_str(&compare_curves_json(&req, "scaled_density").unwrap()).unwrap();
    assert_eq!(out["reference"]["property"], "scaled_density");
    assert_eq!(out["estimated"]["property"], "scaled_density");
    let sizes: Value =
        serde_json::from_str(&compare_curves_json(&req, "community_size").unwrap()).unwrap();
    assert!(sizes["reference"]["bins"].is_array());
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    assert!(generate_json("{")
        .unwrap_err()
        .contains("invalid parameters"));
    let mut p = params();
    p["n"] = json!(1_000_000);
    assert!(generate_json(&p.to_string()).is_err());
    p["n"] = json!(5);
    assert!(generate_json(&p.to_string()).is_err());
    let req = json!({"params": params()}).to_string();
    assert!(detect_json(&req).is_err());
    let req = json!({"params": params(), "algorithm": "louvain"}).to_string();
    assert!(compare_curves_json(&req, "diameter")
        .unwrap_err()
        .contains("unknown property"));
}
