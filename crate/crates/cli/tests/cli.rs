use std::process::{Command, Output};

use num_bigint::BigInt;
use rand::SeedableRng;
use serde_json::Value;

use rmpc::algebra::PrimeField;
use rmpc::endo::build_dickson_curve;
use rmpc::schoof::{verify_chi, zeta_from_chi};

fn rmpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmpc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn chi(doc: &Value) -> Vec<BigInt> {
    doc["chi"].as_array().unwrap().iter().map(|c| BigInt::from(c.as_i64().unwrap())).collect()
}

#[test]
fn oracle_count_document() {
    let out = rmpc(&["count", "--n", "5", "--t", "1", "--p", "109", "--mode", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let c = chi(&doc);
    assert_eq!(c.len(), 5);
    assert_eq!(c[4], BigInt::from(1));
    assert_eq!(doc["genus"], 2);
    assert_eq!(doc["curve"]["q"], 109);
    assert_eq!(doc["mode"], "oracle");
    let n: BigInt = c.iter().sum();
    assert_eq!(BigInt::from(doc["jacobian_order"].as_i64().unwrap()), n);
}

#[test]
fn output_round_trips_through_verification() {
    let out = rmpc(&["count", "--n", "5", "--t", "3", "--p", "11", "--mode", "rm-with-oracle-kernels"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let dc = build_dickson_curve(5, 3, PrimeField::new(11).unwrap()).unwrap();
    let z = zeta_from_chi(2, &BigInt::from(11), &chi(&doc), 2.0).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    verify_chi(&dc, &z, 20, &mut rng).unwrap();
    for rep in doc["per_ell"].as_array().unwrap() {
        assert!(rep["status"] == "ok" || rep["status"].as_str().unwrap().starts_with("skipped:"));
    }
}

#[test]
fn cross_check_agrees() {
    let out = rmpc(&["cross-check", "--n", "5", "--t", "3", "--p", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["agree"], true);
    assert_eq!(doc["chi"], doc["oracle_chi"]);
    assert_eq!(doc["mode"], "rm");
}

#[test]
fn runs_are_reproducible() {
    let args = ["count", "--n", "5", "--t", "1", "--p", "29", "--mode", "rm-with-oracle-kernels", "--seed", "9"];
    let strip = |out: Output| {
        let mut doc = json(&out);
        doc.as_object_mut().unwrap().remove("timings_ms");
        serde_json::to_string(&doc).unwrap()
    };
    assert_eq!(strip(rmpc(&args)), strip(rmpc(&args)));
}

#[test]
fn invalid_configurations_exit_with_one() {
    for args in [
        vec!["count", "--n", "5", "--t", "1", "--p", "107"],
        vec!["count", "--n", "6", "--t", "1", "--p", "109"],
        vec!["count", "--n", "5", "--t", "1", "--p", "109", "--mode", "fast"],
        vec!["count", "--n", "5", "--t", "2", "--p", "11", "--mode", "oracle"],
    ] {
        assert_eq!(rmpc(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let out = rmpc(&["count", "--n", "5", "--t", "1", "--p", "109", "--mode", "oracle", "--enumeration-budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degree_profiles_stay_below_the_ceiling() {
    let out = rmpc(&["degrees", "--n", "5", "--p", "11", "--ell", "3,5,7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "g,l,max_deg_d,max_deg_e,ceiling,within_ceiling,deg_over_l2");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r[0], "2");
        assert_eq!(r[5], "true");
    }
}

#[test]
fn exported_genus_two_system() {
    let dir = std::env::temp_dir().join(format!("rmpc-export-{}", std::process::id()));
    let path = dir.with_extension("txt");
    let out = rmpc(&["export-system", "--n", "5", "--t", "1", "--p", "109", "--ell", "11", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[4].contains("y1^2") && lines[5].contains("y2^2"));
    assert!(lines.iter().all(|l| !l.contains('T')));
}
