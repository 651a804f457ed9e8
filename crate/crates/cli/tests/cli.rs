//! End-to-end runs of the `frontal-lab` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use frontal_lab::mesh::read_obj_counts;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontal-lab"))
        .args(args)
        .env("FRONTAL_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().expect("number") - want).abs() < 1e-8
}

fn surface_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../surfaces")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn analyze_the_52_example() {
    let r = json(&run(&["analyze", "paper-52", "--at", "u=0"]));
    let p = &r["points"][0];
    let inv = &p["invariants"];
    for (k, want) in [("kappa_s", 2.0), ("kappa_nu", 0.0), ("kappa_t", 2.0), ("r_b", 0.0), ("r_c", 72.0)] {
        assert!(close(&inv[k], want), "{k} = {}", inv[k]);
    }
    assert!(close(&p["principal_curvatures"][0], 2.0));
    assert!(close(&p["principal_curvatures"][1], -2.0));
    assert_eq!(p["summary"][0], "C₁, C₂ regular at 0");
    assert_eq!(p["focal"][0]["classification"]["verdict"], "Regular");
    // The report echoes its configuration.
    assert_eq!(r["config"]["settings"]["order"], 7);
    assert_eq!(r["config"]["at"][0], 0.0);
    assert!(r["config"]["thresholds"]["vanish"].is_number());
}

#[test]
fn analyze_the_fold() {
    let r = json(&run(&["analyze", "fold", "--at", "u=0.3"]));
    let p = &r["points"][0];
    for k in ["kappa_s", "kappa_nu", "kappa_t", "kappa_c", "r_b", "r_c"] {
        assert!(close(&p["invariants"][k], 0.0), "{k}");
    }
    assert_eq!(p["front_class"]["tag"]["tag"], "PureFrontal");
}

#[test]
fn analyze_the_helicoid_axis() {
    let r = json(&run(&["analyze", "helicoid", "--at", "u=0"]));
    let axis = &r["points"][0]["focal"][0]["axis"];
    assert_eq!(axis["axis_singular"], true);
    assert_eq!(axis["psi_vanishes"], true);
}

#[test]
fn analyze_a_surface_file() {
    let r = json(&run(&["analyze", &surface_file("paper-52.surf"), "--at", "0.1"]));
    assert_eq!(r["surface"]["name"], "paper-52");
    assert!(r["points"][0]["invariants"]["kappa_s"].is_number());
}

#[test]
fn json_is_stable_apart_from_the_timestamp() {
    let args = ["analyze", "ridge-fold", "--at", "u=0", "--at", "u=0.25", "--tol", "1e-7"];
    let strip = |o: Output| -> String {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let (a, b) = (strip(run(&args)), strip(run(&args)));
    assert!(a.len() > 1000);
    assert_eq!(a, b);
    assert!(a.contains("\"vanish\": 1e-7"));
}

#[test]
fn csv_profile_carries_the_tolerances() {
    let out = run(&["analyze", "paper-52", "--format", "csv", "--order", "8"]);
    assert_eq!(code(&out), 0);
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rd.headers().unwrap().clone();
    assert_eq!(&header[0], "u");
    assert!(header.iter().any(|h| h == "deflate_tol"));
    let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 21);
    let order = header.iter().position(|h| h == "order").unwrap();
    assert!(rows.iter().all(|r| &r[order] == "8"));
}

#[test]
fn mesh_of_the_52_example() {
    let dir = std::env::temp_dir().join(format!("frontal-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.obj");
    let out = run(&["mesh", "paper-52", "--surface", "f", "--nu", "81", "--nv", "81", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let counts = read_obj_counts(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((counts.objects, counts.vertices, counts.faces, counts.lines), (1, 6561, 12800, 1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn mesh_of_all_four_surfaces() {
    let out = run(&["mesh", "helicoid", "--nu", "11", "--nv", "11"]);
    assert_eq!(code(&out), 0);
    let counts = read_obj_counts(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(counts.objects, 4);
    assert_eq!(counts.faces, 4 * 200);
}

#[test]
fn verify_targets() {
    let out = run(&["verify", "paper-52", "--format", "json"]);
    let r = json(&out);
    assert_eq!(r["pass"], true);
    let numbers: Vec<u64> = r["criteria"].as_array().unwrap().iter().map(|c| c["number"].as_u64().unwrap()).collect();
    assert_eq!(numbers, [1, 2, 3, 8, 10]);

    let out = run(&["verify", "all", "--suite", "classifiers"]);
    assert_eq!(code(&out), 0);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().next().unwrap().starts_with("check"));
    assert!(table.lines().skip(1).all(|l| !l.ends_with("FAIL")));
}

#[test]
fn verify_reports_the_helicoid_curvature_mismatch() {
    let out = run(&["verify", "helicoid", "--format", "csv"]);
    assert_eq!(code(&out), 4);
    let text = String::from_utf8(out.stdout).unwrap();
    let failing: Vec<&str> = text.lines().filter(|l| l.contains(",FAIL,")).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|l| l.contains("printed")), "{failing:?}");
}

#[test]
fn examples_lists_the_registry() {
    let out = run(&["examples"]);
    let r = json(&out);
    let names: Vec<&str> = r.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"paper-52") && names.contains(&"72-ccr"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["analyze"])), 1);
    assert_eq!(code(&run(&["mesh", "paper-52", "--nu", "1"])), 1);
    assert_eq!(code(&run(&["analyze", "paper-52", "--at", "u=x"])), 1);
    assert_eq!(code(&run(&["analyze", "no-such-surface"])), 2);
    assert_eq!(code(&run(&["verify", "no-such-target"])), 2);
    // A front is not pure-frontal.
    assert_eq!(code(&run(&["analyze", "cuspidal-edge", "--at", "u=0"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_frontal-lab"))
        .arg("examples")
        .env("FRONTAL_LAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}
