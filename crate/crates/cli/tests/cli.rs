//! End-to-end tests of the `cggm` binary: exit codes, artifact contracts
//! and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn cggm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cggm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const SIX_CYCLE_MODEL: &str = r#"
  "model": {
    "p": 6,
    "edges": [[1,2],[2,3],[3,4],[4,5],[5,6],[1,6]],
    "vertex_classes": [[1,3,5],[2,4,6]],
    "edge_classes": [[[1,2],[3,4],[5,6]],[[2,3],[4,5],[1,6]]]
  }
"#;

#[test]
fn explicit_model_config_matches_the_preset() {
    // The hand-written six-cycle (1-based vertices) plus the colouring-(a)
    // class values must reproduce the built-in preset byte for byte.
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for sub in ["preset", "explicit"] {
        std::fs::create_dir(dir.join(sub)).unwrap();
    }
    let cfg = write(
        dir,
        "cfg.json",
        &format!("{{ {SIX_CYCLE_MODEL}, \"true_theta\": [0.1, 0.03, 0.01, 0.02] }}"),
    );
    let a = cggm(
        &["simulate", "--preset", "cycle6-a", "--n", "40", "--seed", "9", "--out", "preset"],
        dir,
    );
    assert!(a.status.success(), "{}", stderr_of(&a));
    let b = cggm(
        &["simulate", "--config", &cfg, "--n", "40", "--seed", "9", "--out", "explicit"],
        dir,
    );
    assert!(b.status.success(), "{}", stderr_of(&b));
    assert_eq!(read(dir, "preset/data.csv"), read(dir, "explicit/data.csv"));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for sub in ["a", "b", "c"] {
        std::fs::create_dir(dir.join(sub)).unwrap();
    }
    let run = |sub: &str, seed: &str| {
        let out = cggm(
            &["simulate", "--preset", "cycle6-a", "--n", "25", "--seed", seed, "--out", sub],
            dir,
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    };
    run("a", "7");
    run("b", "7");
    run("c", "8");
    let a = read(dir, "a/data.csv");
    assert_eq!(a, read(dir, "b/data.csv"));
    assert_ne!(a, read(dir, "c/data.csv"));
    assert_eq!(a.lines().count(), 25);
    assert_eq!(a.lines().next().unwrap().split(',').count(), 6);
}

#[test]
fn missing_model_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "empty.json", "{}");
    let out = cggm(&["estimate", "--config", &cfg, "--method", "GBE"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("no model specified"));
}

#[test]
fn non_pd_true_k_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": {
                "p": 2,
                "edges": [[1,2]],
                "vertex_classes": [[1],[2]],
                "edge_classes": [[[1,2]]]
            },
            "true_k": [[1.0, 2.0],[2.0, 1.0]],
            "data": { "n": 10 }
        }"#,
    );
    let out = cggm(&["estimate", "--config", &cfg, "--method", "GMLE"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("not a cone member"));
}

#[test]
fn unknown_preset_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cggm(&["check", "--preset", "cycle7-q"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = cggm(&["benchmark", "--preset", "table9-desk"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn benchmark_preset_rejected_outside_benchmark() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cggm(&["check", "--preset", "table2-desk"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("benchmark subcommand"));
}

#[test]
fn hops_contradiction_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cggm(
        &["estimate", "--preset", "cycle6-a", "--method", "MBE-1hop", "--hops", "2"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("contradicts"));
}

#[test]
fn estimate_end_to_end_reports_nmse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{ "data": { "n": 80 }, "sampler": { "iters": 600, "burn_in": 150 } }"#,
    );
    let out = cggm(
        &[
            "estimate", "--preset", "cycle6-a", "--config", &cfg, "--method", "MBE-1hop",
            "--seed", "5", "--emit-k",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "estimate.json")).unwrap();
    assert_eq!(json["method"], "MBE-1hop");
    assert_eq!(json["hops"], 1);
    assert_eq!(json["combine"], "self");
    assert_eq!(json["theta"].as_array().unwrap().len(), 4);
    assert_eq!(json["contribution_counts"].as_array().unwrap().len(), 4);
    let nmse = json["nmse"].as_f64().unwrap();
    assert!(nmse.is_finite() && nmse < 1.0, "nmse = {nmse}");
    assert_eq!(json["pd"], true);
    let k = json["k"].as_array().unwrap();
    assert_eq!(k.len(), 6);
    assert_eq!(k[0].as_array().unwrap().len(), 6);
    // No timing fields: the artifact must be byte-stable for a given seed.
    assert!(json.get("elapsed_s").is_none());
}

#[test]
fn silent_by_default_and_per_vertex_lines_under_verbose() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::create_dir(dir.join("v")).unwrap();
    let cfg = write(
        dir,
        "cfg.json",
        r#"{ "data": { "n": 30 }, "sampler": { "iters": 200, "burn_in": 50 } }"#,
    );
    let base =
        ["estimate", "--preset", "cycle6-a", "--config", &cfg, "--method", "MBE-1hop"];
    let quiet = cggm(&base, dir);
    assert!(quiet.status.success(), "{}", stderr_of(&quiet));
    assert_eq!(stderr_of(&quiet), "", "default run must be silent");

    let mut loud_args = base.to_vec();
    loud_args.extend(["-v", "--out", "v"]);
    let loud = cggm(&loud_args, dir);
    assert!(loud.status.success(), "{}", stderr_of(&loud));
    let log = stderr_of(&loud);
    for vertex in 1..=6 {
        assert!(log.contains(&format!("vertex   {vertex}:")), "missing vertex {vertex}: {log}");
    }
    assert_eq!(read(dir, "estimate.json"), read(dir, "v/estimate.json"));
}

#[test]
fn estimate_json_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::create_dir(dir.join("a")).unwrap();
    std::fs::create_dir(dir.join("b")).unwrap();
    let cfg = write(
        dir,
        "cfg.json",
        r#"{ "data": { "n": 40 }, "sampler": { "iters": 300, "burn_in": 100 } }"#,
    );
    for sub in ["a", "b"] {
        let out = cggm(
            &[
                "estimate", "--preset", "cycle6-a", "--config", &cfg, "--method", "MBE-2hop",
                "--seed", "11", "--out", sub,
            ],
            dir,
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    assert_eq!(read(dir, "a/estimate.json"), read(dir, "b/estimate.json"));
}

#[test]
fn gmle_saturated_toy_matches_inverse_scatter() {
    // Data with scatter S = 3·I: the saturated MLE is (S/n)^{-1} = (4/3)·I.
    let tmp = tempfile::tempdir().unwrap();
    let data = write(tmp.path(), "data.csv", "1,0\n0,1\n1,1\n-1,1\n");
    let cfg = write(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{
                "model": {{
                    "p": 2,
                    "edges": [[1,2]],
                    "vertex_classes": [[1],[2]],
                    "edge_classes": [[[1,2]]]
                }},
                "data": {{ "file": "{data}" }}
            }}"#
        ),
    );
    let out = cggm(
        &["estimate", "--config", &cfg, "--method", "GMLE", "--emit-k"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "estimate.json")).unwrap();
    let k = json["k"].as_array().unwrap();
    let k00 = k[0].as_array().unwrap()[0].as_f64().unwrap();
    let k01 = k[0].as_array().unwrap()[1].as_f64().unwrap();
    assert!((k00 - 4.0 / 3.0).abs() < 1e-6, "k00 = {k00}");
    assert!(k01.abs() < 1e-6, "k01 = {k01}");
    assert_eq!(json["acceptance_mean"], serde_json::Value::Null);
    assert_eq!(json["hops"], serde_json::Value::Null);
    assert_eq!(json["nmse"], serde_json::Value::Null);
}

#[test]
fn gbe_scalar_gamma_posterior() {
    // p = 1: the ψ-sampler draws iid, so acceptance is exactly 1.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{
            "model": { "p": 1, "edges": [], "vertex_classes": [[1]], "edge_classes": [] },
            "true_k": [[2.0]],
            "data": { "n": 60 },
            "sampler": { "iters": 2000, "burn_in": 400 }
        }"#,
    );
    let out = cggm(
        &["estimate", "--config", &cfg, "--method", "GBE", "--seed", "9", "--emit-k"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "estimate.json")).unwrap();
    assert_eq!(json["acceptance_mean"].as_f64().unwrap(), 1.0);
    let k00 = json["k"].as_array().unwrap()[0].as_array().unwrap()[0].as_f64().unwrap();
    assert!(k00 > 0.5 && k00 < 6.0, "k00 = {k00}");
    assert_eq!(json["pd"], true);
}

#[test]
fn d_file_with_distributed_method_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let d = write(tmp.path(), "d.csv", "1,0\n0,1\n");
    let cfg = write(
        tmp.path(),
        "cfg.json",
        &format!(
            r#"{{ "data": {{ "n": 30 }}, "sampler": {{ "d_file": "{d}" }} }}"#
        ),
    );
    let out = cggm(
        &["estimate", "--preset", "cycle6-a", "--config", &cfg, "--method", "MBE-1hop"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("d_file"));
}

#[test]
fn config_rejects_unknown_fields_and_bad_vertices() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_field = write(tmp.path(), "bad1.json", r#"{ "modle": {} }"#);
    let out = cggm(&["check", "--config", &bad_field], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    // Vertex 0 violates the 1-based convention.
    let bad_vertex = write(
        tmp.path(),
        "bad2.json",
        r#"{
            "model": {
                "p": 2,
                "edges": [[0,1]],
                "vertex_classes": [[1],[2]],
                "edge_classes": [[[0,1]]]
            }
        }"#,
    );
    let out = cggm(&["check", "--config", &bad_vertex], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("outside 1..=2"));
}

#[test]
fn benchmark_reports_are_byte_identical_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = write(
        dir,
        "cfg.json",
        r#"{ "n_list": [30], "reps": 2, "methods": ["MBE-1hop", "GMLE"],
             "sampler": { "iters": 300, "burn_in": 100 } }"#,
    );
    let mut outputs = Vec::new();
    for (sub, workers) in [("r1", "1"), ("r2", "1"), ("r4", "4")] {
        std::fs::create_dir(dir.join(sub)).unwrap();
        let out = cggm(
            &[
                "benchmark", "--preset", "cycle6-a", "--config", &cfg, "--seed", "3",
                "--workers", workers, "--out", sub,
            ],
            dir,
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
        outputs.push((
            read(dir, &format!("{sub}/report_raw.csv")),
            read(dir, &format!("{sub}/report_aggregate.csv")),
            read(dir, &format!("{sub}/report_plot.csv")),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "same seed, same worker count");
    assert_eq!(outputs[0], outputs[2], "same seed, different worker count");
    // 2 methods × 2 reps = 4 raw rows after the header.
    assert_eq!(outputs[0].0.lines().count(), 5);
    assert!(outputs[0]
        .0
        .starts_with("scenario,method,hops,n,replicate,seed,nmse,wall_time_s,flags\n"));
}

#[test]
fn benchmark_timing_records_positive_walls() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = write(
        dir,
        "cfg.json",
        r#"{ "n_list": [30], "reps": 1, "methods": ["MBE-1hop"],
             "sampler": { "iters": 200, "burn_in": 50 } }"#,
    );
    let out = cggm(
        &["benchmark", "--preset", "cycle6-a", "--config", &cfg, "--timing"],
        dir,
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let raw = read(dir, "report_raw.csv");
    let row = raw.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let wall: f64 = fields[7].parse().unwrap();
    assert!(wall > 0.0, "wall = {wall}");
    assert!(fields[8].contains("cpu_s="), "flags = {}", fields[8]);
}

#[test]
fn check_validates_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cggm(&["check", "--preset", "cycle20-a"], tmp.path());
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(stdout.contains("p: 20"));
    assert!(stdout.contains("lambda_min"));
    assert!(stdout.contains("hops 1: max p_i = 3"));
}
