use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use corrcolor::cover::{random_cover, CoverMode};
use corrcolor::graph::{self, Graph};
use corrcolor::Cover;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrcolor"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_graph_cycle() {
    let out = run(&["gen-graph", "cycle", "--n", "6"]);
    assert!(out.status.success());
    let g: Graph = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g, graph::cycle(6).unwrap());
    assert_eq!(run(&["gen-graph", "cycle", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn documents_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let out = run(&["gen-graph", "regular", "--n", "30", "--d", "4", "--seed", "2", "--out", s(&g)]);
    assert!(out.status.success());
    let c = dir.path().join("c.json");
    assert!(run(&["gen-cover", "--graph", s(&g), "--k", "5", "--seed", "3", "--out", s(&c)])
        .status
        .success());
    let text = std::fs::read_to_string(&c).unwrap();
    let cover: Cover = serde_json::from_str(&text).unwrap();
    assert_eq!(corrcolor::io::to_json(&cover), text);
    let graph: Graph = corrcolor::io::read_graph(&g).unwrap();
    assert_eq!(corrcolor::io::to_json(&graph), std::fs::read_to_string(&g).unwrap());
    assert!(corrcolor::manifest::manifest_path(&c).exists());
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &graph::path(3));
    let good = random_cover(&graph::path(3), 2, 0, CoverMode::Perfect).unwrap();
    let c = write(dir.path(), "c.json", &good);
    let out = run(&["validate", "--graph", s(&g), "--cover", s(&c)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ok"], true);

    // colors of vertices 0 and 2 matched, but 02 is not an edge
    let bad = serde_json::json!({
        "k_per_vertex": [2, 2, 2],
        "lists": [[0, 1], [2, 3], [4, 5]],
        "matchings": {"0,1": [[0, 2]], "0,2": [[1, 4]]}
    });
    let c = write(dir.path(), "bad.json", &bad);
    let out = run(&["validate", "--graph", s(&g), "--cover", s(&c)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["ok"], false);
    assert!(v["violations"][0].as_str().unwrap().contains("condition 1 violated"));
}

#[test]
fn validate_checks_a_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &graph::path(2));
    let c = write(
        dir.path(),
        "c.json",
        &serde_json::json!({"k_per_vertex": [2, 2], "lists": [[0, 1], [2, 3]], "matchings": {"0,1": [[0, 2], [1, 3]]}}),
    );
    let good = write(dir.path(), "good.json", &serde_json::json!({"chosen": [0, 3]}));
    let bad = write(dir.path(), "bad.json", &serde_json::json!({"chosen": [0, 2]}));
    let out = run(&["validate", "--graph", s(&g), "--cover", s(&c), "--coloring", s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["validate", "--graph", s(&g), "--cover", s(&c), "--coloring", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["coloring_violation"]["kind"], "conflict");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run(&["validate", "--graph", s(&missing), "--cover", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing.json"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);

    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(2));

    let g = dir.path().join("g.json");
    std::fs::write(&g, "{\"n\": 3, \"edges\": [[0, 3]]}").unwrap();
    let out = run(&["gen-cover", "--graph", s(&g), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nibble_rejects_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = graph::complete(3);
    let g = write(dir.path(), "g.json", &k3);
    let c = write(dir.path(), "c.json", &random_cover(&k3, 3, 0, CoverMode::Perfect).unwrap());
    let out = run(&["nibble", "--graph", s(&g), "--cover", s(&c)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
}

#[test]
fn solve_shifted_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &graph::cycle(6).unwrap());
    let c = dir.path().join("c.json");
    assert!(run(&["gen-cover", "--shifted-cycle", "6", "--out", s(&c)]).status.success());
    let out = run(&["solve", "--graph", s(&g), "--cover", s(&c)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "not_colorable");
    assert!(v.get("coloring").is_none());
    let v = json(&run(&["solve", "--graph", s(&g), "--cover", s(&c), "--count"]));
    assert_eq!(v["count"], 0);

    let out = run(&["solve", "--graph", s(&g), "--cover", s(&c), "--node-budget", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "budget_exceeded");
}

#[test]
fn solve_with_restriction() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = graph::cycle(4).unwrap();
    let g = write(dir.path(), "g.json", &c4);
    let lists = write(dir.path(), "l.json", &vec![vec![1, 2]; 4]);
    let out = run(&["lift", "--graph", s(&g), "--lists", s(&lists)]);
    assert!(out.status.success());
    let lifted = json(&out);
    for (_, pairs) in lifted["cover"]["matchings"].as_object().unwrap() {
        assert_eq!(pairs.as_array().unwrap().len(), 2);
    }
    let c = write(dir.path(), "c.json", &lifted["cover"]);
    let v = json(&run(&["solve", "--graph", s(&g), "--cover", s(&c), "--count"]));
    assert_eq!(v["count"], 2);
    // forcing label 1 on adjacent vertices 0 and 1
    let r = write(dir.path(), "r.json", &vec![vec![0], vec![2], vec![4, 5], vec![6, 7]]);
    let v = json(&run(&["solve", "--graph", s(&g), "--cover", s(&c), "--restrict", s(&r)]));
    assert_eq!(v["status"], "not_colorable");
    let r = write(dir.path(), "r2.json", &vec![vec![0], vec![3], vec![4, 5], vec![6, 7]]);
    let v = json(&run(&["solve", "--graph", s(&g), "--cover", s(&c), "--restrict", s(&r)]));
    assert_eq!(v["coloring"], serde_json::json!([0, 3, 4, 7]));
}

#[test]
fn lb_experiment_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &graph::cycle(4).unwrap());
    let w = dir.path().join("w.json");
    let csv = dir.path().join("t.csv");
    let out_path = dir.path().join("r.json");
    let out = run(&[
        "lb-experiment", "--graph", s(&g), "--k", "2", "--trials", "200", "--seed", "7",
        "--witness-out", s(&w), "--csv", s(&csv), "--out", s(&out_path),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(report["trials"], 200);
    assert_eq!(report["expected_colorings_rational"], "1");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 201);
    let witness: corrcolor::first_moment::Witness =
        serde_json::from_slice(&std::fs::read(&w).unwrap()).unwrap();
    assert!(witness.replay(Default::default()).is_ok());
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(corrcolor::manifest::manifest_path(&out_path)).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "lb-experiment");
    assert_eq!(manifest["params"]["trials"], 200);
}

#[test]
fn stats_match_an_independent_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let pg = graph::petersen();
    let cover = random_cover(&pg, 5, 9, CoverMode::Perfect).unwrap();
    let p_hat = 0.3;
    let weights: Vec<f64> = (0..cover.num_colors())
        .map(|x| match x % 7 {
            0 => 0.0,
            1 => p_hat,
            r => 0.02 * r as f64 + 0.001 * x as f64 % 0.05,
        })
        .collect();
    let g = write(dir.path(), "g.json", &pg);
    let c = write(dir.path(), "c.json", &cover);
    let w = write(dir.path(), "w.json", &serde_json::json!({"p_hat": p_hat, "p": weights}));
    let out = run(&["stats", "--graph", s(&g), "--cover", s(&c), "--weights", s(&w)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);

    let moderate = |x: usize| weights[x] > 0.0 && weights[x] < p_hat;
    for row in v["vertices"].as_array().unwrap() {
        let vtx = row["vertex"].as_u64().unwrap() as usize;
        let list = cover.list(vtx);
        let p: f64 = list.iter().rev().map(|&x| weights[x]).sum();
        let pm: f64 = list.iter().rev().filter(|&&x| moderate(x)).map(|&x| weights[x]).sum();
        let q: f64 = list
            .iter()
            .rev()
            .filter(|&&x| weights[x] > 0.0)
            .map(|&x| weights[x] * (1.0 / weights[x]).ln())
            .sum();
        assert!((row["p"].as_f64().unwrap() - p).abs() < 1e-12);
        assert!((row["p_m"].as_f64().unwrap() - pm).abs() < 1e-12);
        assert!((row["q"].as_f64().unwrap() - q).abs() < 1e-12);
    }
    for row in v["edges"].as_array().unwrap() {
        let (a, b) = (row["u"].as_u64().unwrap() as usize, row["v"].as_u64().unwrap() as usize);
        // pairs found through color_neighbors rather than the stored matching
        let mut p = 0.0;
        let mut pm = 0.0;
        for &y in cover.list(b).iter().rev() {
            for &x in cover.color_neighbors(y) {
                if cover.owner(x) == Some(a) {
                    p += weights[x] * weights[y];
                    if moderate(x) && moderate(y) {
                        pm += weights[x] * weights[y];
                    }
                }
            }
        }
        assert!((row["p"].as_f64().unwrap() - p).abs() < 1e-12);
        assert!((row["p_m"].as_f64().unwrap() - pm).abs() < 1e-12);
    }
    assert!(v["nice"].is_null() || v["nice"].is_f64());
}

#[test]
fn stats_rejects_out_of_range_weights() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &graph::path(2));
    let c = write(dir.path(), "c.json", &random_cover(&graph::path(2), 1, 0, CoverMode::Perfect).unwrap());
    let w = write(dir.path(), "w.json", &serde_json::json!({"p_hat": 0.5, "p": [0.7, 0.1]}));
    let out = run(&["stats", "--graph", s(&g), "--cover", s(&c), "--weights", s(&w)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nibble_success_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert!(run(&["gen-graph", "regular", "--n", "200", "--d", "12", "--seed", "3", "--triangle-free", "--out", s(&g)])
        .status
        .success());
    let c = dir.path().join("c.json");
    assert!(run(&["gen-cover", "--graph", s(&g), "--k", "30", "--seed", "3", "--out", s(&c)])
        .status
        .success());
    let t = dir.path().join("t.csv");
    let out = run(&["nibble", "--graph", s(&g), "--cover", s(&c), "--seed", "3", "--trace", s(&t)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["status"]["kind"], "success");
    let chosen: corrcolor::Coloring = serde_json::from_value(report["coloring"].clone()).unwrap();
    let graph = corrcolor::io::read_graph(&g).unwrap();
    let cover: Cover = corrcolor::io::read_json(&c).unwrap();
    assert!(corrcolor::solver::is_valid_coloring(&graph, &cover, &chosen).unwrap());
    let trace = std::fs::read_to_string(&t).unwrap();
    assert!(trace.starts_with("step,min_pv,max_pv,min_Q,max_deg,removed,retries\n"));
    // experiments without --out put the manifest on stderr
    let manifest: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["command"], "nibble");
}
