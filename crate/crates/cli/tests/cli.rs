// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


mod common;

use common::*;
use serde_json::{json, Value};
use sparsedecomp::generators::{generate, Generated, GeneratorSpec};
use sparsedecomp::tree::all_trees;
use sparsedecomp::Graph;

#[test]
fn generators_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let specs = [
        json!({"kind": "lks_extremal", "n": 12}),
        json!({"kind": "es_extremal", "n": 12, "k": 8}),
        json!({"kind": "random", "n": 40, "p": "1/5", "seed": 9}),
    ];
    for (i, spec) in specs.iter().enumerate() {
        let cfg = put(dir.path(), &format!("spec{i}.json"), spec);
        let out = ok(dir.path(), &["generate", "--config", cfg.to_str().unwrap()]);
        let parsed: Generated = serde_json::from_slice(&out.stdout).unwrap();
        let direct = generate(&serde_json::from_value::<GeneratorSpec>(spec.clone()).unwrap()).unwrap();
        assert_eq!(parsed, direct);
        let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(again.as_bytes(), out.stdout.as_slice());
    }
}

#[test]
fn seed_flag_overrides_spec_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = put(dir.path(), "spec.json", &json!({"kind": "random", "n": 30, "p": "1/3", "seed": 1}));
    let a = ok(dir.path(), &["generate", "--config", "spec.json", "--seed", "2"]);
    let b = ok(dir.path(), &["--seed", "2", "generate", "--config", cfg.to_str().unwrap()]);
    let c = ok(dir.path(), &["generate", "--config", "spec.json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn edgeless_graph_gives_empty_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "g.json", &serde_json::to_value(Graph::empty(15)).unwrap());
    put(dir.path(), "c.json", &bounded_config(3, 3));
    ok(dir.path(), &["decompose", "--input", "g.json", "--config", "c.json", "--output", "d.json", "--report", "r.json"]);
    let d = load(dir.path().join("d.json"));
    for key in ["huge", "avoiding"] {
        assert_eq!(d[key], json!([]), "{key}");
    }
    assert_eq!(d["spots"]["spots"], json!([]));
    assert_eq!(d["g_reg"]["edges"], json!([]));
    assert_eq!(d["g_exp"]["edges"], json!([]));
    let v = stdout_json(&ok(dir.path(), &["verify", "--input", "g.json", "--decomposition", "d.json"]));
    assert_eq!(v["passed"], json!(true), "{v}");
}

fn decompose_random(dir: &std::path::Path) {
    put(dir, "spec.json", &json!({"kind": "random", "n": 80, "p": "1/8", "seed": 4}));
    ok(dir, &["generate", "--config", "spec.json", "--output", "g.json"]);
    let maxdeg = load(dir.join("g.json"))["graph"]["edges"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|e| [e[0].as_u64().unwrap(), e[1].as_u64().unwrap()])
        .fold(vec![0u64; 80], |mut d, v| {
            d[v as usize] += 1;
            d
        })
        .into_iter()
        .max()
        .unwrap();
    put(dir, "c.json", &bounded_config(8, (maxdeg / 8 + 1).max(3)));
    ok(dir, &["decompose", "--input", "g.json", "--config", "c.json", "--output", "d.json", "--report", "r.json"]);
}

#[test]
fn decompose_verifies_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    decompose_random(dir.path());
    let v = stdout_json(&ok(dir.path(), &["verify", "--input", "g.json", "--decomposition", "d.json"]));
    assert_eq!(v["passed"], json!(true), "{}", v["failed"]);
    let r = load(dir.path().join("r.json"));
    assert_eq!(r["accounting"]["clauses"]["uncaptured_within_bound"], json!(true));
    let rep = stdout_json(&ok(dir.path(), &["report", "--input", "g.json", "--decomposition", "d.json"]));
    assert_eq!(rep["uncaptured_within_bound"], json!(true));
    assert_eq!(rep["n"], json!(80));
}

#[test]
fn fault_injection_fails_a_named_clause() {
    let dir = tempfile::tempdir().unwrap();
    decompose_random(dir.path());
    let mut d = load(dir.path().join("d.json"));
    // Put the first vertex of cluster 0 into cluster 1 as well.
    let v = d["clusters"][0][0].clone();
    d["clusters"][1].as_array_mut().unwrap().push(v);
    put(dir.path(), "bad.json", &d);
    let out = stdout_json(&ok(dir.path(), &["verify", "--input", "g.json", "--decomposition", "bad.json"]));
    assert_eq!(out["passed"], json!(false));
    let failed: Vec<&str> = out["failed"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(failed.contains(&"bounded.c2.disjoint"), "{failed:?}");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    decompose_random(a.path());
    decompose_random(b.path());
    for f in ["g.json", "d.json", "r.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn failures_print_error_objects() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");

    let out = run(dir.path(), &["generate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");

    let out = run(dir.path(), &["generate", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "io");

    std::fs::write(dir.path().join("broken.json"), "{\"n\": 4, \"edges\": [[0,").unwrap();
    put(dir.path(), "d.json", &json!({}));
    let out = run(dir.path(), &["verify", "--input", "broken.json", "--decomposition", "d.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "schema");

    put(dir.path(), "g.json", &serde_json::to_value(Graph::complete(4)).unwrap());
    let mut cfg = bounded_config(2, 3);
    cfg["params"]["gamma"] = json!(0.25);
    put(dir.path(), "float.json", &cfg);
    let out = run(dir.path(), &["decompose", "--input", "g.json", "--config", "float.json"]);
    assert_eq!(error_kind(&out), "schema");
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact rational"));
}

#[test]
fn complete_host_takes_every_tree() {
    let dir = tempfile::tempdir().unwrap();
    let k = 7;
    put(dir.path(), "g.json", &serde_json::to_value(Graph::complete(k)).unwrap());
    for (i, t) in all_trees(k).unwrap().into_iter().enumerate() {
        let name = format!("e{i}.json");
        put(dir.path(), &name, &json!({"method": "greedy", "tree": t}));
        let e = stdout_json(&ok(dir.path(), &["embed", "--input", "g.json", "--config", &name]));
        assert_eq!(e["map"].as_object().unwrap().len(), k);
    }
}

#[test]
fn embedding_failure_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    // A 3-regular host cannot hold the 5-star.
    put(dir.path(), "spec.json", &json!({"kind": "regular", "n": 20, "d": 3, "seed": 1}));
    ok(dir.path(), &["generate", "--config", "spec.json", "--output", "g.json"]);
    put(dir.path(), "e.json", &json!({"method": "exhaustive", "tree": {"shape": "star", "k": 5}}));
    let out = run(dir.path(), &["embed", "--input", "g.json", "--config", "e.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "no_embedding");
}

#[test]
fn sweep_reports_success_rates() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "spec.json", &json!({"kind": "regular", "n": 30, "d": 4, "seed": 2}));
    ok(dir.path(), &["generate", "--config", "spec.json", "--output", "g.json"]);
    put(dir.path(), "e.json", &json!({"method": "sweep", "k_max": 5}));
    let s = stdout_json(&ok(dir.path(), &["embed", "--input", "g.json", "--config", "e.json"]));
    // Minimum degree 4 = k - 1 for k = 5, so every tree of order at most 5 embeds.
    assert_eq!(s["rate"], json!("1"));
    let counts: Vec<u64> = s["per_k"].as_array().unwrap().iter().map(|r| r["trees"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 3]);
}

#[test]
fn seeded_reserve_runs_repeat() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "spec.json", &json!({"kind": "regular", "n": 4000, "d": 5, "seed": 11}));
    ok(dir.path(), &["generate", "--config", "spec.json", "--output", "g.json"]);
    let cfg = json!({
        "method": "reserve",
        "tree": {"shape": "complete_binary", "depth": 4},
        "params": {"gamma": "4/31", "rho": "4/31", "delta": "5/31", "q": 2, "retries": 20},
    });
    put(dir.path(), "e.json", &cfg);
    let args = ["embed", "--input", "g.json", "--config", "e.json", "--seed", "3", "--output", "a.json", "--report", "ar.json"];
    ok(dir.path(), &args);
    let again: Vec<&str> = args.iter().map(|a| match *a {
        "a.json" => "b.json",
        "ar.json" => "br.json",
        other => other,
    }).collect();
    ok(dir.path(), &again);
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("ar.json"), read("br.json"));
    let e = load(dir.path().join("a.json"));
    assert_eq!(e["map"].as_object().unwrap().len(), 31);
    assert_eq!(load(dir.path().join("ar.json"))["certification"], json!("exact"));
}

#[test]
fn gap_reports_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "spec.json", &json!({"kind": "random", "n": 100, "p": "1/2", "seed": 3}));
    ok(dir.path(), &["generate", "--config", "spec.json", "--output", "g.json"]);
    let generic = stdout_json(&ok(
        dir.path(),
        &["gap", "--input", "g.json", "--mode", "generic", "--k", "10", "--eta", "1/4", "--omega-ratio", "1/8", "--omega-count", "17"],
    ));
    let lks = stdout_json(&ok(
        dir.path(),
        &["gap", "--input", "g.json", "--mode", "lks", "--k", "25", "--eta", "1/25", "--omega-ratio", "1/62500", "--omega-count", "62502"],
    ));
    for out in [&generic, &lks] {
        let clauses = out["checks"]["clauses"].as_object().unwrap();
        assert!(clauses.values().all(|v| v == &Value::Bool(true)), "{clauses:?}");
        assert!(clauses.contains_key("degree_gap"));
    }
    assert!(lks["checks"]["clauses"].as_object().unwrap().contains_key("lks_small.member"));
}
