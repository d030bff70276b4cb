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


//! Helpers for driving the `sparsedecomp` binary from integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sparsedecomp")
}

/// Runs the binary inside `dir` with logging silenced.
pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env("SPARSEDECOMP_LOG", "off")
        .output()
        .expect("binary runs")
}

/// Runs and insists on exit status 0.
pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn put(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

pub fn load(path: impl AsRef<Path>) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// The error object a failing run prints on stderr.
pub fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object");
    v["error"]["kind"].as_str().expect("error.kind").to_string()
}

/// Decomposition parameters used across the CLI tests: γ=ε=1/4, ρ=1/10,
/// ν=1/50, Λ=2, b=k.
pub fn params(k: usize, omega_star: u64) -> Value {
    json!({
        "k": k, "gamma": "1/4", "eps": "1/4", "rho": "1/10", "nu": "1/50",
        "lambda": 2, "b": k, "omega_star": omega_star, "omega_star2": omega_star + 1, "s": 1,
    })
}

pub fn bounded_config(k: usize, omega_star: u64) -> Value {
    json!({"mode": "bounded", "params": params(k, omega_star)})
}
