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

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Named pass/fail clauses plus measured quantities. Serialized as
/// `{"clauses": {...}, "counts": {...}}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClauseReport {
    pub clauses: BTreeMap<String, bool>,
    pub counts: BTreeMap<String, Value>,
}

impl ClauseReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clause(&mut self, name: &str, ok: bool) -> &mut Self {
        self.clauses.insert(name.to_string(), ok);
        self
    }

    pub fn count(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.counts.insert(name.to_string(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.clauses.get(name).copied()
    }

    pub fn passed(&self) -> bool {
        self.clauses.values().all(|&b| b)
    }

    pub fn failed(&self) -> Vec<String> {
        self.clauses.iter().filter(|(_, &ok)| !ok).map(|(k, _)| k.clone()).collect()
    }

    /// Copies every clause and count of `other` under `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: &ClauseReport) {
        for (k, v) in &other.clauses {
            self.clauses.insert(format!("{prefix}.{k}"), *v);
        }
        for (k, v) in &other.counts {
            self.counts.insert(format!("{prefix}.{k}"), v.clone());
        }
    }
}
