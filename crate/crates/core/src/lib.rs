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

//! Sparse graph decomposition: dense spots, regularity for locally dense
//! graphs, degree gaps and tree embedding.

pub mod decomposition;
pub mod embed;
pub mod error;
pub mod gap;
pub mod generators;
pub mod graph;
pub mod lks;
pub mod rational;
pub mod regularity;
pub mod report;
pub mod spots;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Partition, VertexSet};
pub use rational::Q;
pub use report::ClauseReport;
pub use tree::RootedTree;
