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

//! Regular pairs, the index of a pair of partitions, index pumping and
//! regularization of locally dense graphs.

mod index;
mod locally_dense;
mod pair;
mod pump;
mod vizing;

pub use index::{index, partition_regularity, GarbagePartition, PairPartitionState, PartitionRegularity};
pub use locally_dense::{
    account_uncaptured, regularize_locally_dense, round_budget, verify_locally_dense, within_max_clusters,
    EnsemblePartition, RegularizeOptions, RegularizeOutcome, DEFAULT_ROUND_CAP,
};
pub use pair::{
    check_pair, exact_regularity, heuristic_regularity, is_regular_pair, is_witness, RegularityVerdict, Witness,
    DEFAULT_REGULARITY_CAP,
};
pub use pump::{class_count_cap, pump, pump_gain, pump_simultaneous, PumpOutcome, SimultaneousOutcome};
pub use vizing::{vizing_matchings, PatternGraph};
