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


//! `sparsedecomp` command-line tool. Every artifact is a JSON file; every
//! failure prints `{"error": {"kind": ..., "message": ...}}` to stderr and
//! exits nonzero.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod io;

use io::CliError;

#[derive(Parser, Debug)]
#[command(name = "sparsedecomp", version, about = "Sparse graph decomposition toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized step; overrides seeds in config files.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest candidate core handed to the exhaustive spot finder.
    #[arg(long, global = true)]
    pub exact_cap: Option<usize>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// Input graph (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a graph from a generator spec.
    Generate {
        #[command(flatten)]
        io: Io,
    },
    /// Decompose a graph (bounded, LKS or generic mode).
    Decompose {
        #[command(flatten)]
        io: Io,
        /// Where to write the run report; stdout when `--output` is a file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a decomposition clause by clause.
    Verify {
        #[command(flatten)]
        io: Io,
        /// Decomposition file written by `decompose`.
        #[arg(long)]
        decomposition: PathBuf,
    },
    /// Embed trees into the input graph.
    Embed {
        #[command(flatten)]
        io: Io,
        /// Where to write run diagnostics (path and reserve methods).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Summarize a decomposition: capture accounting and cluster graph bounds.
    Report {
        #[command(flatten)]
        io: Io,
        /// Decomposition file written by `decompose`.
        #[arg(long)]
        decomposition: PathBuf,
    },
    /// Run a degree-gap procedure.
    Gap {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        mode: GapMode,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eta: String,
        /// Ratio `Ω_j / Ω_{j+1}` of the geometric omega sequence.
        #[arg(long)]
        omega_ratio: String,
        #[arg(long)]
        omega_count: usize,
        #[arg(long, default_value = "3")]
        omega_first: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapMode {
    Generic,
    Lks,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::new("usage", e.to_string().trim()).emit(),
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPARSEDECOMP_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let run = || -> Result<(), CliError> {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.global.jobs {
            if j == 0 {
                return Err(CliError::new("usage", "--jobs must be at least 1"));
            }
            pool = pool.num_threads(j);
        }
        let pool = pool.build().map_err(|e| CliError::new("runtime", e.to_string()))?;
        pool.install(|| commands::dispatch(&cli))
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.emit(),
    }
}
