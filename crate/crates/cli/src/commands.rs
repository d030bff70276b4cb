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


use std::path::Path;

use serde_json::{json, Value};
use sparsedecomp::decomposition::{
    captured_edges, challenge_suite, check_dense_degeneration, cluster_graph, decompose_bounded, decompose_generic,
    decompose_sparse_lks, verify_bounded, verify_sparse, PipelineOptions, SparseDecomposition,
};
use sparsedecomp::embed::{
    embed_path_expander, embed_shrub_avoiding, embed_tree_reserve, greedy_embed, oracle, Embedding, ExpanderOptions,
};
use sparsedecomp::gap::{create_gap_generic, create_gap_lks, generic_index_bound, has_degree_gap, lks_index_bound, OmegaSequence};
use sparsedecomp::generators::{generate, Generated, GeneratorSpec};
use sparsedecomp::lks::{is_lks_min, lks_small_report, minimize_to_lks_min, LksParams};
use sparsedecomp::rational::{format_rational, parse_rational, qu};
use sparsedecomp::tree::all_trees;
use sparsedecomp::{ClauseReport, Graph, Partition};

use crate::config::{
    relation_warnings, DecomposeConfig, DecomposeMode, DecompositionFile, EmbedConfig, ReportConfig, VerifyConfig,
};
use crate::io::{read_json, require, write_json, write_side, CliError};
use crate::{Cli, Command, GapMode, Global};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Generate { io } => cmd_generate(g, require(&io.config, "--config")?, io.output.as_deref()),
        Command::Decompose { io, report } => cmd_decompose(
            g,
            require(&io.input, "--input")?,
            require(&io.config, "--config")?,
            io.output.as_deref(),
            report.as_deref(),
        ),
        Command::Verify { io, decomposition } => {
            cmd_verify(g, require(&io.input, "--input")?, decomposition, io.config.as_deref(), io.output.as_deref())
        }
        Command::Embed { io, report } => cmd_embed(
            g,
            require(&io.input, "--input")?,
            require(&io.config, "--config")?,
            io.output.as_deref(),
            report.as_deref(),
        ),
        Command::Report { io, decomposition } => {
            cmd_report(require(&io.input, "--input")?, decomposition, io.config.as_deref(), io.output.as_deref())
        }
        Command::Gap { io, mode, k, eta, omega_ratio, omega_count, omega_first } => {
            let omegas = OmegaSequence::with_ratio(parse_rational(omega_first)?, &parse_rational(omega_ratio)?, *omega_count)?;
            let eta = parse_rational(eta)?;
            cmd_gap(require(&io.input, "--input")?, *mode, *k, &eta, &omegas, io.output.as_deref())
        }
    }
}

/// Accepts a bare graph or a generator output `{"graph": ...}`.
fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let v: Value = read_json(path, "graph")?;
    let inner = match v {
        Value::Object(mut m) if m.contains_key("graph") => m.remove("graph").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(inner)
        .map_err(|e| CliError::new("schema", format!("graph {} is not valid: {e}", path.display())))
}

fn cmd_generate(g: &Global, config: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let mut spec: GeneratorSpec = read_json(config, "generator spec")?;
    if let Some(s) = g.seed {
        spec.seed = s;
    }
    let out: Generated = generate(&spec)?;
    log::info!("generated n={} e={}", out.graph.n(), out.graph.edge_count());
    write_json(output, &out)
}

fn tune(g: &Global, opts: &mut PipelineOptions) {
    if let Some(s) = g.seed {
        opts.finder.seed = s;
    }
    if let Some(c) = g.exact_cap {
        opts.finder.exact_cap = c;
    }
}

fn cmd_decompose(
    g: &Global,
    input: &Path,
    config: &Path,
    output: Option<&Path>,
    report: Option<&Path>,
) -> Result<(), CliError> {
    let graph = read_graph(input)?;
    let mut cfg: DecomposeConfig = read_json(config, "decompose config")?;
    tune(g, &mut cfg.pipeline);
    let warnings = relation_warnings(&cfg.params);
    for w in &warnings {
        log::warn!("{w}");
    }
    let mode = cfg.mode.name().to_string();
    let (file, rep) = match &cfg.mode {
        DecomposeMode::Bounded { prepartition } => {
            let pre = match prepartition {
                Some(p) => p.clone(),
                None => Partition::trivial(graph.all_vertices()),
            };
            let run = decompose_bounded(&graph, &pre, &cfg.params, &cfg.pipeline)?;
            let file = DecompositionFile {
                mode: mode.clone(),
                decomposition: SparseDecomposition { huge: Default::default(), bounded: run.decomposition },
                params: cfg.params.clone(),
                prepartition: pre,
                subgraph: None,
            };
            (file, json!({"mode": mode, "warnings": warnings, "accounting": run.accounting, "trace": run.trace}))
        }
        DecomposeMode::Lks { eta, omegas } => {
            let p = LksParams::new(cfg.params.k, eta.clone())?;
            let run = decompose_sparse_lks(&graph, &p, omegas, &cfg.params, &cfg.pipeline)?;
            sparse_outputs(&mode, warnings, run)
        }
        DecomposeMode::Generic { eta, omegas } => {
            let run = decompose_generic(&graph, eta, omegas, &cfg.params, &cfg.pipeline)?;
            sparse_outputs(&mode, warnings, run)
        }
    };
    log::info!(
        "{mode}: {} clusters, {} spots, |G_exp| = {}",
        file.decomposition.bounded.clusters.len(),
        file.decomposition.bounded.spots.len(),
        file.decomposition.bounded.g_exp.edge_count()
    );
    write_json(output, &file)?;
    write_side(report, output, &rep)
}

fn sparse_outputs(
    mode: &str,
    warnings: Vec<String>,
    run: sparsedecomp::decomposition::SparseRun,
) -> (DecompositionFile, Value) {
    let rep = json!({
        "mode": mode,
        "warnings": warnings,
        "index": run.index,
        "accounting": run.accounting,
        "trace": run.trace,
    });
    let file = DecompositionFile {
        mode: mode.to_string(),
        decomposition: run.decomposition,
        params: run.params,
        prepartition: run.prepartition,
        subgraph: Some(run.subgraph),
    };
    (file, rep)
}

/// The graph the decomposition describes, and whether it sits inside the input.
fn target(graph: &Graph, file: &DecompositionFile) -> (Graph, bool) {
    match &file.subgraph {
        Some(s) => (s.clone(), s.n() == graph.n() && s.is_subgraph_of(graph)),
        None => (graph.clone(), true),
    }
}

fn cmd_verify(
    g: &Global,
    input: &Path,
    decomposition: &Path,
    config: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let graph = read_graph(input)?;
    let file: DecompositionFile = read_json(decomposition, "decomposition")?;
    let mut cfg: VerifyConfig = match config {
        Some(p) => read_json(p, "verify config")?,
        None => VerifyConfig::default(),
    };
    if let Some(c) = g.exact_cap {
        cfg.options.finder.exact_cap = c;
    }
    let seed = g.seed.unwrap_or(0);
    cfg.options.finder.seed = seed;
    let (tg, inside) = target(&graph, &file);
    let mut r = ClauseReport::new();
    r.clause("subgraph_of_input", inside);
    if inside {
        let s = &file.decomposition;
        let challenges = challenge_suite(&tg, &s.bounded, &file.params, seed);
        r.count("challenges", challenges.len());
        if file.mode == "bounded" && s.huge.is_empty() {
            r.absorb("bounded", &verify_bounded(&tg, &s.bounded, &file.prepartition, &file.params, &challenges, &cfg.options));
        } else {
            r.absorb("sparse", &verify_sparse(&tg, s, &file.prepartition, &file.params, &challenges, &cfg.options));
        }
    }
    let out = json!({"passed": r.passed(), "failed": r.failed(), "report": r});
    log::info!("verify: {} clauses, {} failed", r.clauses.len(), r.failed().len());
    write_json(output, &out)
}

fn cmd_report(input: &Path, decomposition: &Path, config: Option<&Path>, output: Option<&Path>) -> Result<(), CliError> {
    let graph = read_graph(input)?;
    let file: DecompositionFile = read_json(decomposition, "decomposition")?;
    let cfg: ReportConfig = match config {
        Some(p) => read_json(p, "report config")?,
        None => ReportConfig::default(),
    };
    let (tg, inside) = target(&graph, &file);
    if !inside || file.decomposition.bounded.g_exp.n() != graph.n() {
        return Err(CliError::new("input", "decomposition does not belong to this graph"));
    }
    let s = &file.decomposition;
    let n = graph.n();
    let captured = captured_edges(&tg, s);
    let kept = captured.edges().into_iter().filter(|&(a, b)| tg.has_edge(a, b)).count();
    let uncaptured = tg.edge_count() - kept;
    let bound = file.params.uncaptured_bound(n);
    let cg = cluster_graph(&s.bounded, &file.params.gamma);
    let mut out = json!({
        "mode": file.mode,
        "n": n,
        "edges": graph.edge_count(),
        "removed_before_decomposition": graph.edge_count() - tg.edge_count(),
        "max_degree": graph.max_degree(),
        "huge": s.huge.len(),
        "clusters": s.bounded.clusters.len(),
        "cluster_size": s.bounded.cluster_size(),
        "spots": s.bounded.spots.len(),
        "g_reg_edges": s.bounded.g_reg.edge_count(),
        "g_exp_edges": s.bounded.g_exp.edge_count(),
        "avoiding": s.bounded.avoiding.len(),
        "captured": kept,
        "uncaptured": uncaptured,
        "uncaptured_bound": format_rational(&bound),
        "uncaptured_within_bound": qu(uncaptured) <= bound,
        "cluster_graph": cg.check_bounds(s, &file.params),
        "warnings": relation_warnings(&file.params),
    });
    if let Some(d) = &cfg.dense {
        out["dense"] = serde_json::to_value(check_dense_degeneration(&tg, s, &file.params, &d.a, &d.c))
            .map_err(|e| CliError::new("runtime", e.to_string()))?;
    }
    write_json(output, &out)
}

fn no_embedding(what: &str) -> CliError {
    CliError::new("no_embedding", format!("{what} found no embedding"))
}

fn cmd_embed(
    g: &Global,
    input: &Path,
    config: &Path,
    output: Option<&Path>,
    report: Option<&Path>,
) -> Result<(), CliError> {
    let host = read_graph(input)?;
    let cfg: EmbedConfig = read_json(config, "embed config")?;
    let seed = g.seed.unwrap_or(0);
    let with_cap = |mut f: sparsedecomp::spots::FinderConfig| {
        if let Some(c) = g.exact_cap {
            f.exact_cap = c;
        }
        f.seed = seed;
        f
    };
    match cfg {
        EmbedConfig::Greedy { tree } => {
            let t = tree.build()?;
            let e = greedy_embed(&t, &host).ok_or_else(|| no_embedding("greedy embedding"))?;
            write_json(output, &e)
        }
        EmbedConfig::Exhaustive { tree } => {
            let t = tree.build()?;
            let e = oracle::find_tree_copy(&host, &t).ok_or_else(|| no_embedding("exhaustive search"))?;
            write_json(output, &e)
        }
        EmbedConfig::PathExpander { k, gamma, rho, finder } => {
            let opts = ExpanderOptions { finder: with_cap(finder), seed };
            let run = embed_path_expander(k, &host, &gamma, &rho, &opts)?;
            let e = run.embedding.clone().ok_or_else(|| no_embedding("look-ahead path embedding"))?;
            write_json(output, &e)?;
            write_side(report, output, &json!({"certification": run.certification, "steps": run.steps}))
        }
        EmbedConfig::ShrubAvoiding { tree, spots, avoiding, anchor, used, params } => {
            let t = tree.build()?;
            let e = embed_shrub_avoiding(&t, &host, &spots, &avoiding, anchor, &used, &params)?
                .ok_or_else(|| no_embedding("avoiding-set shrub embedding"))?;
            write_json(output, &e)
        }
        EmbedConfig::Reserve { tree, seeds, params, finder } => {
            let t = tree.build()?;
            let seeds = seeds.unwrap_or_else(|| host.all_vertices());
            let opts = ExpanderOptions { finder: with_cap(finder), seed };
            let run = embed_tree_reserve(&t, &host, &seeds, &params, &opts)?;
            let e: Embedding = run.embedding.clone().ok_or_else(|| no_embedding("reserve-set embedding"))?;
            write_json(output, &e)?;
            let mut side = serde_json::to_value(&run).map_err(|e| CliError::new("runtime", e.to_string()))?;
            if let Value::Object(m) = &mut side {
                m.remove("embedding");
            }
            write_side(report, output, &side)
        }
        EmbedConfig::Sweep { k_max } => {
            if k_max > 10 {
                return Err(CliError::new("input", "sweeps are capped at k_max = 10"));
            }
            let mut per_k = Vec::new();
            let (mut total, mut hits) = (0usize, 0usize);
            for k in 1..=k_max {
                let trees = all_trees(k)?;
                let ok = trees.iter().filter(|t| greedy_embed(t, &host).is_some_and(|e| e.is_valid_copy(t, &host))).count();
                total += trees.len();
                hits += ok;
                per_k.push(json!({"k": k, "trees": trees.len(), "embedded": ok, "rate": rate(ok, trees.len())}));
            }
            let min_degree = host.min_degree();
            write_json(output, &json!({"min_degree": min_degree, "per_k": per_k, "rate": rate(hits, total)}))
        }
    }
}

fn rate(a: usize, b: usize) -> String {
    if b == 0 {
        return "1".into();
    }
    format_rational(&sparsedecomp::rational::q(a as i64, b as i64))
}

fn cmd_gap(
    input: &Path,
    mode: GapMode,
    k: usize,
    eta: &sparsedecomp::Q,
    omegas: &OmegaSequence,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let graph = read_graph(input)?;
    let n = graph.n();
    let mut checks = ClauseReport::new();
    let (res, bound) = match mode {
        GapMode::Generic => {
            let res = create_gap_generic(&graph, k, eta, omegas)?;
            let lost = qu(res.removed_edges.len());
            checks.clause("edge_loss_within_eta_kn", lost <= eta * qu(k) * qu(n));
            (res, generic_index_bound(eta))
        }
        GapMode::Lks => {
            let p = LksParams::new(k, eta.clone())?;
            let start = if is_lks_min(&graph, &p) { graph.clone() } else { minimize_to_lks_min(&graph, &p)? };
            checks.count("minimized", start.edge_count() != graph.edge_count());
            let res = create_gap_lks(&start, &p, omegas)?;
            checks.absorb("lks_small", &lks_small_report(&res.subgraph, &p.halved()));
            (res, lks_index_bound(eta))
        }
    };
    checks
        .clause("degree_gap", has_degree_gap(&res.subgraph, k, omegas, res.star_index))
        .clause("index_within_bound", res.star_index <= bound)
        .count("index_bound", bound)
        .count("removed_edges", res.removed_edges.len());
    write_json(output, &json!({"result": res, "checks": checks}))
}
