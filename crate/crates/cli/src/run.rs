//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use accessgap_core::augment::{augment, AccessModel, ExactModel, StepRecord};
use accessgap_core::ensemble::stability_over_seeds;
use accessgap_core::eval::{
    compare_runs, gap_report, BundleContext, MetricsBundle, PairSelection, EXACT_SIGNATURE_LIMIT,
};
use accessgap_core::export::{
    read_estimate_binary, write_access_csv, write_advantage_csv, write_estimate_binary,
    write_pair_values_csv, write_trace_csv,
};
use accessgap_core::measures::{access_centrality, access_centrality_exact, advantage, Control};
use accessgap_core::{
    build_ensemble, estimate_access, exact_access_oracle, largest_connected_component,
    load_edge_list, AccessMatrix, Error as CoreError, Graph, TransmissionProbability,
};
use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, DEFAULT_SIGNATURE_PAIRS};

#[derive(Serialize)]
struct InputInfo {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct GraphInfo {
    loaded_nodes: usize,
    loaded_edges: usize,
    self_loops_dropped: usize,
    duplicates_dropped: usize,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    input: &'a InputInfo,
    graph: &'a GraphInfo,
}

/// Input graph of a run plus what the manifest records about it.
pub struct Loaded {
    pub graph: Graph,
    hash: String,
    manifest_input: InputInfo,
    manifest_graph: GraphInfo,
}

pub fn load_input(cfg: &RunConfig) -> Result<Loaded> {
    let bytes = fs::read(&cfg.input)
        .with_context(|| format!("reading input {}", cfg.input.display()))?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let (full, report) = load_edge_list(bytes.as_slice())?;
    let graph = if cfg.lcc {
        largest_connected_component(&full)?
    } else {
        full.clone()
    };
    log::info!(
        "loaded {} nodes, {} edges; working graph {} nodes, {} edges",
        full.node_count(),
        full.edge_count(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(Loaded {
        manifest_input: InputInfo {
            path: cfg.input.display().to_string(),
            sha256: hash.clone(),
            bytes: bytes.len(),
        },
        manifest_graph: GraphInfo {
            loaded_nodes: full.node_count(),
            loaded_edges: full.edge_count(),
            self_loops_dropped: report.self_loops,
            duplicates_dropped: report.duplicates,
            nodes: graph.node_count(),
            edges: graph.edge_count(),
        },
        graph,
        hash,
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn start(cfg: &RunConfig, command: &str) -> Result<Loaded> {
    let loaded = load_input(cfg)?;
    fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let manifest = Manifest {
        tool: "accessgap",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        input: &loaded.manifest_input,
        graph: &loaded.manifest_graph,
    };
    write_json(&cfg.output_dir, "manifest.json", &manifest)?;
    Ok(loaded)
}

fn alpha(cfg: &RunConfig) -> Result<TransmissionProbability> {
    Ok(TransmissionProbability::new(cfg.alpha)?)
}

fn pair_selection(cfg: &RunConfig, n: usize) -> PairSelection {
    match cfg.signature_pairs {
        Some(count) => PairSelection::Sampled {
            count,
            seed: cfg.seed,
        },
        None if n > EXACT_SIGNATURE_LIMIT && !cfg.exact_signatures => PairSelection::Sampled {
            count: DEFAULT_SIGNATURE_PAIRS,
            seed: cfg.seed,
        },
        None => PairSelection::All,
    }
}

fn context(cfg: &RunConfig, hash: &str, heuristic: Option<String>, k: usize) -> BundleContext {
    BundleContext {
        alpha: cfg.alpha,
        samples: (!cfg.exact).then_some(cfg.samples),
        seed: cfg.seed,
        input_hash: Some(hash.to_owned()),
        heuristic,
        k,
    }
}

#[derive(Serialize)]
struct AdvantageSummary {
    broadcast: accessgap_core::eval::GapReport,
    influence: accessgap_core::eval::GapReport,
}

fn write_access_outputs<M: AccessMatrix>(cfg: &RunConfig, g: &Graph, m: &M) -> Result<()> {
    let mut out = create(&cfg.output_dir, "access.csv")?;
    write_access_csv(g, m, &mut out)?;
    out.flush()?;
    let adv = advantage(m)?;
    let mut out = create(&cfg.output_dir, "advantage.csv")?;
    write_advantage_csv(g, &adv, None, &mut out)?;
    out.flush()?;
    let summary = AdvantageSummary {
        broadcast: gap_report(&adv.broadcast, "broadcast")?.relabel(g),
        influence: gap_report(&adv.influence, "influence")?.relabel(g),
    };
    write_json(&cfg.output_dir, "advantage.json", &summary)
}

pub fn estimate(cfg: &RunConfig) -> Result<()> {
    let loaded = start(cfg, "estimate")?;
    let g = &loaded.graph;
    if cfg.exact {
        let p = exact_access_oracle(g, alpha(cfg)?, cfg.edge_cap)?;
        return write_access_outputs(cfg, g, &p);
    }
    let est = estimate_access(g, alpha(cfg)?, cfg.samples, cfg.seed)?;
    write_access_outputs(cfg, g, &est)?;
    let mut out = create(&cfg.output_dir, "estimate.bin")?;
    write_estimate_binary(g, &est, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn oracle(cfg: &RunConfig) -> Result<()> {
    let loaded = start(cfg, "oracle")?;
    let p = exact_access_oracle(&loaded.graph, alpha(cfg)?, cfg.edge_cap)?;
    write_access_outputs(cfg, &loaded.graph, &p)
}

fn write_bundle<M: AccessMatrix>(
    cfg: &RunConfig,
    g: &Graph,
    m: &M,
    ctx: BundleContext,
) -> Result<MetricsBundle> {
    let k = ctx.k;
    let bundle = MetricsBundle::compute(g, m, ctx, pair_selection(cfg, g.node_count()))?;
    write_json(&cfg.output_dir, &format!("metrics_k{k}.json"), &bundle)?;
    if cfg.raw_distributions {
        let n = m.node_count();
        let mut out = create(&cfg.output_dir, &format!("signature_l1_k{k}.csv"))?;
        write_pair_values_csv(g, "l1", &bundle.signature_l1.distances, &mut out)?;
        out.flush()?;
        let mut out = create(&cfg.output_dir, &format!("access_k{k}.csv"))?;
        write_access_csv(g, m, &mut out)?;
        out.flush()?;
        log::debug!("wrote raw distributions for {n} nodes at k={k}");
    }
    Ok(bundle)
}

pub fn evaluate(cfg: &RunConfig, stored: Option<&Path>) -> Result<()> {
    let loaded = start(cfg, "evaluate")?;
    let g = &loaded.graph;
    let ctx = context(cfg, &loaded.hash, None, 0);
    if let Some(path) = stored {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let (labels, est) = read_estimate_binary(std::io::BufReader::new(f))?;
        if labels != g.labels() {
            bail!("stored estimate {} does not match the input graph's nodes", path.display());
        }
        let ctx = BundleContext {
            samples: Some(est.samples()),
            ..ctx
        };
        write_bundle(cfg, g, &est, ctx)?;
    } else if cfg.exact {
        let p = exact_access_oracle(g, alpha(cfg)?, cfg.edge_cap)?;
        write_bundle(cfg, g, &p, ctx)?;
    } else {
        let est = estimate_access(g, alpha(cfg)?, cfg.samples, cfg.seed)?;
        write_bundle(cfg, g, &est, ctx)?;
    }
    Ok(())
}

/// Metrics bundles due after a step: one whenever the edge count crosses a
/// multiple of `eval_every`.
fn crosses(before: usize, after: usize, every: usize) -> bool {
    after / every > before / every
}

fn run_augment<M: AccessModel>(cfg: &RunConfig, loaded: &Loaded, model: &mut M) -> Result<()> {
    let g0 = &loaded.graph;
    let name = Some(cfg.heuristic.to_string());
    let first = write_bundle(cfg, g0, &model.snapshot(), context(cfg, &loaded.hash, name.clone(), 0))?;
    let mut last_k = 0;
    let mut last = None;
    let mut failure = None;
    let trace = augment(model, cfg.heuristic, cfg.k, cfg.seed, |rec: &StepRecord, m: &M| {
        let k = rec.total_edges;
        if crosses(last_k, k, cfg.eval_every) {
            let ctx = context(cfg, &loaded.hash, name.clone(), k);
            match write_bundle(cfg, m.graph(), &m.snapshot(), ctx) {
                Ok(b) => last = Some(b),
                Err(e) => {
                    failure = Some(e);
                    return Err(CoreError::InvalidArgument(format!("metrics at k={k} failed")));
                }
            }
        }
        last_k = k;
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let trace = trace?;
    let final_k = trace.steps.last().map_or(0, |s| s.total_edges);
    let last = match last {
        Some(b) if b.context.k == final_k => b,
        _ if final_k == 0 => first.clone(),
        _ => {
            let ctx = context(cfg, &loaded.hash, name.clone(), final_k);
            write_bundle(cfg, model.graph(), &model.snapshot(), ctx)?
        }
    };
    write_json(&cfg.output_dir, "delta.json", &compare_runs(&first, &last)?)?;

    let mut out = create(&cfg.output_dir, "trace.csv")?;
    write_trace_csv(g0, &trace, &mut out)?;
    out.flush()?;
    write_json(&cfg.output_dir, "trace.json", &trace)?;
    let mut out = create(&cfg.output_dir, "augmented.edges")?;
    model.graph().write_edge_list(&mut out)?;
    out.flush()?;
    log::info!(
        "{}: added {final_k} edges, welfare {:.6} -> {:.6}",
        cfg.heuristic,
        trace.initial.welfare,
        trace.final_metrics().welfare
    );
    Ok(())
}

pub fn augment_cmd(cfg: &RunConfig) -> Result<()> {
    let loaded = start(cfg, "augment")?;
    if cfg.exact {
        let mut model = ExactModel::new(&loaded.graph, alpha(cfg)?, cfg.edge_cap)?;
        run_augment(cfg, &loaded, &mut model)
    } else {
        let mut model = build_ensemble(&loaded.graph, alpha(cfg)?, cfg.samples, cfg.seed)?;
        run_augment(cfg, &loaded, &mut model)
    }
}

#[derive(Serialize)]
struct StabilityReport {
    alpha: f64,
    samples: u32,
    seeds: Vec<u64>,
    max_dev: f64,
    mean_dev: f64,
}

pub fn stability(cfg: &RunConfig) -> Result<()> {
    let loaded = start(cfg, "stability")?;
    let seeds: Vec<u64> = (0..u64::from(cfg.reps)).map(|k| cfg.seed.wrapping_add(k)).collect();
    let s = stability_over_seeds(&loaded.graph, alpha(cfg)?, cfg.samples, &seeds)?;
    log::info!("max deviation {:.6}, mean deviation {:.6}", s.max_dev, s.mean_dev);
    write_json(
        &cfg.output_dir,
        "stability.json",
        &StabilityReport {
            alpha: cfg.alpha,
            samples: cfg.samples,
            seeds,
            max_dev: s.max_dev,
            mean_dev: s.mean_dev,
        },
    )
}

pub fn control(cfg: &RunConfig) -> Result<()> {
    let loaded = start(cfg, "control")?;
    let g = &loaded.graph;
    let targets = match &cfg.nodes {
        Some(labels) => labels
            .iter()
            .map(|&l| {
                g.node_by_label(l)
                    .with_context(|| format!("node {l} is not in the working graph"))
            })
            .collect::<Result<Vec<_>>>()?,
        None => g.nodes().collect(),
    };
    if cfg.exact {
        log::warn!(
            "control enumerates 2^{} live-edge sets {} times",
            g.edge_count(),
            targets.len() + 1
        );
    } else {
        log::warn!(
            "control re-estimates access once per node: {} estimations of {} samples on {} edges",
            2 * targets.len(),
            cfg.samples,
            g.edge_count()
        );
    }
    let a = alpha(cfg)?;
    let rows: Vec<Control> = targets
        .iter()
        .map(|&c| {
            if cfg.exact {
                access_centrality_exact(g, a, c, cfg.edge_cap)
            } else {
                access_centrality(g, a, cfg.samples, cfg.seed, c)
            }
        })
        .collect::<accessgap_core::Result<_>>()?;

    let mut out = create(&cfg.output_dir, "control.csv")?;
    writeln!(out, "node,cent_star,raw_sum,max_pair_control,min_raw_ratio")?;
    for c in &rows {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            g.label(c.node),
            c.cent_star,
            c.raw_sum,
            c.max_pair_control,
            c.min_raw_ratio
        )?;
    }
    out.flush()?;

    if targets.len() == g.node_count() {
        let adv = if cfg.exact {
            advantage(&exact_access_oracle(g, a, cfg.edge_cap)?)?
        } else {
            advantage(&estimate_access(g, a, cfg.samples, cfg.seed)?)?
        };
        let mut out = create(&cfg.output_dir, "advantage.csv")?;
        write_advantage_csv(g, &adv, Some(&rows), &mut out)?;
        out.flush()?;
    }
    Ok(())
}

pub fn compare(before: &Path, after: &Path, output: Option<&Path>) -> Result<()> {
    let read = |p: &Path| -> Result<MetricsBundle> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
    };
    let delta = compare_runs(&read(before)?, &read(after)?)?;
    let text = serde_json::to_string_pretty(&delta)? + "\n";
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
