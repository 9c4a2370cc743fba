//! Greedy edge-augmentation heuristics for raising welfare under a budget.
//!
//! Every heuristic repeatedly picks one or two new edges from the current
//! state, repairs the choice when it collides with an existing edge, and
//! feeds the edge to an [`AccessModel`] that refreshes its estimates
//! incrementally. Estimates are never rebuilt during a run.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{build_ensemble, SampleEnsemble};
use crate::error::{Error, Result};
use crate::estimate::{AccessEstimate, AccessMatrix, ExactAccess, TransmissionProbability};
use crate::graph::{graph_diameter_pair, EdgeKey, Graph, NodeId};
use crate::measures::{advantage, welfare, AdvantageVector};
use crate::oracle::exact_access_oracle;

/// Salt separating the heuristic's random stream from the coin seed.
const STREAM_SALT: u64 = 0x243f_6a88_85a3_08d3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicKind {
    Rand,
    BcChord,
    BcOne,
    BcBoth,
    Infl,
    DiamChord,
    DiamBoth,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 7] = [
        HeuristicKind::Rand,
        HeuristicKind::BcChord,
        HeuristicKind::BcOne,
        HeuristicKind::BcBoth,
        HeuristicKind::Infl,
        HeuristicKind::DiamChord,
        HeuristicKind::DiamBoth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HeuristicKind::Rand => "rand",
            HeuristicKind::BcChord => "bc-chord",
            HeuristicKind::BcOne => "bc-one",
            HeuristicKind::BcBoth => "bc-both",
            HeuristicKind::Infl => "infl",
            HeuristicKind::DiamChord => "diam-chord",
            HeuristicKind::DiamBoth => "diam-both",
        }
    }

    /// Edges consumed per step.
    pub fn edges_per_step(self) -> usize {
        match self {
            HeuristicKind::BcBoth | HeuristicKind::DiamBoth => 2,
            _ => 1,
        }
    }

    /// Heuristics that connect nodes to a fixed center.
    pub fn targets_center(self) -> bool {
        matches!(
            self,
            HeuristicKind::BcOne
                | HeuristicKind::BcBoth
                | HeuristicKind::Infl
                | HeuristicKind::DiamBoth
        )
    }

    /// Whether selection reads access estimates (as opposed to hop distances
    /// or the random stream).
    pub fn reads_estimates(self) -> bool {
        matches!(
            self,
            HeuristicKind::BcChord | HeuristicKind::BcOne | HeuristicKind::BcBoth | HeuristicKind::Infl
        )
    }

    pub fn check_budget(self, budget: usize) -> Result<()> {
        if !budget.is_multiple_of(self.edges_per_step()) {
            return Err(Error::InvalidArgument(format!(
                "{self} adds two edges per step and needs an even budget, got {budget}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        HeuristicKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown heuristic {s:?}")))
    }
}

/// A graph together with access probabilities that track edge insertions.
pub trait AccessModel {
    type Matrix: AccessMatrix;

    fn graph(&self) -> &Graph;

    fn snapshot(&self) -> Self::Matrix;

    /// Adds `e` to the graph and refreshes the probabilities.
    fn insert_edge(&mut self, e: EdgeKey) -> Result<()>;
}

impl AccessModel for SampleEnsemble {
    type Matrix = AccessEstimate;

    fn graph(&self) -> &Graph {
        SampleEnsemble::graph(self)
    }

    fn snapshot(&self) -> AccessEstimate {
        self.estimate()
    }

    fn insert_edge(&mut self, e: EdgeKey) -> Result<()> {
        self.add_edge(e)
    }
}

/// Exact probabilities recomputed by enumeration after every insertion.
/// Only viable for graphs within the oracle's edge cap.
#[derive(Clone, Debug)]
pub struct ExactModel {
    graph: Graph,
    alpha: TransmissionProbability,
    edge_cap: usize,
    current: ExactAccess,
}

impl ExactModel {
    pub fn new(g: &Graph, alpha: TransmissionProbability, edge_cap: usize) -> Result<Self> {
        Ok(ExactModel {
            graph: g.clone(),
            alpha,
            edge_cap,
            current: exact_access_oracle(g, alpha, edge_cap)?,
        })
    }
}

impl AccessModel for ExactModel {
    type Matrix = ExactAccess;

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn snapshot(&self) -> ExactAccess {
        self.current.clone()
    }

    fn insert_edge(&mut self, e: EdgeKey) -> Result<()> {
        let mut g = self.graph.clone();
        g.add_edge(e)?;
        self.current = exact_access_oracle(&g, self.alpha, self.edge_cap)?;
        self.graph = g;
        Ok(())
    }
}

/// Lowest id among the maxima of `values`.
fn argmax_first(values: &[f64]) -> NodeId {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    NodeId::from(best)
}

/// Lowest id among the minima of `values`.
fn argmin_first(values: &[f64]) -> NodeId {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    NodeId::from(best)
}

/// Node with maximum broadcast, lowest id on ties.
pub fn select_center<M: AccessMatrix + ?Sized>(m: &M) -> Result<NodeId> {
    Ok(argmax_first(&advantage(m)?.broadcast))
}

/// Nodes by descending score, ascending id among equals.
fn ranking(scores: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..scores.len()).map(NodeId::from).collect();
    order.sort_by(|a, b| {
        scores[b.index()]
            .total_cmp(&scores[a.index()])
            .then(a.cmp(b))
    });
    order
}

/// Eccentricities, for the BFS-only heuristics. `u32::MAX` when disconnected.
fn eccentricities(g: &Graph) -> Vec<u32> {
    g.nodes()
        .map(|v| g.bfs_distances(v).into_iter().max().unwrap_or(0))
        .collect()
}

/// State available when repairing a colliding candidate.
pub struct CollisionContext<'a> {
    pub graph: &'a Graph,
    /// Fallback targets for center-bound edges, best first.
    pub center_order: &'a [NodeId],
    pub rng: &'a mut ChaCha8Rng,
}

fn legal(g: &Graph, a: NodeId, b: NodeId) -> Option<EdgeKey> {
    EdgeKey::new(a, b).ok().filter(|&e| !g.has_edge(e))
}

fn saturated(g: &Graph, v: NodeId) -> bool {
    g.degree(v) + 1 >= g.node_count()
}

/// Repairs a candidate `(u, w)` that is a self-loop or an existing edge.
///
/// Center-bound heuristics keep `u` and walk down `center_order` until they
/// reach a non-neighbor of `u`. Chord and random heuristics keep one endpoint
/// (chosen by a fair coin) and redraw the other uniformly among the legal
/// choices, falling back to keeping the other endpoint if the first is
/// adjacent to everything. `None` means no legal edge exists for `u`.
pub fn resolve_collision(
    kind: HeuristicKind,
    candidate: (NodeId, NodeId),
    ctx: &mut CollisionContext<'_>,
) -> Option<EdgeKey> {
    let (u, w) = candidate;
    let g = ctx.graph;
    if let Some(e) = legal(g, u, w) {
        return Some(e);
    }
    if kind.targets_center() {
        return ctx
            .center_order
            .iter()
            .find_map(|&x| legal(g, u, x));
    }
    let (first, second) = if ctx.rng.random_bool(0.5) { (u, w) } else { (w, u) };
    for keep in [first, second] {
        if saturated(g, keep) {
            continue;
        }
        let choices: Vec<NodeId> = g
            .nodes()
            .filter(|&x| legal(g, keep, x).is_some())
            .collect();
        let x = choices[ctx.rng.random_range(0..choices.len())];
        return EdgeKey::new(keep, x).ok();
    }
    None
}

/// Welfare and advantage minima at one point of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub welfare: f64,
    pub min_broadcast: f64,
    pub min_influence: f64,
}

impl StepMetrics {
    pub fn from_matrix<M: AccessMatrix + ?Sized>(m: &M) -> Result<Self> {
        let adv = advantage(m)?;
        Ok(Self::from_advantage(&adv, welfare(m)?.value))
    }

    fn from_advantage(adv: &AdvantageVector, welfare: f64) -> Self {
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        StepMetrics {
            welfare,
            min_broadcast: min(&adv.broadcast),
            min_influence: min(&adv.influence),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: usize,
    pub edges: Vec<EdgeKey>,
    /// Edges added since the start of the run, including this step.
    pub total_edges: usize,
    pub after: StepMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    /// No legal edge existed for `node`; the budget slot was spent unused.
    Skipped { step: usize, node: NodeId },
    /// The graph became complete before the budget ran out.
    Complete { step: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionTrace {
    pub heuristic: HeuristicKind,
    pub budget: usize,
    pub center: Option<NodeId>,
    pub initial: StepMetrics,
    pub steps: Vec<StepRecord>,
    pub events: Vec<TraceEvent>,
}

impl InterventionTrace {
    pub fn added_edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.steps.iter().flat_map(|s| s.edges.iter().copied())
    }

    pub fn final_metrics(&self) -> StepMetrics {
        self.steps.last().map_or(self.initial, |s| s.after)
    }
}

/// Runs `kind` on `model` until `budget` edges are spent or the graph is
/// complete. `observer` sees the model after every step.
pub fn augment<M, F>(
    model: &mut M,
    kind: HeuristicKind,
    budget: usize,
    seed: u64,
    mut observer: F,
) -> Result<InterventionTrace>
where
    M: AccessModel,
    F: FnMut(&StepRecord, &M) -> Result<()>,
{
    kind.check_budget(budget)?;
    if !model.graph().is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ STREAM_SALT);
    let mut current = model.snapshot();
    let adv = advantage(&current)?;
    let initial = StepMetrics::from_advantage(&adv, welfare(&current)?.value);

    // the center and its fallback order are fixed from the initial graph
    let (center, center_order) = match kind {
        HeuristicKind::DiamBoth => {
            let ecc: Vec<f64> = eccentricities(model.graph())
                .into_iter()
                .map(|e| -f64::from(e))
                .collect();
            let order = ranking(&ecc);
            (Some(order[0]), order)
        }
        k if k.targets_center() => {
            let order = ranking(&adv.broadcast);
            (Some(order[0]), order)
        }
        _ => (None, Vec::new()),
    };

    let mut trace = InterventionTrace {
        heuristic: kind,
        budget,
        center,
        initial,
        steps: Vec::new(),
        events: Vec::new(),
    };
    let per_step = kind.edges_per_step();
    let mut spent = 0;
    let mut total_edges = 0;
    let mut step = 0;
    while spent + per_step <= budget {
        if model.graph().is_complete() {
            trace.events.push(TraceEvent::Complete { step: step + 1 });
            break;
        }
        step += 1;
        let candidates = propose(kind, model.graph(), &current, center, &mut rng)?;
        let mut edges = Vec::with_capacity(candidates.len());
        for cand in candidates {
            let mut ctx = CollisionContext {
                graph: model.graph(),
                center_order: &center_order,
                rng: &mut rng,
            };
            match resolve_collision(kind, cand, &mut ctx) {
                Some(e) => {
                    model.insert_edge(e)?;
                    edges.push(e);
                }
                None => trace.events.push(TraceEvent::Skipped { step, node: cand.0 }),
            }
        }
        spent += per_step;
        total_edges += edges.len();
        current = model.snapshot();
        let record = StepRecord {
            step,
            edges,
            total_edges,
            after: StepMetrics::from_matrix(&current)?,
        };
        observer(&record, model)?;
        trace.steps.push(record);
    }
    Ok(trace)
}

/// Candidate edges for one step, before collision repair.
fn propose<M: AccessMatrix>(
    kind: HeuristicKind,
    g: &Graph,
    current: &M,
    center: Option<NodeId>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count();
    let center = || center.expect("center-bound heuristic without a center");
    Ok(match kind {
        HeuristicKind::Rand => {
            let u = NodeId::from(rng.random_range(0..n));
            let v = NodeId::from(rng.random_range(0..n));
            vec![(u, v)]
        }
        HeuristicKind::BcChord => {
            let (a, b) = welfare(current)?.pair;
            vec![(a, b)]
        }
        HeuristicKind::BcOne => {
            let (a, b) = welfare(current)?.pair;
            let broadcast = advantage(current)?.broadcast;
            // a < b, so ties keep a
            let u = if broadcast[b.index()] < broadcast[a.index()] { b } else { a };
            vec![(u, center())]
        }
        HeuristicKind::BcBoth => {
            let (a, b) = welfare(current)?.pair;
            vec![(a, center()), (b, center())]
        }
        HeuristicKind::Infl => {
            let u = argmin_first(&advantage(current)?.influence);
            vec![(u, center())]
        }
        HeuristicKind::DiamChord => {
            let (a, b, _) = graph_diameter_pair(g)?;
            vec![(a, b)]
        }
        HeuristicKind::DiamBoth => {
            let (a, b, _) = graph_diameter_pair(g)?;
            vec![(a, center()), (b, center())]
        }
    })
}

/// Builds an ensemble on `g` and runs `kind` on it.
pub fn run_augmentation(
    g: &Graph,
    kind: HeuristicKind,
    budget: usize,
    alpha: TransmissionProbability,
    samples: u32,
    seed: u64,
) -> Result<(InterventionTrace, Graph)> {
    kind.check_budget(budget)?;
    let mut ens = build_ensemble(g, alpha, samples, seed)?;
    let trace = augment(&mut ens, kind, budget, seed, |_, _| Ok(()))?;
    Ok((trace, ens.graph().clone()))
}
