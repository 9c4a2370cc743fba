//! Evaluation artifacts: advantage gaps, distribution summaries, signature
//! distances, and before/after comparisons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::AccessMatrix;
use crate::graph::{Graph, NodeId};
use crate::measures::{advantage, welfare};

/// Above this many nodes, all-pairs signature distances warn about cost.
pub const EXACT_SIGNATURE_LIMIT: usize = 2_000;

/// Spread between the best- and worst-off node for one measure. Node ids
/// are dense indices until [`GapReport::relabel`] maps them to original ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub measure: String,
    pub min: f64,
    pub max: f64,
    pub absolute: f64,
    /// `(max - min) / min`; absent when `min == 0`.
    pub relative: Option<f64>,
    pub argmin: u64,
    pub argmax: u64,
}

impl GapReport {
    pub fn relabel(mut self, g: &Graph) -> Self {
        self.argmin = g.label(NodeId(self.argmin as u32));
        self.argmax = g.label(NodeId(self.argmax as u32));
        self
    }
}

pub fn gap_report(values: &[f64], measure: &str) -> Result<GapReport> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "gap of {measure} needs at least two values"
        )));
    }
    let (mut lo, mut hi) = (0, 0);
    for (i, &v) in values.iter().enumerate() {
        if v < values[lo] {
            lo = i;
        }
        if v > values[hi] {
            hi = i;
        }
    }
    let (min, max) = (values[lo], values[hi]);
    Ok(GapReport {
        measure: measure.to_owned(),
        min,
        max,
        absolute: max - min,
        relative: (min > 0.0).then(|| (max - min) / min),
        argmin: lo as u64,
        argmax: hi as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub count: usize,
    pub min: f64,
    pub p1: f64,
    pub p5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear interpolation between closest ranks, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn distribution_summary(values: &[f64]) -> Result<DistributionSummary> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot summarize an empty distribution".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p| percentile(&sorted, p);
    Ok(DistributionSummary {
        count: sorted.len(),
        min: sorted[0],
        p1: q(0.01),
        p5: q(0.05),
        p25: q(0.25),
        p50: q(0.5),
        p75: q(0.75),
        p95: q(0.95),
        p99: q(0.99),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureMetric {
    L1,
    L2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    All,
    /// `count` pairs drawn uniformly with replacement.
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureDistances {
    pub metric: SignatureMetric,
    pub selection: PairSelection,
    pub summary: DistributionSummary,
    pub max: f64,
    pub max_pair: (u64, u64),
    /// Every computed `(i, j, distance)`, dense ids.
    #[serde(skip)]
    pub distances: Vec<(NodeId, NodeId, f64)>,
}

fn dense_rows<M: AccessMatrix + ?Sized>(m: &M) -> Vec<Vec<f64>> {
    (0..m.node_count())
        .map(|i| m.signature(NodeId::from(i)))
        .collect()
}

fn distance(metric: SignatureMetric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        SignatureMetric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        SignatureMetric::L2 => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}

/// Distances between access signatures. All pairs cost `O(n^3)`.
pub fn signature_distances<M: AccessMatrix + ?Sized>(
    m: &M,
    metric: SignatureMetric,
    selection: PairSelection,
) -> Result<SignatureDistances> {
    let n = m.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "signature distances need at least two nodes".into(),
        ));
    }
    let rows = dense_rows(m);
    let pairs: Vec<(NodeId, NodeId)> = match selection {
        PairSelection::All => {
            if n > EXACT_SIGNATURE_LIMIT {
                log::warn!(
                    "all-pairs signature distances on {n} nodes is O(n^3); consider sampled pairs"
                );
            }
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (NodeId::from(i), NodeId::from(j))))
                .collect()
        }
        PairSelection::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidArgument("sampled pair count must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    let mut j = rng.random_range(0..n - 1);
                    if j >= i {
                        j += 1;
                    }
                    (NodeId::from(i.min(j)), NodeId::from(i.max(j)))
                })
                .collect()
        }
    };
    let distances: Vec<(NodeId, NodeId, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| (i, j, distance(metric, &rows[i.index()], &rows[j.index()])))
        .collect();
    let values: Vec<f64> = distances.iter().map(|d| d.2).collect();
    let mut best = 0;
    for (k, d) in distances.iter().enumerate() {
        if d.2 > distances[best].2 {
            best = k;
        }
    }
    let (bi, bj, bmax) = distances[best];
    Ok(SignatureDistances {
        metric,
        selection,
        summary: distribution_summary(&values)?,
        max: bmax,
        max_pair: (u64::from(bi.0), u64::from(bj.0)),
        distances,
    })
}

/// Configuration a bundle was computed under; bundles compare only when
/// these agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleContext {
    pub alpha: f64,
    pub samples: Option<u32>,
    pub seed: u64,
    pub input_hash: Option<String>,
    pub heuristic: Option<String>,
    /// Edges added to the input graph so far.
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareSummary {
    pub value: f64,
    pub pair: (u64, u64),
}

/// Everything evaluated at one point of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsBundle {
    pub context: BundleContext,
    pub nodes: usize,
    pub edges: usize,
    pub welfare: WelfareSummary,
    pub min_broadcast: f64,
    pub min_influence: f64,
    pub broadcast_gap: GapReport,
    pub influence_gap: GapReport,
    pub access_distribution: DistributionSummary,
    pub signature_l1: SignatureDistances,
    pub signature_l2: SignatureDistances,
}

impl MetricsBundle {
    pub fn compute<M: AccessMatrix + ?Sized>(
        g: &Graph,
        m: &M,
        context: BundleContext,
        selection: PairSelection,
    ) -> Result<Self> {
        let adv = advantage(m)?;
        let w = welfare(m)?;
        let label_pair = |(a, b): (u64, u64)| (g.label(NodeId(a as u32)), g.label(NodeId(b as u32)));
        let access: Vec<f64> = m.pairs().into_iter().map(|p| p.2).collect();
        let mut l1 = signature_distances(m, SignatureMetric::L1, selection)?;
        l1.max_pair = label_pair(l1.max_pair);
        let mut l2 = signature_distances(m, SignatureMetric::L2, selection)?;
        l2.max_pair = label_pair(l2.max_pair);
        let broadcast_gap = gap_report(&adv.broadcast, "broadcast")?.relabel(g);
        let influence_gap = gap_report(&adv.influence, "influence")?.relabel(g);
        Ok(MetricsBundle {
            context,
            nodes: g.node_count(),
            edges: g.edge_count(),
            welfare: WelfareSummary {
                value: w.value,
                pair: (g.label(w.pair.0), g.label(w.pair.1)),
            },
            min_broadcast: broadcast_gap.min,
            min_influence: influence_gap.min,
            broadcast_gap,
            influence_gap,
            access_distribution: distribution_summary(&access)?,
            signature_l1: l1,
            signature_l2: l2,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub before: f64,
    pub after: f64,
    pub absolute: f64,
    /// Signed percentage relative to `before`; absent when `before == 0`.
    pub percent: Option<f64>,
}

impl Change {
    pub fn new(before: f64, after: f64) -> Self {
        let absolute = after - before;
        Change {
            before,
            after,
            absolute,
            percent: (before != 0.0).then(|| absolute / before * 100.0),
        }
    }

    fn optional(before: Option<f64>, after: Option<f64>) -> Option<Self> {
        Some(Change::new(before?, after?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionChange {
    pub min: Change,
    pub p1: Change,
    pub p5: Change,
    pub p25: Change,
    pub p50: Change,
    pub p75: Change,
    pub p95: Change,
    pub p99: Change,
    pub max: Change,
    pub mean: Change,
}

impl DistributionChange {
    fn new(a: &DistributionSummary, b: &DistributionSummary) -> Self {
        DistributionChange {
            min: Change::new(a.min, b.min),
            p1: Change::new(a.p1, b.p1),
            p5: Change::new(a.p5, b.p5),
            p25: Change::new(a.p25, b.p25),
            p50: Change::new(a.p50, b.p50),
            p75: Change::new(a.p75, b.p75),
            p95: Change::new(a.p95, b.p95),
            p99: Change::new(a.p99, b.p99),
            max: Change::new(a.max, b.max),
            mean: Change::new(a.mean, b.mean),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub k_before: usize,
    pub k_after: usize,
    pub welfare: Change,
    pub min_broadcast: Change,
    pub min_influence: Change,
    pub broadcast_gap_absolute: Change,
    pub broadcast_gap_relative: Option<Change>,
    pub influence_gap_absolute: Change,
    pub influence_gap_relative: Option<Change>,
    pub max_signature_l1: Change,
    pub max_signature_l2: Change,
    pub access_distribution: DistributionChange,
    pub signature_l1_distribution: DistributionChange,
}

/// Changes from `before` to `after`. Both must share graph, `alpha` and
/// sample count.
pub fn compare_runs(before: &MetricsBundle, after: &MetricsBundle) -> Result<DeltaReport> {
    let (a, b) = (&before.context, &after.context);
    if a.alpha != b.alpha
        || a.samples != b.samples
        || a.input_hash != b.input_hash
        || before.nodes != after.nodes
    {
        return Err(Error::InvalidArgument(
            "metrics bundles come from different graphs or estimation settings".into(),
        ));
    }
    Ok(DeltaReport {
        k_before: a.k,
        k_after: b.k,
        welfare: Change::new(before.welfare.value, after.welfare.value),
        min_broadcast: Change::new(before.min_broadcast, after.min_broadcast),
        min_influence: Change::new(before.min_influence, after.min_influence),
        broadcast_gap_absolute: Change::new(
            before.broadcast_gap.absolute,
            after.broadcast_gap.absolute,
        ),
        broadcast_gap_relative: Change::optional(
            before.broadcast_gap.relative,
            after.broadcast_gap.relative,
        ),
        influence_gap_absolute: Change::new(
            before.influence_gap.absolute,
            after.influence_gap.absolute,
        ),
        influence_gap_relative: Change::optional(
            before.influence_gap.relative,
            after.influence_gap.relative,
        ),
        max_signature_l1: Change::new(before.signature_l1.max, after.signature_l1.max),
        max_signature_l2: Change::new(before.signature_l2.max, after.signature_l2.max),
        access_distribution: DistributionChange::new(
            &before.access_distribution,
            &after.access_distribution,
        ),
        signature_l1_distribution: DistributionChange::new(
            &before.signature_l1.summary,
            &after.signature_l1.summary,
        ),
    })
}
