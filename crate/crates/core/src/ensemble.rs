//! Coupled live-edge sampling of all-pairs access probabilities.
//!
//! For undirected Independent Cascade with a uniform probability `alpha`, the
//! set of nodes informed by a seed is distributed exactly like the seed's
//! component in a random subgraph that keeps each edge with probability
//! `alpha`. One such subgraph therefore yields a co-occurrence indicator for
//! every pair at once, and `R` of them give the estimate `p_ij = c_ij / R`.
//!
//! Coins come from [`crate::coin`], keyed by `(seed, sample, edge)`. Adding an
//! edge can only merge components, so estimates are monotone under insertion
//! and an incrementally updated ensemble is bit-identical to one rebuilt from
//! scratch on the augmented graph.
//!
//! # Counter layout
//!
//! When one component dominates a sample, counting its pairs directly costs
//! `O(n^2)`. Such samples are stored relative to that component (the
//! *anchor*): for every pair,
//!
//! ```text
//! c_ij = same_ij + anchored - outside_i - outside_j + outside_ij
//! ```
//!
//! where `anchored` counts anchor-mode samples, `outside_i` counts anchor-mode
//! samples in which `i` lies outside the anchor, `outside_ij` counts those in
//! which both do, and `same_ij` counts co-membership in any non-anchor
//! component. The per-sample cost becomes quadratic only in the number of
//! nodes outside the anchor. Each sample picks whichever layout is cheaper.

use rayon::prelude::*;

use crate::coin::{edge_coin, sample_key};
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::estimate::{AccessEstimate, TransmissionProbability, Triangle};
use crate::graph::{EdgeKey, Graph, NodeId};

const NONE: u32 = u32::MAX;

/// Upper bound on memory spent on per-worker partial counters.
const PARTIAL_TALLY_BUDGET: usize = 1 << 30;

/// Component structure of one live-edge sample.
#[derive(Clone, Debug)]
struct Sample {
    /// Representative of each node's component.
    label: Vec<u32>,
    /// Circular member lists.
    next: Vec<u32>,
    /// Component sizes, valid at representatives.
    size: Vec<u32>,
    /// Representative of the anchor component, or `NONE` for direct counting.
    anchor: u32,
}

impl Sample {
    fn members(&self, root: u32) -> impl Iterator<Item = u32> + '_ {
        let mut cur = root;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = cur;
            cur = self.next[cur as usize];
            done = cur == root;
            Some(out)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tally {
    same: Vec<u32>,
    outside: Vec<u32>,
    node_outside: Vec<u32>,
    anchored: u32,
}

impl Tally {
    fn zeros(n: usize) -> Self {
        let len = Triangle::new(n).len();
        Tally {
            same: vec![0; len],
            outside: vec![0; len],
            node_outside: vec![0; n],
            anchored: 0,
        }
    }

    fn absorb(&mut self, other: &Tally) {
        for (a, b) in self.same.iter_mut().zip(&other.same) {
            *a += b;
        }
        for (a, b) in self.outside.iter_mut().zip(&other.outside) {
            *a += b;
        }
        for (a, b) in self.node_outside.iter_mut().zip(&other.node_outside) {
            *a += b;
        }
        self.anchored += other.anchored;
    }

    fn materialize(&self, n: usize) -> Vec<u32> {
        let tri = Triangle::new(n);
        let mut counts = Vec::with_capacity(tri.len());
        for i in 0..n.saturating_sub(1) {
            let base = i64::from(self.anchored) - i64::from(self.node_outside[i]);
            let row = tri.row_start(i);
            for j in i + 1..n {
                let k = row + (j - i - 1);
                let c = i64::from(self.same[k]) + base - i64::from(self.node_outside[j])
                    + i64::from(self.outside[k]);
                debug_assert!(c >= 0);
                counts.push(c as u32);
            }
        }
        counts
    }

    fn apply(&mut self, delta: &TallyDelta) {
        for &k in &delta.same_inc {
            self.same[k] += 1;
        }
        for &k in &delta.same_dec {
            self.same[k] -= 1;
        }
        for &k in &delta.outside_dec {
            self.outside[k] -= 1;
        }
        for &i in &delta.node_outside_dec {
            self.node_outside[i as usize] -= 1;
        }
    }
}

/// Counter changes from one batch of incremental updates.
#[derive(Default)]
struct TallyDelta {
    same_inc: Vec<usize>,
    same_dec: Vec<usize>,
    outside_dec: Vec<usize>,
    node_outside_dec: Vec<u32>,
}

/// Edge endpoints together with the original ids the coins are keyed on.
#[derive(Clone, Copy)]
struct CoinEdge {
    u: u32,
    v: u32,
    lu: u64,
    lv: u64,
}

fn coin_edges(g: &Graph) -> Vec<CoinEdge> {
    g.edges()
        .map(|e| CoinEdge {
            u: e.u().0,
            v: e.v().0,
            lu: g.label(e.u()),
            lv: g.label(e.v()),
        })
        .collect()
}

struct Scratch {
    dsu: DisjointSets,
    bucket: Vec<u32>,
    members: Vec<u32>,
    outside: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dsu: DisjointSets::new(n),
            bucket: vec![0; n + 1],
            members: vec![0; n],
            outside: Vec::with_capacity(n),
        }
    }
}

/// Draws sample `r`, adds its pairs to `tally`, and optionally returns the
/// component structure for later incremental updates.
#[allow(clippy::too_many_arguments)]
fn draw_sample(
    edges: &[CoinEdge],
    n: usize,
    alpha: f64,
    seed: u64,
    r: u32,
    scratch: &mut Scratch,
    tally: &mut Tally,
    keep: bool,
) -> Option<Sample> {
    let tri = Triangle::new(n);
    let key = sample_key(seed, r);
    let dsu = &mut scratch.dsu;
    dsu.reset();
    for e in edges {
        if edge_coin(key, e.lu, e.lv) < alpha {
            dsu.union(e.u, e.v);
        }
    }
    let label: Vec<u32> = (0..n as u32).map(|i| dsu.find(i)).collect();

    // counting sort of nodes by representative; members stay ascending
    let bucket = &mut scratch.bucket;
    bucket.fill(0);
    for &l in &label {
        bucket[l as usize + 1] += 1;
    }
    for i in 0..n {
        bucket[i + 1] += bucket[i];
    }
    let mut anchor = NONE;
    let mut anchor_size = 0u32;
    let mut direct_cost = 0u64;
    for root in 0..n {
        let s = bucket[root + 1] - bucket[root];
        if s > 0 {
            direct_cost += u64::from(s) * u64::from(s - 1) / 2;
            if s > anchor_size {
                anchor_size = s;
                anchor = root as u32;
            }
        }
    }
    {
        let mut fill = bucket.clone();
        for (i, &l) in label.iter().enumerate() {
            scratch.members[fill[l as usize] as usize] = i as u32;
            fill[l as usize] += 1;
        }
    }
    let out = u64::from(n as u32 - anchor_size);
    let anchored_cost = out * out.saturating_sub(1) / 2 + out + direct_cost
        - u64::from(anchor_size) * u64::from(anchor_size.saturating_sub(1)) / 2;
    if anchored_cost >= direct_cost {
        anchor = NONE;
    }

    for root in 0..n {
        if root as u32 == anchor {
            continue;
        }
        let comp = &scratch.members[bucket[root] as usize..bucket[root + 1] as usize];
        for (a, &x) in comp.iter().enumerate() {
            let row = tri.row_start(x as usize);
            for &y in &comp[a + 1..] {
                tally.same[row + (y - x - 1) as usize] += 1;
            }
        }
    }
    if anchor != NONE {
        tally.anchored += 1;
        let outside = &mut scratch.outside;
        outside.clear();
        outside.extend((0..n as u32).filter(|&i| label[i as usize] != anchor));
        for (a, &x) in outside.iter().enumerate() {
            tally.node_outside[x as usize] += 1;
            let row = tri.row_start(x as usize);
            for &y in &outside[a + 1..] {
                tally.outside[row + (y - x - 1) as usize] += 1;
            }
        }
    }

    if !keep {
        return None;
    }
    let mut next: Vec<u32> = vec![0; n];
    let mut size = vec![0u32; n];
    for root in 0..n {
        let comp = &scratch.members[bucket[root] as usize..bucket[root + 1] as usize];
        if let Some(&first) = comp.first() {
            for w in comp.windows(2) {
                next[w[0] as usize] = w[1];
            }
            next[*comp.last().unwrap() as usize] = first;
            size[root] = comp.len() as u32;
        }
    }
    Some(Sample {
        label,
        next,
        size,
        anchor,
    })
}

fn chunk_ranges(samples: u32, n: usize) -> Vec<std::ops::Range<u32>> {
    let tally_bytes = (2 * Triangle::new(n).len() + n) * 4 + 64;
    let by_memory = (PARTIAL_TALLY_BUDGET / tally_bytes).max(1);
    let chunks = rayon::current_num_threads()
        .min(by_memory)
        .min(samples as usize)
        .max(1) as u32;
    let step = samples.div_ceil(chunks);
    (0..chunks)
        .map(|c| c * step..((c + 1) * step).min(samples))
        .filter(|r| !r.is_empty())
        .collect()
}

fn draw_all(
    g: &Graph,
    alpha: f64,
    samples: u32,
    seed: u64,
    keep: bool,
) -> (Tally, Vec<Sample>) {
    let n = g.node_count();
    let edges = coin_edges(g);
    let parts: Vec<(Tally, Vec<Sample>)> = chunk_ranges(samples, n)
        .into_par_iter()
        .map(|range| {
            let mut tally = Tally::zeros(n);
            let mut scratch = Scratch::new(n);
            let kept = range
                .filter_map(|r| {
                    draw_sample(&edges, n, alpha, seed, r, &mut scratch, &mut tally, keep)
                })
                .collect();
            (tally, kept)
        })
        .collect();
    let mut parts = parts.into_iter();
    let (mut tally, mut kept) = parts.next().unwrap_or_else(|| (Tally::zeros(n), Vec::new()));
    for (t, s) in parts {
        tally.absorb(&t);
        kept.extend(s);
    }
    (tally, kept)
}

fn check_samples(samples: u32) -> Result<()> {
    if samples == 0 {
        Err(Error::ZeroSamples)
    } else {
        Ok(())
    }
}

/// `R` coupled live-edge samples of a graph, retained for incremental updates.
#[derive(Clone, Debug)]
pub struct SampleEnsemble {
    graph: Graph,
    alpha: TransmissionProbability,
    seed: u64,
    samples: Vec<Sample>,
    tally: Tally,
}

/// Draws `samples` live-edge samples of a connected graph.
pub fn build_ensemble(
    g: &Graph,
    alpha: TransmissionProbability,
    samples: u32,
    seed: u64,
) -> Result<SampleEnsemble> {
    check_samples(samples)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (tally, kept) = draw_all(g, alpha.get(), samples, seed, true);
    Ok(SampleEnsemble {
        graph: g.clone(),
        alpha,
        seed,
        samples: kept,
        tally,
    })
}

/// One-shot estimate without retaining per-sample state. Unlike
/// [`build_ensemble`], the graph need not be connected.
pub fn estimate_access(
    g: &Graph,
    alpha: TransmissionProbability,
    samples: u32,
    seed: u64,
) -> Result<AccessEstimate> {
    check_samples(samples)?;
    let (tally, _) = draw_all(g, alpha.get(), samples, seed, false);
    Ok(AccessEstimate::from_counts(
        g.node_count(),
        samples,
        tally.materialize(g.node_count()),
    ))
}

impl SampleEnsemble {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alpha(&self) -> TransmissionProbability {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_count(&self) -> u32 {
        self.samples.len() as u32
    }

    /// Current estimate; `O(n^2)`.
    pub fn estimate(&self) -> AccessEstimate {
        let n = self.graph.node_count();
        AccessEstimate::from_counts(n, self.sample_count(), self.tally.materialize(n))
    }

    /// Whether edge `e` is live in sample `r`.
    pub fn is_live(&self, r: u32, e: EdgeKey) -> bool {
        edge_coin(
            sample_key(self.seed, r),
            self.graph.label(e.u()),
            self.graph.label(e.v()),
        ) < self.alpha.get()
    }

    /// Whether `i` and `j` share a component in sample `r`.
    pub fn same_component(&self, r: u32, i: NodeId, j: NodeId) -> bool {
        let s = &self.samples[r as usize];
        s.label[i.index()] == s.label[j.index()]
    }

    /// Inserts `e` into the graph and every sample in which its coin is live,
    /// updating counters for the newly joined pairs. `O(R n)` worst case.
    pub fn add_edge(&mut self, e: EdgeKey) -> Result<()> {
        self.graph.add_edge(e)?;
        let n = self.graph.node_count();
        let tri = Triangle::new(n);
        let (u, v) = (e.u().0, e.v().0);
        let (lu, lv) = (self.graph.label(e.u()), self.graph.label(e.v()));
        let (alpha, seed) = (self.alpha.get(), self.seed);

        let step = self.samples.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
        let deltas: Vec<TallyDelta> = self
            .samples
            .par_chunks_mut(step)
            .enumerate()
            .map(|(c, chunk)| {
                let mut delta = TallyDelta::default();
                for (k, sample) in chunk.iter_mut().enumerate() {
                    let r = (c * step + k) as u32;
                    if edge_coin(sample_key(seed, r), lu, lv) < alpha {
                        merge(sample, tri, u, v, &mut delta);
                    }
                }
                delta
            })
            .collect();
        for d in &deltas {
            self.tally.apply(d);
        }
        Ok(())
    }
}

fn merge(s: &mut Sample, tri: Triangle, u: u32, v: u32, delta: &mut TallyDelta) {
    let (ru, rv) = (s.label[u as usize], s.label[v as usize]);
    if ru == rv {
        return;
    }
    if s.anchor != ru && s.anchor != rv {
        for a in s.members(ru) {
            for b in s.members(rv) {
                delta.same_inc.push(tri.index(a as usize, b as usize));
            }
        }
    } else {
        let joining = if s.anchor == ru { rv } else { ru };
        let members: Vec<u32> = s.members(joining).collect();
        for (idx, &a) in members.iter().enumerate() {
            delta.node_outside_dec.push(a);
            for &b in &members[idx + 1..] {
                let k = tri.index(a as usize, b as usize);
                delta.same_dec.push(k);
                delta.outside_dec.push(k);
            }
        }
        for j in 0..s.label.len() {
            let l = s.label[j];
            if l != s.anchor && l != joining {
                for &a in &members {
                    delta.outside_dec.push(tri.index(a as usize, j));
                }
            }
        }
    }

    let (big, small) = if s.size[ru as usize] >= s.size[rv as usize] {
        (ru, rv)
    } else {
        (rv, ru)
    };
    let moved: Vec<u32> = s.members(small).collect();
    for x in moved {
        s.label[x as usize] = big;
    }
    s.next.swap(big as usize, small as usize);
    s.size[big as usize] += s.size[small as usize];
    if s.anchor == small {
        s.anchor = big;
    }
}

/// Spread of estimates across independent seeds.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Stability {
    /// Largest per-pair range (max - min) across repetitions.
    pub max_dev: f64,
    /// Mean per-pair range across repetitions.
    pub mean_dev: f64,
}

/// Estimates `reps` times with seeds `base_seed..base_seed + reps` and
/// reports how far the per-pair estimates spread.
pub fn stability_check(
    g: &Graph,
    alpha: TransmissionProbability,
    samples: u32,
    reps: u32,
    base_seed: u64,
) -> Result<Stability> {
    let seeds: Vec<u64> = (0..reps).map(|k| base_seed.wrapping_add(u64::from(k))).collect();
    stability_over_seeds(g, alpha, samples, &seeds)
}

/// Like [`stability_check`] with an explicit seed list (repeats allowed).
pub fn stability_over_seeds(
    g: &Graph,
    alpha: TransmissionProbability,
    samples: u32,
    seeds: &[u64],
) -> Result<Stability> {
    if seeds.len() < 2 {
        return Err(Error::InvalidArgument(
            "stability check needs at least two repetitions".into(),
        ));
    }
    let mut lo: Vec<u32> = Vec::new();
    let mut hi: Vec<u32> = Vec::new();
    for (k, &seed) in seeds.iter().enumerate() {
        let est = estimate_access(g, alpha, samples, seed)?;
        let counts = est.packed_counts();
        if k == 0 {
            lo = counts.to_vec();
            hi = counts.to_vec();
        } else {
            for ((l, h), &c) in lo.iter_mut().zip(hi.iter_mut()).zip(counts) {
                *l = (*l).min(c);
                *h = (*h).max(c);
            }
        }
    }
    let r = f64::from(samples);
    let mut max_range = 0u32;
    let mut total = 0u64;
    for (l, h) in lo.iter().zip(&hi) {
        max_range = max_range.max(h - l);
        total += u64::from(h - l);
    }
    let pairs = lo.len().max(1) as f64;
    Ok(Stability {
        max_dev: f64::from(max_range) / r,
        mean_dev: total as f64 / pairs / r,
    })
}
