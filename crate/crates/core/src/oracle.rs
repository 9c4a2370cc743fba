//! Exact access probabilities by enumerating every live-edge subgraph.
//!
//! Exponential in the edge count; only for small fixtures and as the
//! reference the sampler is checked against.

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::estimate::{ExactAccess, TransmissionProbability, Triangle};
use crate::graph::Graph;

pub const DEFAULT_EDGE_CAP: usize = 20;

/// Hard ceiling regardless of the configured cap.
pub const MAX_EDGE_CAP: usize = 30;

/// `p_ij = sum over live sets S of a^|S| (1-a)^(m-|S|) [i ~ j in S]`.
pub fn exact_access_oracle(
    g: &Graph,
    alpha: TransmissionProbability,
    edge_cap: usize,
) -> Result<ExactAccess> {
    let m = g.edge_count();
    let cap = edge_cap.min(MAX_EDGE_CAP);
    if m > cap {
        return Err(Error::OracleCap { edges: m, cap });
    }
    let n = g.node_count();
    let tri = Triangle::new(n);
    let edges: Vec<(u32, u32)> = g.edges().map(|e| (e.u().0, e.v().0)).collect();
    let a = alpha.get();
    let weight_by_live: Vec<f64> = (0..=m)
        .map(|k| a.powi(k as i32) * (1.0 - a).powi((m - k) as i32))
        .collect();

    let mut probs = vec![0.0f64; tri.len()];
    let mut dsu = DisjointSets::new(n);
    let mut roots = vec![0u32; n];
    for mask in 0u64..(1u64 << m) {
        dsu.reset();
        for (bit, &(u, v)) in edges.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                dsu.union(u, v);
            }
        }
        let w = weight_by_live[mask.count_ones() as usize];
        for (i, r) in roots.iter_mut().enumerate() {
            *r = dsu.find(i as u32);
        }
        for i in 0..n.saturating_sub(1) {
            let row = tri.row_start(i);
            for j in i + 1..n {
                if roots[i] == roots[j] {
                    probs[row + (j - i - 1)] += w;
                }
            }
        }
    }
    Ok(ExactAccess::from_probs(n, probs))
}
