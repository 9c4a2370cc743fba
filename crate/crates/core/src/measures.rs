//! Per-node advantage measures derived from access signatures.

use serde::{Deserialize, Serialize};

use crate::ensemble::estimate_access;
use crate::error::{Error, Result};
use crate::estimate::{AccessMatrix, TransmissionProbability};
use crate::graph::{Graph, NodeId};
use crate::oracle::exact_access_oracle;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageVector {
    pub broadcast: Vec<f64>,
    pub influence: Vec<f64>,
    pub control: Option<Vec<f64>>,
}

/// Minimum pairwise access and the lexicographically first pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Welfare {
    pub value: f64,
    pub pair: (NodeId, NodeId),
}

fn require_pairs<M: AccessMatrix + ?Sized>(m: &M) -> Result<usize> {
    let n = m.node_count();
    if n < 2 {
        Err(Error::InvalidArgument(format!(
            "advantage measures need at least two nodes, got {n}"
        )))
    } else {
        Ok(n)
    }
}

/// Broadcast and influence in one pass over the pairs.
pub fn advantage<M: AccessMatrix + ?Sized>(m: &M) -> Result<AdvantageVector> {
    let n = require_pairs(m)?;
    let mut broadcast = vec![f64::INFINITY; n];
    let mut sums = vec![1.0f64; n];
    for i in 0..n {
        for j in i + 1..n {
            let p = m.access(NodeId::from(i), NodeId::from(j));
            broadcast[i] = broadcast[i].min(p);
            broadcast[j] = broadcast[j].min(p);
            sums[i] += p;
            sums[j] += p;
        }
    }
    let influence = sums.into_iter().map(|s| s / n as f64).collect();
    Ok(AdvantageVector {
        broadcast,
        influence,
        control: None,
    })
}

/// `broadcast(i) = min_j p_ij` over `j != i`.
pub fn broadcast_all<M: AccessMatrix + ?Sized>(m: &M) -> Result<Vec<f64>> {
    advantage(m).map(|a| a.broadcast)
}

/// `influence(i) = (1/n) sum_j p_ij`, self term `p_ii = 1` included.
pub fn influence_all<M: AccessMatrix + ?Sized>(m: &M) -> Result<Vec<f64>> {
    advantage(m).map(|a| a.influence)
}

pub fn welfare<M: AccessMatrix + ?Sized>(m: &M) -> Result<Welfare> {
    let n = require_pairs(m)?;
    let mut best = Welfare {
        value: f64::INFINITY,
        pair: (NodeId(0), NodeId(1)),
    };
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (NodeId::from(i), NodeId::from(j));
            let p = m.access(a, b);
            if p < best.value {
                best = Welfare {
                    value: p,
                    pair: (a, b),
                };
            }
        }
    }
    Ok(best)
}

/// Dependence of other pairs' access on one node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub node: NodeId,
    /// Sum of pairwise control over eligible pairs, divided by `C(n-1, 2)`.
    pub cent_star: f64,
    /// Unnormalized sum.
    pub raw_sum: f64,
    pub max_pair_control: f64,
    /// Smallest ratio before clamping; negative only through sampling noise.
    pub min_raw_ratio: f64,
}

/// Compares access with and without `c`. Pairs with zero access are skipped.
pub fn control_from_matrices<A, B>(with: &A, without: &B, c: NodeId) -> Control
where
    A: AccessMatrix + ?Sized,
    B: AccessMatrix + ?Sized,
{
    let n = with.node_count();
    let mut raw_sum = 0.0;
    let mut max_pair: f64 = 0.0;
    let mut min_raw = f64::INFINITY;
    for j in (0..n).filter(|&j| j != c.index()) {
        for k in (j + 1..n).filter(|&k| k != c.index()) {
            let (a, b) = (NodeId::from(j), NodeId::from(k));
            let p = with.access(a, b);
            if p <= 0.0 {
                continue;
            }
            let ratio = (p - without.access(a, b)) / p;
            min_raw = min_raw.min(ratio);
            let clamped = ratio.clamp(0.0, 1.0);
            raw_sum += clamped;
            max_pair = max_pair.max(clamped);
        }
    }
    let others = n.saturating_sub(1) as f64;
    let pairs = others * (others - 1.0) / 2.0;
    Control {
        node: c,
        cent_star: if pairs > 0.0 { raw_sum / pairs } else { 0.0 },
        raw_sum,
        max_pair_control: max_pair,
        min_raw_ratio: if min_raw.is_finite() { min_raw } else { 0.0 },
    }
}

fn check_control_input(g: &Graph, c: NodeId) -> Result<()> {
    if g.node_count() < 3 {
        return Err(Error::InvalidArgument(
            "access centrality needs at least three nodes".into(),
        ));
    }
    if c.index() >= g.node_count() {
        return Err(Error::NodeOutOfRange(c, g.node_count()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Monte Carlo access centrality of `c`. Both estimates use the same seed,
/// and `c` is isolated rather than deleted, so the coins of every surviving
/// edge coincide and `p' <= p` holds sample by sample.
pub fn access_centrality(
    g: &Graph,
    alpha: TransmissionProbability,
    samples: u32,
    seed: u64,
    c: NodeId,
) -> Result<Control> {
    check_control_input(g, c)?;
    let with = estimate_access(g, alpha, samples, seed)?;
    let without = estimate_access(&g.isolate(c), alpha, samples, seed)?;
    Ok(control_from_matrices(&with, &without, c))
}

/// Exact access centrality by enumeration.
pub fn access_centrality_exact(
    g: &Graph,
    alpha: TransmissionProbability,
    c: NodeId,
    edge_cap: usize,
) -> Result<Control> {
    check_control_input(g, c)?;
    let with = exact_access_oracle(g, alpha, edge_cap)?;
    let without = exact_access_oracle(&g.isolate(c), alpha, edge_cap)?;
    Ok(control_from_matrices(&with, &without, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_EDGE_CAP;

    fn alpha(a: f64) -> TransmissionProbability {
        TransmissionProbability::new(a).unwrap()
    }

    fn exact(g: &Graph, a: f64) -> crate::estimate::ExactAccess {
        exact_access_oracle(g, alpha(a), DEFAULT_EDGE_CAP).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn path_broadcast_and_influence() {
        let p = exact(&path3(), 0.5);
        let adv = advantage(&p).unwrap();
        assert!(close(adv.broadcast[0], 0.25));
        assert!(close(adv.broadcast[1], 0.5));
        assert!(close(adv.broadcast[2], 0.25));
        assert!(close(adv.influence[1], 2.0 / 3.0));
        assert!(close(adv.influence[0], 1.75 / 3.0));
    }

    #[test]
    fn single_edge_influence() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let adv = advantage(&exact(&g, 0.3)).unwrap();
        assert!(close(adv.influence[0], 0.65));
        assert!(close(adv.influence[1], 0.65));
    }

    #[test]
    fn complete_graph_is_uniform() {
        let edges: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        let g = Graph::from_edges(4, &edges).unwrap();
        let b = broadcast_all(&exact(&g, 0.4)).unwrap();
        assert!(b.iter().all(|&x| close(x, b[0])));
    }

    #[test]
    fn welfare_picks_first_minimum() {
        let w = welfare(&exact(&path3(), 0.5)).unwrap();
        assert!(close(w.value, 0.25));
        assert_eq!(w.pair, (NodeId(0), NodeId(2)));
        let w = welfare(&exact(&triangle(), 0.5)).unwrap();
        assert!(close(w.value, 0.625));
        assert_eq!(w.pair, (NodeId(0), NodeId(1)));
    }

    #[test]
    fn welfare_equals_min_broadcast() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 4), (4, 3)]).unwrap();
        let p = exact(&g, 0.35);
        let b = broadcast_all(&p).unwrap();
        let min_b = b.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(welfare(&p).unwrap().value, min_b);
    }

    #[test]
    fn too_few_nodes() {
        let g = Graph::with_labels(vec![0]);
        let p = exact(&g, 0.5);
        assert!(broadcast_all(&p).is_err());
        assert!(welfare(&p).is_err());
    }

    #[test]
    fn open_triad_broker_has_full_control() {
        let c = access_centrality_exact(&path3(), alpha(0.5), NodeId(1), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(c.max_pair_control, 1.0);
        assert_eq!(c.cent_star, 1.0);
        let leaf = access_centrality_exact(&path3(), alpha(0.5), NodeId(0), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(leaf.cent_star, 0.0);
    }

    #[test]
    fn triangle_pair_control() {
        let c = access_centrality_exact(&triangle(), alpha(0.5), NodeId(2), DEFAULT_EDGE_CAP).unwrap();
        assert!(close(c.max_pair_control, 0.2));
        assert!(close(c.cent_star, 0.2));
    }

    #[test]
    fn control_rejects_small_graphs() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(access_centrality(&g, alpha(0.5), 10, 0, NodeId(0)).is_err());
    }
}
