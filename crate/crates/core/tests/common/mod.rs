#![allow(dead_code)]

use accessgap_core::{EdgeKey, Graph, NodeId, TransmissionProbability};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn alpha(a: f64) -> TransmissionProbability {
    TransmissionProbability::new(a).unwrap()
}

/// Random connected simple graph: a random attachment tree plus up to
/// `max_edges - (n - 1)` extra chords.
pub fn random_connected(n: usize, max_edges: usize, seed: u64) -> Graph {
    assert!(n >= 2 && max_edges >= n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    let mut g = Graph::from_edges(n, &edges).unwrap();
    let complete = n * (n - 1) / 2;
    let target = rng.random_range(n - 1..=max_edges.min(complete));
    while g.edge_count() < target {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let e = EdgeKey::new(NodeId::from(a), NodeId::from(b)).unwrap();
        if !g.has_edge(e) {
            g.add_edge(e).unwrap();
        }
    }
    g
}

/// Up to `count` distinct non-edges of `g`, in random order.
pub fn random_non_edges(g: &Graph, count: usize, seed: u64) -> Vec<EdgeKey> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.node_count();
    let mut free: Vec<EdgeKey> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| EdgeKey::new(NodeId::from(i), NodeId::from(j)).unwrap())
        .filter(|e| !g.has_edge(*e))
        .collect();
    let mut out = Vec::new();
    while out.len() < count && !free.is_empty() {
        let k = rng.random_range(0..free.len());
        out.push(free.swap_remove(k));
    }
    out
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// `x - u - v`, then two parallel length-2 routes `v - s1 - y` and `v - s2 - y`.
pub fn series_parallel() -> Graph {
    // x=0 u=1 v=2 s1=3 s2=4 y=5
    Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 5), (2, 4), (4, 5)]).unwrap()
}

/// `t` internally disjoint 2-paths between nodes 0 and 1.
pub fn parallel_two_paths(t: usize) -> Graph {
    let edges: Vec<_> = (0..t).flat_map(|k| [(0, 2 + k), (2 + k, 1)]).collect();
    Graph::from_edges(t + 2, &edges).unwrap()
}

/// Small connected graphs the heuristics are exercised on.
pub fn heuristic_fixtures() -> Vec<(&'static str, Graph)> {
    vec![
        ("path8", path(8)),
        ("cycle9", cycle(9)),
        ("star-path", Graph::from_edges(8, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (6, 7)]).unwrap()),
        ("barbell", Graph::from_edges(8, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 7)]).unwrap()),
        ("random12", random_connected(12, 16, 5)),
        ("random15", random_connected(15, 20, 11)),
    ]
}
