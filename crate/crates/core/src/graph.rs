//! Compact undirected simple graphs, edge-list ingestion and BFS utilities.
//!
//! Nodes are relabeled densely at load time in ascending order of their
//! original ids, so comparing [`NodeId`]s is the same as comparing original
//! ids. Every lexicographic tie rule in the crate relies on this.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Canonical undirected edge, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    u: NodeId,
    v: NodeId,
}

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(EdgeKey { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(EdgeKey { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    #[inline]
    pub fn u(self) -> NodeId {
        self.u
    }

    #[inline]
    pub fn v(self) -> NodeId {
        self.v
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Counts of lines dropped while loading an edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    /// `labels[i]` is the original id of node `i`; strictly increasing.
    labels: Vec<u64>,
}

impl Graph {
    /// Graph on nodes labeled `0..n` with the given edges. Duplicates and
    /// self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::with_labels((0..n as u64).collect());
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::NodeOutOfRange(NodeId::from(x), n));
                }
            }
            g.add_edge(EdgeKey::new(a.into(), b.into())?)?;
        }
        Ok(g)
    }

    /// Edgeless graph whose node `i` carries original id `labels[i]`.
    /// Labels must be strictly increasing.
    pub fn with_labels(labels: Vec<u64>) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        Graph {
            adjacency: vec![Vec::new(); labels.len()],
            edge_count: 0,
            labels,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    #[inline]
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v.index()]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Node carrying the given original id.
    pub fn node_by_label(&self, label: u64) -> Option<NodeId> {
        self.labels.binary_search(&label).ok().map(NodeId::from)
    }

    pub fn has_edge(&self, e: EdgeKey) -> bool {
        let (a, b) = if self.degree(e.u) <= self.degree(e.v) {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Edges in ascending canonical order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = NodeId::from(u);
            nbrs.iter()
                .filter(move |&&v| u < v)
                .map(move |&v| EdgeKey { u, v })
        })
    }

    pub fn add_edge(&mut self, e: EdgeKey) -> Result<()> {
        let n = self.node_count();
        if e.v.index() >= n {
            return Err(Error::NodeOutOfRange(e.v, n));
        }
        let pos_u = match self.adjacency[e.u.index()].binary_search(&e.v) {
            Ok(_) => return Err(Error::DuplicateEdge(e)),
            Err(pos) => pos,
        };
        self.adjacency[e.u.index()].insert(pos_u, e.v);
        let nbrs = &mut self.adjacency[e.v.index()];
        let pos_v = nbrs.binary_search(&e.u).unwrap_err();
        nbrs.insert(pos_v, e.u);
        self.edge_count += 1;
        Ok(())
    }

    /// True when every pair of distinct nodes is adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        self.edge_count == n * n.saturating_sub(1) / 2
    }

    /// Copy of the graph in which `v` keeps its id but loses all incident
    /// edges. Coins keyed on the surviving edges are unchanged, which couples
    /// estimates on the two graphs.
    pub fn isolate(&self, v: NodeId) -> Graph {
        let mut adjacency = self.adjacency.clone();
        for &w in &self.adjacency[v.index()] {
            adjacency[w.index()].retain(|&x| x != v);
        }
        adjacency[v.index()].clear();
        Graph {
            adjacency,
            edge_count: self.edge_count - self.degree(v),
            labels: self.labels.clone(),
        }
    }

    /// Hop distances from `source`; `u32::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source.index()] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.index()] + 1;
            for &y in self.neighbors(x) {
                if dist[y.index()] == u32::MAX {
                    dist[y.index()] = d;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0
            && self
                .bfs_distances(NodeId(0))
                .iter()
                .all(|&d| d != u32::MAX)
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![NodeId::from(s)];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &y in self.neighbors(x) {
                    if !seen[y.index()] {
                        seen[y.index()] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Subgraph induced by `keep` (sorted, distinct), relabeled densely while
    /// preserving original ids.
    pub fn induced(&self, keep: &[NodeId]) -> Graph {
        let mut map = vec![u32::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            map[old.index()] = new as u32;
        }
        let mut edge_count = 0;
        let adjacency = keep
            .iter()
            .map(|&old| {
                let nbrs: Vec<NodeId> = self
                    .neighbors(old)
                    .iter()
                    .filter(|w| map[w.index()] != u32::MAX)
                    .map(|w| NodeId(map[w.index()]))
                    .collect();
                edge_count += nbrs.len();
                nbrs
            })
            .collect();
        Graph {
            adjacency,
            edge_count: edge_count / 2,
            labels: keep.iter().map(|&v| self.label(v)).collect(),
        }
    }

    /// Writes `u v` lines with original ids, edges in canonical order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in self.edges() {
            writeln!(out, "{} {}", self.label(e.u), self.label(e.v))?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; tokens past the second (weights, timestamps) are ignored.
/// Self-loops and repeated pairs are dropped and counted.
pub fn load_edge_list<R: BufRead>(input: R) -> Result<(Graph, LoadReport)> {
    let mut raw = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut endpoint = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let a = endpoint()?;
        let b = endpoint()?;
        raw.push((a, b));
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }

    let id = |label: u64| NodeId::from(labels.binary_search(&label).unwrap());
    let mut report = LoadReport::default();
    let mut keys = Vec::with_capacity(raw.len());
    for &(a, b) in &raw {
        match EdgeKey::new(id(a), id(b)) {
            Ok(e) => keys.push(e),
            Err(_) => report.self_loops += 1,
        }
    }
    keys.sort_unstable();
    let before = keys.len();
    keys.dedup();
    report.duplicates = before - keys.len();

    let mut adjacency = vec![Vec::new(); labels.len()];
    for e in &keys {
        adjacency[e.u.index()].push(e.v);
        adjacency[e.v.index()].push(e.u);
    }
    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
    }
    if report.self_loops + report.duplicates > 0 {
        log::warn!(
            "dropped {} self-loop(s) and {} duplicate edge(s) while loading",
            report.self_loops,
            report.duplicates
        );
    }
    Ok((
        Graph {
            adjacency,
            edge_count: keys.len(),
            labels,
        },
        report,
    ))
}

/// Induced subgraph on the largest component. Ties go to the component
/// holding the smallest original id.
pub fn largest_connected_component(g: &Graph) -> Result<Graph> {
    if g.node_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let comps = g.components();
    // first maximum wins; components are ordered by smallest member
    let mut best = &comps[0];
    for c in &comps[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    Ok(g.induced(best))
}

/// Pair at maximum hop distance, lexicographically smallest among ties.
pub fn graph_diameter_pair(g: &Graph) -> Result<(NodeId, NodeId, u32)> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "diameter needs at least two nodes".into(),
        ));
    }
    let mut best = (NodeId(0), NodeId(1), 0u32);
    for u in 0..n {
        let dist = g.bfs_distances(NodeId::from(u));
        for (v, &d) in dist.iter().enumerate().skip(u + 1) {
            if d == u32::MAX {
                return Err(Error::Disconnected);
            }
            if d > best.2 {
                best = (NodeId::from(u), NodeId::from(v), d);
            }
        }
    }
    Ok(best)
}
