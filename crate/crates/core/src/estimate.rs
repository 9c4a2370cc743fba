use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Uniform per-edge transmission probability, strictly inside (0, 1).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TransmissionProbability(f64);

impl TransmissionProbability {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(TransmissionProbability(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TransmissionProbability {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<TransmissionProbability> for f64 {
    fn from(a: TransmissionProbability) -> f64 {
        a.0
    }
}

/// Packed upper-triangle indexing for `i < j < n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Triangle {
    n: usize,
}

impl Triangle {
    pub fn new(n: usize) -> Self {
        Triangle { n }
    }

    #[inline]
    pub fn len(self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// Offset of `(i, i + 1)`; row `i` runs contiguously from there.
    #[inline]
    pub fn row_start(self, i: usize) -> usize {
        i * (2 * self.n - i - 1) / 2
    }

    #[inline]
    pub fn index(self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n);
        self.row_start(i) + (j - i - 1)
    }
}

/// Symmetric pairwise access probabilities with unit diagonal.
pub trait AccessMatrix {
    fn node_count(&self) -> usize;

    /// `p_ij`; exactly 1 when `i == j`.
    fn access(&self, i: NodeId, j: NodeId) -> f64;

    /// Access signature of `i`: entry `j` is `p_ij`.
    fn signature(&self, i: NodeId) -> Vec<f64> {
        (0..self.node_count())
            .map(|j| self.access(i, NodeId::from(j)))
            .collect()
    }

    /// Off-diagonal entries `(i, j, p_ij)` with `i < j`, row by row.
    fn pairs(&self) -> Vec<(NodeId, NodeId, f64)> {
        let n = self.node_count();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (NodeId::from(i), NodeId::from(j));
                out.push((a, b, self.access(a, b)));
            }
        }
        out
    }
}

/// Monte Carlo estimate: `c_ij` co-occurrence counts out of `samples` draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessEstimate {
    samples: u32,
    tri: Triangle,
    counts: Vec<u32>,
}

impl AccessEstimate {
    pub(crate) fn from_counts(n: usize, samples: u32, counts: Vec<u32>) -> Self {
        let tri = Triangle::new(n);
        assert_eq!(counts.len(), tri.len());
        AccessEstimate {
            samples,
            tri,
            counts,
        }
    }

    /// Rebuilds an estimate from a packed row-major upper triangle.
    pub fn from_packed(n: usize, samples: u32, counts: Vec<u32>) -> Result<Self> {
        if samples == 0 {
            return Err(Error::ZeroSamples);
        }
        if counts.len() != Triangle::new(n).len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} counters for {n} nodes, got {}",
                Triangle::new(n).len(),
                counts.len()
            )));
        }
        if let Some(c) = counts.iter().find(|&&c| c > samples) {
            return Err(Error::InvalidArgument(format!(
                "counter {c} exceeds sample count {samples}"
            )));
        }
        Ok(Self::from_counts(n, samples, counts))
    }

    #[inline]
    pub fn samples(&self) -> u32 {
        self.samples
    }

    /// Co-occurrence count for `i != j`.
    #[inline]
    pub fn count(&self, i: NodeId, j: NodeId) -> u32 {
        self.counts[self.tri.index(i.index(), j.index())]
    }

    /// Packed row-major upper triangle of counters.
    pub fn packed_counts(&self) -> &[u32] {
        &self.counts
    }
}

impl AccessMatrix for AccessEstimate {
    fn node_count(&self) -> usize {
        self.tri.n
    }

    #[inline]
    fn access(&self, i: NodeId, j: NodeId) -> f64 {
        if i == j {
            1.0
        } else {
            f64::from(self.count(i, j)) / f64::from(self.samples)
        }
    }
}

/// Exact probabilities, e.g. from enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAccess {
    tri: Triangle,
    probs: Vec<f64>,
}

impl ExactAccess {
    pub(crate) fn from_probs(n: usize, probs: Vec<f64>) -> Self {
        let tri = Triangle::new(n);
        assert_eq!(probs.len(), tri.len());
        ExactAccess { tri, probs }
    }
}

impl AccessMatrix for ExactAccess {
    fn node_count(&self) -> usize {
        self.tri.n
    }

    #[inline]
    fn access(&self, i: NodeId, j: NodeId) -> f64 {
        if i == j {
            1.0
        } else {
            self.probs[self.tri.index(i.index(), j.index())]
        }
    }
}
