//! Text and binary writers for estimates, advantage reports and traces.
//!
//! Node ids are always written as the original labels of the input graph.

use std::io::{self, Read, Write};

use crate::augment::InterventionTrace;
use crate::error::{Error, Result};
use crate::estimate::{AccessEstimate, AccessMatrix};
use crate::graph::{Graph, NodeId};
use crate::measures::{AdvantageVector, Control};

/// `i,j,p` for every pair `i < j`, six decimals.
pub fn write_access_csv<M: AccessMatrix + ?Sized, W: Write>(
    g: &Graph,
    m: &M,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "i,j,p")?;
    let n = m.node_count();
    for i in 0..n {
        let a = NodeId::from(i);
        for j in i + 1..n {
            let b = NodeId::from(j);
            writeln!(out, "{},{},{:.6}", g.label(a), g.label(b), m.access(a, b))?;
        }
    }
    Ok(())
}

const MAGIC: &[u8; 8] = b"AGAPTRI1";

/// Binary layout, all little-endian:
///
/// ```text
/// magic   8 bytes  "AGAPTRI1"
/// n       u64
/// samples u32
/// labels  n x u64
/// counts  n(n-1)/2 x u32, row-major upper triangle
/// ```
pub fn write_estimate_binary<W: Write>(g: &Graph, est: &AccessEstimate, mut out: W) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(g.node_count() as u64).to_le_bytes())?;
    out.write_all(&est.samples().to_le_bytes())?;
    for &l in g.labels() {
        out.write_all(&l.to_le_bytes())?;
    }
    for &c in est.packed_counts() {
        out.write_all(&c.to_le_bytes())?;
    }
    Ok(())
}

/// Inverse of [`write_estimate_binary`]; returns the labels and estimate.
pub fn read_estimate_binary<R: Read>(mut input: R) -> Result<(Vec<u64>, AccessEstimate)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidArgument("not an access estimate dump".into()));
    }
    let mut b8 = [0u8; 8];
    let mut b4 = [0u8; 4];
    input.read_exact(&mut b8)?;
    let n = usize::try_from(u64::from_le_bytes(b8))
        .map_err(|_| Error::InvalidArgument("node count overflows".into()))?;
    input.read_exact(&mut b4)?;
    let samples = u32::from_le_bytes(b4);
    let labels = (0..n)
        .map(|_| {
            input.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs = n * n.saturating_sub(1) / 2;
    let counts = (0..pairs)
        .map(|_| {
            input.read_exact(&mut b4)?;
            Ok(u32::from_le_bytes(b4))
        })
        .collect::<Result<Vec<_>>>()?;
    let est = AccessEstimate::from_packed(n, samples, counts)?;
    Ok((labels, est))
}

/// `node,broadcast,influence[,cent_star,max_pair_control]`. Control columns
/// appear only when `control` is given, with one entry per node.
pub fn write_advantage_csv<W: Write>(
    g: &Graph,
    adv: &AdvantageVector,
    control: Option<&[Control]>,
    mut out: W,
) -> io::Result<()> {
    if control.is_some() {
        writeln!(out, "node,broadcast,influence,cent_star,max_pair_control")?;
    } else {
        writeln!(out, "node,broadcast,influence")?;
    }
    for v in g.nodes() {
        let i = v.index();
        write!(
            out,
            "{},{:.6},{:.6}",
            g.label(v),
            adv.broadcast[i],
            adv.influence[i]
        )?;
        if let Some(c) = control {
            write!(out, ",{:.6},{:.6}", c[i].cent_star, c[i].max_pair_control)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `step,u,v,welfare,min_broadcast,min_influence`. Row 0 holds the initial
/// metrics with empty endpoints; two-edge steps produce two rows.
pub fn write_trace_csv<W: Write>(g: &Graph, trace: &InterventionTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "step,u,v,welfare,min_broadcast,min_influence")?;
    let m = trace.initial;
    writeln!(
        out,
        "0,,,{:.6},{:.6},{:.6}",
        m.welfare, m.min_broadcast, m.min_influence
    )?;
    for s in &trace.steps {
        let m = s.after;
        for e in &s.edges {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                s.step,
                g.label(e.u()),
                g.label(e.v()),
                m.welfare,
                m.min_broadcast,
                m.min_influence
            )?;
        }
    }
    Ok(())
}

/// Raw `i,j,distance` rows, e.g. for plotting a full distribution.
pub fn write_pair_values_csv<W: Write>(
    g: &Graph,
    header: &str,
    values: &[(NodeId, NodeId, f64)],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "i,j,{header}")?;
    for &(i, j, v) in values {
        writeln!(out, "{},{},{:.6}", g.label(i), g.label(j), v)?;
    }
    Ok(())
}
