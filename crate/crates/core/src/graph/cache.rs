//! Versioned binary cache of an [`InfluenceGraph`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "QIMCSR\0\1"
//! version    u32
//! source     u32      0 unassigned, 1 explicit, 2 wc, 3 tr, 4 un
//! param      f64      p_t or p_u (0 otherwise)
//! rng_seed   u64
//! n          u64
//! m          u64
//! labels     n   x u64
//! out_off    n+1 x u64
//! out_nbr    m   x u32
//! out_prob   m   x f64
//! in_off     n+1 x u64
//! in_nbr     m   x u32
//! in_prob    m   x f64
//! ```

use std::io::{self, Write};

use super::{Adjacency, InfluenceGraph, ModelKind, ProbabilityModel, ProbabilitySource};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: [u8; 8] = *b"QIMCSR\0\x01";
pub const BINARY_VERSION: u32 = 1;

fn encode_source(source: ProbabilitySource) -> (u32, f64, u64) {
    match source {
        ProbabilitySource::Unassigned => (0, 0.0, 0),
        ProbabilitySource::Explicit => (1, 0.0, 0),
        ProbabilitySource::Model(m) => match m.kind {
            ModelKind::Wc => (2, 0.0, m.rng_seed),
            ModelKind::Tr => (3, m.p_t, m.rng_seed),
            ModelKind::Un => (4, m.p_u, m.rng_seed),
        },
    }
}

fn decode_source(code: u32, param: f64, seed: u64) -> Result<ProbabilitySource> {
    let model = |kind| ProbabilitySource::Model(ProbabilityModel {
        kind,
        rng_seed: seed,
        ..ProbabilityModel::default()
    });
    Ok(match code {
        0 => ProbabilitySource::Unassigned,
        1 => ProbabilitySource::Explicit,
        2 => model(ModelKind::Wc),
        3 => ProbabilitySource::Model(ProbabilityModel {
            kind: ModelKind::Tr,
            p_t: param,
            rng_seed: seed,
            ..ProbabilityModel::default()
        }),
        4 => ProbabilitySource::Model(ProbabilityModel {
            kind: ModelKind::Un,
            p_u: param,
            rng_seed: seed,
            ..ProbabilityModel::default()
        }),
        c => return Err(Error::Format(format!("unknown probability source code {c}"))),
    })
}

fn write_adjacency<W: Write>(out: &mut W, adj: &Adjacency) -> io::Result<()> {
    for &o in &adj.offsets {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &v in &adj.neighbors {
        out.write_all(&v.to_le_bytes())?;
    }
    for &p in &adj.probs {
        out.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

/// Serializes the graph; identical graphs produce identical bytes.
pub fn write_binary<W: Write>(graph: &InfluenceGraph, mut out: W) -> io::Result<()> {
    let (code, param, seed) = encode_source(graph.source);
    out.write_all(&BINARY_MAGIC)?;
    out.write_all(&BINARY_VERSION.to_le_bytes())?;
    out.write_all(&code.to_le_bytes())?;
    out.write_all(&param.to_le_bytes())?;
    out.write_all(&seed.to_le_bytes())?;
    out.write_all(&(graph.vertex_count() as u64).to_le_bytes())?;
    out.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
    for &l in &graph.labels {
        out.write_all(&l.to_le_bytes())?;
    }
    write_adjacency(&mut out, &graph.out_adj)?;
    write_adjacency(&mut out, &graph.in_adj)?;
    out.flush()
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("truncated file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self, count: u64, width: usize) -> Result<usize> {
        let count = usize::try_from(count).map_err(|_| Error::Format("size overflow".into()))?;
        if count.saturating_mul(width) > self.bytes.len() - self.pos {
            return Err(Error::Format("truncated file".into()));
        }
        Ok(count)
    }

    fn adjacency(&mut self, n: u64, m: u64) -> Result<Adjacency> {
        let n1 = self.len(n + 1, 8)?;
        let offsets = (0..n1)
            .map(|_| self.u64().map(|o| o as usize))
            .collect::<Result<Vec<_>>>()?;
        let m = self.len(m, 12)?;
        let neighbors = (0..m).map(|_| self.u32()).collect::<Result<Vec<_>>>()?;
        let probs = (0..m).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        Ok(Adjacency {
            offsets,
            neighbors,
            probs,
        })
    }
}

/// Parses a binary cache and re-validates the graph invariants.
pub fn read_binary(bytes: &[u8]) -> Result<InfluenceGraph> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(8)? != BINARY_MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = c.u32()?;
    if version != BINARY_VERSION {
        return Err(Error::Format(format!(
            "unsupported version {version}, expected {BINARY_VERSION}"
        )));
    }
    let code = c.u32()?;
    let param = c.f64()?;
    let seed = c.u64()?;
    let source = decode_source(code, param, seed)?;
    let n = c.u64()?;
    let m = c.u64()?;
    let nl = c.len(n, 8)?;
    let labels = (0..nl).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
    let out_adj = c.adjacency(n, m)?;
    let in_adj = c.adjacency(n, m)?;
    if c.pos != bytes.len() {
        return Err(Error::Format("trailing bytes".into()));
    }
    InfluenceGraph::from_csr(labels, out_adj, in_adj, source)
}
