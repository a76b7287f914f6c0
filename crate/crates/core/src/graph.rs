//! Realized vertex-level graphs and their edge-list file format.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{HcmError, Result};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Intra,
    Inter,
}

impl EdgeKind {
    pub fn tag(self) -> char {
        match self {
            EdgeKind::Intra => 'I',
            EdgeKind::Inter => 'X',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub kind: EdgeKind,
}

/// One community of the realized graph: vertices `offset..offset+size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommunityInstance {
    /// Index of the mixture entry it was drawn from, when known.
    pub shape: Option<u32>,
    pub offset: u32,
    pub size: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HcmGraph {
    vertex_count: usize,
    community_of: Vec<u32>,
    communities: Vec<CommunityInstance>,
    edges: Vec<Edge>,
}

impl HcmGraph {
    /// Assembles a graph from contiguous community blocks and tagged edges.
    pub fn from_parts(communities: Vec<CommunityInstance>, edges: Vec<Edge>) -> Result<Self> {
        let mut community_of = Vec::new();
        for (i, c) in communities.iter().enumerate() {
            if c.offset as usize != community_of.len() || c.size == 0 {
                return Err(HcmError::EdgeList(format!(
                    "community {i} is not a nonempty block starting at vertex {}",
                    community_of.len()
                )));
            }
            community_of.extend(std::iter::repeat(i as u32).take(c.size as usize));
        }
        let vertex_count = community_of.len();
        for e in &edges {
            if e.u as usize >= vertex_count || e.v as usize >= vertex_count {
                return Err(HcmError::EdgeList(format!(
                    "edge ({}, {}) out of range for {vertex_count} vertices",
                    e.u, e.v
                )));
            }
            if e.kind == EdgeKind::Intra && community_of[e.u as usize] != community_of[e.v as usize]
            {
                return Err(HcmError::EdgeList(format!(
                    "intra edge ({}, {}) crosses communities",
                    e.u, e.v
                )));
            }
        }
        Ok(HcmGraph {
            vertex_count,
            community_of,
            communities,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn communities(&self) -> &[CommunityInstance] {
        &self.communities
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.community_of[v] as usize
    }

    pub fn intra_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Intra)
    }

    pub fn inter_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Inter)
    }

    pub fn intra_edge_count(&self) -> usize {
        self.intra_edges().count()
    }

    /// Degrees with self-loops counted twice.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.vertex_count];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }

    /// Number of inter edges at each vertex (self-loops counted twice).
    pub fn inter_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertex_count];
        for e in self.inter_edges() {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }

    /// First self-loop or repeated vertex pair, if any.
    pub fn simplicity_violation(&self) -> Option<String> {
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.u == e.v {
                return Some(format!("self-loop at vertex {}", e.u));
            }
            pairs.push((e.u.min(e.v), e.u.max(e.v)));
        }
        pairs.sort_unstable();
        pairs
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| format!("repeated edge between {} and {}", w[0].0, w[0].1))
    }

    pub fn is_simple(&self) -> bool {
        self.simplicity_violation().is_none()
    }

    /// Writes `u v tag` lines after a `# N=.. n=.. seed=..` header and any
    /// extra comment lines (written verbatim with a `# ` prefix).
    pub fn write_edge_list<W: Write>(
        &self,
        out: W,
        seed: Option<u64>,
        comments: &[String],
    ) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(
            out,
            "# N={} n={} seed={}",
            self.vertex_count,
            self.communities.len(),
            seed
        )?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut line = String::new();
        for e in &self.edges {
            line.clear();
            let _ = writeln!(line, "{} {} {}", e.u, e.v, e.kind.tag());
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads an edge list. Communities are recovered as the connected
    /// components of the intra edges and must be contiguous vertex blocks.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut vertex_count: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if vertex_count.is_none() {
                    vertex_count = parse_header(comment)?;
                }
                continue;
            }
            let bad = || {
                HcmError::EdgeList(format!(
                    "line {}: expected `u v I|X`, got `{trimmed}`",
                    lineno + 1
                ))
            };
            let mut parts = trimmed.split_whitespace();
            let u: u32 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let v: u32 = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let kind = match parts.next() {
                Some("I") => EdgeKind::Intra,
                Some("X") => EdgeKind::Inter,
                _ => return Err(bad()),
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            edges.push(Edge { u, v, kind });
        }
        let vertex_count = vertex_count
            .ok_or_else(|| HcmError::EdgeList("missing `# N=<vertices> ...` header".into()))?;
        if let Some(e) = edges
            .iter()
            .find(|e| e.u as usize >= vertex_count || e.v as usize >= vertex_count)
        {
            return Err(HcmError::EdgeList(format!(
                "edge ({}, {}) out of range for N={vertex_count}",
                e.u, e.v
            )));
        }
        let mut uf = UnionFind::new(vertex_count);
        for e in edges.iter().filter(|e| e.kind == EdgeKind::Intra) {
            uf.union(e.u as usize, e.v as usize);
        }
        let mut communities = Vec::new();
        let mut start = 0usize;
        while start < vertex_count {
            let root = uf.find(start);
            let size = uf.set_size(start);
            let end = start + size;
            if end > vertex_count || (start..end).any(|v| uf.find(v) != root) {
                return Err(HcmError::EdgeList(format!(
                    "community containing vertex {start} is not a contiguous block"
                )));
            }
            communities.push(CommunityInstance {
                shape: None,
                offset: start as u32,
                size: size as u32,
            });
            start = end;
        }
        HcmGraph::from_parts(communities, edges)
    }
}

fn parse_header(comment: &str) -> Result<Option<usize>> {
    for field in comment.split_whitespace() {
        if let Some(value) = field.strip_prefix("N=") {
            return value
                .parse()
                .map(Some)
                .map_err(|_| HcmError::EdgeList(format!("bad vertex count `{value}` in header")));
        }
    }
    Ok(None)
}
