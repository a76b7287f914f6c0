//! Community shapes: a small graph on vertices `0..s` plus the number of
//! half-edges each vertex sends to other communities.
//!
//! Shapes from the parameterized families (paths, stars, complete graphs)
//! are stored structurally so that truncated power-law mixtures with
//! thousands of large members stay cheap; equality is always by labeled
//! edge set and stub vector.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{HcmError, Result};
use crate::union_find::UnionFind;

/// Intra-community edge structure.
#[derive(Debug, Clone)]
pub enum Layout {
    /// Explicit edges, each stored as `(min, max)` and sorted. Repeated pairs
    /// and self-loops are kept so validation can report them.
    Listed(Vec<(u32, u32)>),
    /// Path `0 - 1 - ... - (s-1)`.
    Path,
    /// Vertex 0 adjacent to every other vertex.
    Star,
    /// Every pair adjacent.
    Complete,
}

/// Per-vertex inter-community stub counts, run-length encoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubRuns {
    starts: Vec<u32>,
    values: Vec<u32>,
    len: u32,
    total: u64,
}

impl StubRuns {
    pub fn from_values(values: &[u32]) -> Self {
        Self::from_runs(values.iter().map(|&v| (1, v)))
    }

    pub fn uniform(len: usize, value: u32) -> Self {
        Self::from_runs(std::iter::once((len, value)))
    }

    /// Builds from `(count, value)` runs; adjacent equal runs are merged.
    pub fn from_runs<I: IntoIterator<Item = (usize, u32)>>(runs: I) -> Self {
        let mut starts = Vec::new();
        let mut values: Vec<u32> = Vec::new();
        let mut len = 0u32;
        let mut total = 0u64;
        for (count, value) in runs {
            if count == 0 {
                continue;
            }
            if values.last() != Some(&value) {
                starts.push(len);
                values.push(value);
            }
            len += count as u32;
            total += count as u64 * value as u64;
        }
        StubRuns {
            starts,
            values,
            len,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, v: usize) -> u32 {
        debug_assert!(v < self.len as usize);
        let idx = self.starts.partition_point(|&s| s as usize <= v) - 1;
        self.values[idx]
    }

    /// `(first vertex, run length, value)` triples.
    pub fn runs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.values.len()).map(move |i| {
            let start = self.starts[i] as usize;
            let end = self
                .starts
                .get(i + 1)
                .map_or(self.len as usize, |&e| e as usize);
            (start, end - start, self.values[i])
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs()
            .flat_map(|(_, count, value)| std::iter::repeat(value).take(count))
    }
}

/// Problems that make a shape unusable as a community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeDefect {
    SelfLoop { vertex: u32 },
    RepeatedEdge { a: u32, b: u32 },
    Disconnected,
}

impl fmt::Display for ShapeDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeDefect::SelfLoop { vertex } => {
                write!(f, "self-loop in community at vertex {vertex}")
            }
            ShapeDefect::RepeatedEdge { a, b } => {
                write!(f, "repeated edge in community between {a} and {b}")
            }
            ShapeDefect::Disconnected => write!(f, "disconnected community"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CommunityShape {
    vertex_count: u32,
    layout: Layout,
    stubs: StubRuns,
}

impl CommunityShape {
    /// Builds a shape from an explicit edge list. Structural shapes
    /// (path, star, complete) are recognized and stored compactly; invalid
    /// shapes (self-loops, repeated edges, disconnected) are accepted here
    /// and reported by validation.
    pub fn new<I>(vertex_count: usize, edges: I, out_stubs: &[u32]) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if out_stubs.len() != vertex_count {
            return Err(HcmError::InvalidShape(format!(
                "{} stub counts for {} vertices",
                out_stubs.len(),
                vertex_count
            )));
        }
        let mut listed = Vec::new();
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(HcmError::InvalidShape(format!(
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                )));
            }
            listed.push((a.min(b) as u32, a.max(b) as u32));
        }
        listed.sort_unstable();
        let layout = recognize(vertex_count, listed);
        Self::from_layout(vertex_count, layout, StubRuns::from_values(out_stubs))
    }

    pub fn from_layout(vertex_count: usize, layout: Layout, stubs: StubRuns) -> Result<Self> {
        if vertex_count == 0 {
            return Err(HcmError::InvalidShape(
                "a community needs at least one vertex".into(),
            ));
        }
        if vertex_count > u32::MAX as usize / 2 {
            return Err(HcmError::InvalidShape(format!(
                "{vertex_count} vertices is too many"
            )));
        }
        if stubs.len() != vertex_count {
            return Err(HcmError::InvalidShape(format!(
                "{} stub counts for {} vertices",
                stubs.len(),
                vertex_count
            )));
        }
        if let Layout::Listed(edges) = &layout {
            if edges
                .iter()
                .any(|&(a, b)| b as usize >= vertex_count || a > b)
            {
                return Err(HcmError::InvalidShape("listed edge out of range".into()));
            }
        }
        Ok(CommunityShape {
            vertex_count: vertex_count as u32,
            layout,
            stubs,
        })
    }

    /// One vertex with `stubs` half-edges.
    pub fn single_vertex(stubs: u32) -> Self {
        CommunityShape {
            vertex_count: 1,
            layout: Layout::Listed(Vec::new()),
            stubs: StubRuns::uniform(1, stubs),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count as usize
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn stub_runs(&self) -> &StubRuns {
        &self.stubs
    }

    /// `d_v^(b)`.
    pub fn out_stub(&self, v: usize) -> u32 {
        self.stubs.get(v)
    }

    pub fn out_stubs(&self) -> impl Iterator<Item = u32> + '_ {
        self.stubs.iter()
    }

    /// `d_H`, the community's macro degree.
    pub fn out_degree(&self) -> u64 {
        self.stubs.total()
    }

    pub fn edge_count(&self) -> usize {
        let s = self.vertex_count as usize;
        match &self.layout {
            Layout::Listed(e) => e.len(),
            Layout::Path | Layout::Star => s - 1,
            Layout::Complete => s * (s - 1) / 2,
        }
    }

    pub fn edges(&self) -> Box<dyn Iterator<Item = (u32, u32)> + '_> {
        let s = self.vertex_count;
        match &self.layout {
            Layout::Listed(e) => Box::new(e.iter().copied()),
            Layout::Path => Box::new((1..s).map(|i| (i - 1, i))),
            Layout::Star => Box::new((1..s).map(|i| (0, i))),
            Layout::Complete => Box::new((0..s).flat_map(move |a| (a + 1..s).map(move |b| (a, b)))),
        }
    }

    /// `d_v^(c)`. Linear in the edge count for listed shapes.
    pub fn intra_degree(&self, v: usize) -> u32 {
        let s = self.vertex_count;
        let v = v as u32;
        match &self.layout {
            Layout::Listed(e) => e
                .iter()
                .map(|&(a, b)| (a == v) as u32 + (b == v) as u32)
                .sum(),
            Layout::Path => {
                if s == 1 {
                    0
                } else if v == 0 || v == s - 1 {
                    1
                } else {
                    2
                }
            }
            Layout::Star => {
                if v == 0 {
                    s - 1
                } else {
                    1
                }
            }
            Layout::Complete => s - 1,
        }
    }

    pub fn intra_degrees(&self) -> Vec<u32> {
        match &self.layout {
            Layout::Listed(e) => {
                let mut deg = vec![0u32; self.vertex_count()];
                for &(a, b) in e {
                    deg[a as usize] += 1;
                    deg[b as usize] += 1;
                }
                deg
            }
            _ => (0..self.vertex_count())
                .map(|v| self.intra_degree(v))
                .collect(),
        }
    }

    /// Total degree `d_v = d_v^(c) + d_v^(b)` of every vertex.
    pub fn degrees(&self) -> Vec<u64> {
        self.intra_degrees()
            .into_iter()
            .zip(self.out_stubs())
            .map(|(c, b)| c as u64 + b as u64)
            .collect()
    }

    /// Number of vertices of each total degree. Structured layouts are
    /// counted per stub run without materializing the degree vector.
    pub fn degree_counts(&self) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        let s = self.vertex_count;
        let (specials, bulk): (Vec<u32>, u32) = match &self.layout {
            Layout::Listed(_) => {
                for d in self.degrees() {
                    *counts.entry(d).or_insert(0) += 1;
                }
                return counts;
            }
            Layout::Path => {
                let mut sp = vec![0, s - 1];
                sp.dedup();
                (sp, 2)
            }
            Layout::Star => (vec![0], 1),
            Layout::Complete => (Vec::new(), s - 1),
        };
        for (start, len, stubs) in self.stubs.runs() {
            let mut bulk_count = len as u64;
            for &sp in &specials {
                let sp = sp as usize;
                if sp >= start && sp < start + len {
                    bulk_count -= 1;
                    *counts
                        .entry(self.intra_degree(sp) as u64 + stubs as u64)
                        .or_insert(0) += 1;
                }
            }
            if bulk_count > 0 {
                *counts.entry(bulk as u64 + stubs as u64).or_insert(0) += bulk_count;
            }
        }
        counts
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b || a >= self.vertex_count() || b >= self.vertex_count() {
            return match &self.layout {
                Layout::Listed(e) if a == b => e.binary_search(&(a as u32, a as u32)).is_ok(),
                _ => false,
            };
        }
        let (lo, hi) = (a.min(b), a.max(b));
        match &self.layout {
            Layout::Listed(e) => e.binary_search(&(lo as u32, hi as u32)).is_ok(),
            Layout::Path => hi == lo + 1,
            Layout::Star => lo == 0,
            Layout::Complete => true,
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (a, b) in self.edges() {
            adj[a as usize].push(b);
            if a != b {
                adj[b as usize].push(a);
            }
        }
        adj
    }

    /// Self-loops, repeated pairs and disconnection, in that order.
    pub fn defects(&self) -> Vec<ShapeDefect> {
        let mut out = Vec::new();
        if let Layout::Listed(edges) = &self.layout {
            for w in edges.windows(2) {
                if w[0] == w[1] && w[0].0 != w[0].1 {
                    out.push(ShapeDefect::RepeatedEdge {
                        a: w[0].0,
                        b: w[0].1,
                    });
                }
            }
            out.dedup();
            for &(a, b) in edges {
                if a == b {
                    out.insert(0, ShapeDefect::SelfLoop { vertex: a });
                }
            }
        }
        if !self.is_connected() {
            out.push(ShapeDefect::Disconnected);
        }
        out
    }

    pub fn is_simple(&self) -> bool {
        match &self.layout {
            Layout::Listed(e) => {
                e.iter().all(|&(a, b)| a != b) && e.windows(2).all(|w| w[0] != w[1])
            }
            _ => true,
        }
    }

    pub fn is_connected(&self) -> bool {
        match &self.layout {
            Layout::Listed(e) => {
                let mut uf = UnionFind::new(self.vertex_count());
                let mut parts = self.vertex_count();
                for &(a, b) in e {
                    if uf.union(a as usize, b as usize) {
                        parts -= 1;
                    }
                }
                parts == 1
            }
            _ => true,
        }
    }

    /// Simple, connected and acyclic.
    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.vertex_count() && self.is_simple() && self.is_connected()
    }
}

impl PartialEq for CommunityShape {
    fn eq(&self, other: &Self) -> bool {
        if self.vertex_count != other.vertex_count || self.stubs != other.stubs {
            return false;
        }
        match (&self.layout, &other.layout) {
            (Layout::Path, Layout::Path)
            | (Layout::Star, Layout::Star)
            | (Layout::Complete, Layout::Complete) => true,
            (Layout::Listed(a), Layout::Listed(b)) => a == b,
            _ => self.edge_count() == other.edge_count() && self.edges().eq(other.edges()),
        }
    }
}

fn recognize(vertex_count: usize, edges: Vec<(u32, u32)>) -> Layout {
    let s = vertex_count as u32;
    let m = edges.len();
    if vertex_count < 2 || m == 0 {
        return Layout::Listed(edges);
    }
    let simple = edges.iter().all(|&(a, b)| a != b) && edges.windows(2).all(|w| w[0] != w[1]);
    if !simple {
        return Layout::Listed(edges);
    }
    if m + 1 == vertex_count {
        if edges
            .iter()
            .enumerate()
            .all(|(i, &e)| e == (i as u32, i as u32 + 1))
        {
            return Layout::Path;
        }
        if edges
            .iter()
            .enumerate()
            .all(|(i, &e)| e == (0, i as u32 + 1))
        {
            return Layout::Star;
        }
    }
    if m == (s as usize) * (s as usize - 1) / 2 {
        return Layout::Complete;
    }
    Layout::Listed(edges)
}
