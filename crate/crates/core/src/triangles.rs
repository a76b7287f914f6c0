//! Random graphs with plain edges and triangles: each vertex carries plain
//! stubs, paired uniformly, and triangle stubs, grouped uniformly into
//! triples. Connected clusters of triangles become the communities.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HcmError, Result};
use crate::graph::{CommunityInstance, Edge, EdgeKind, HcmGraph};
use crate::synthesis::{seeded_rng, SimpleMode, PARITY_REDRAW_CAP};
use crate::union_find::UnionFind;

#[derive(Debug, Clone)]
pub struct TriangleModelRealization {
    pub graph: HcmGraph,
    /// Plain and triangle stub counts per vertex, in graph labels.
    pub plain_degrees: Vec<usize>,
    pub triangle_degrees: Vec<usize>,
    pub parity_redraws: u64,
    pub matchings: u64,
}

struct DegreeSampler {
    values: Vec<usize>,
    index: WeightedIndex<f64>,
}

impl DegreeSampler {
    fn new(pmf: &[(usize, f64)], what: &str) -> Result<Self> {
        let support: Vec<(usize, f64)> = pmf.iter().copied().filter(|&(_, p)| p > 0.0).collect();
        if support.is_empty() || pmf.iter().any(|&(_, p)| !p.is_finite() || p < 0.0) {
            return Err(HcmError::InvalidParameter(format!(
                "{what} pmf has empty or invalid support"
            )));
        }
        let index = WeightedIndex::new(support.iter().map(|s| s.1))
            .map_err(|e| HcmError::InvalidParameter(format!("{what} pmf: {e}")))?;
        Ok(DegreeSampler {
            values: support.into_iter().map(|s| s.0).collect(),
            index,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        self.values[self.index.sample(rng)]
    }
}

/// Mean of a pmf given as `(value, probability)` pairs.
pub fn pmf_mean(pmf: &[(usize, f64)]) -> f64 {
    let total: f64 = pmf.iter().map(|p| p.1).sum();
    pmf.iter().map(|&(k, p)| k as f64 * p).sum::<f64>() / total
}

/// Expected size of the triangle cluster containing a random vertex,
/// `1 + 2E[T]/(3 - 2E[T*])`, where `E[T*]` is the size-biased mean of the
/// triangle degree. Infinite when clusters are supercritical.
pub fn expected_cluster_size(tri_deg: &[(usize, f64)]) -> f64 {
    let total: f64 = tri_deg.iter().map(|p| p.1).sum();
    let m1: f64 = tri_deg.iter().map(|&(k, p)| k as f64 * p).sum::<f64>() / total;
    if m1 == 0.0 {
        return 1.0;
    }
    let m2: f64 = tri_deg
        .iter()
        .map(|&(k, p)| (k * k) as f64 * p)
        .sum::<f64>()
        / total;
    let biased = m2 / m1;
    if 2.0 * biased >= 3.0 {
        return f64::INFINITY;
    }
    1.0 + 2.0 * m1 / (3.0 - 2.0 * biased)
}

pub fn generate_triangle_model(
    edge_deg: &[(usize, f64)],
    tri_deg: &[(usize, f64)],
    n: usize,
    seed: u64,
    mode: SimpleMode,
) -> Result<TriangleModelRealization> {
    if n == 0 {
        return Err(HcmError::InvalidParameter(
            "need at least one vertex".into(),
        ));
    }
    let plain = DegreeSampler::new(edge_deg, "edge degree")?;
    let tri = DegreeSampler::new(tri_deg, "triangle degree")?;
    let mut rng = seeded_rng(seed);

    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for _ in 0..n {
        d1.push(plain.sample(&mut rng));
        d2.push(tri.sample(&mut rng));
    }
    let sum1: usize = d1[..n - 1].iter().sum();
    let sum2: usize = d2[..n - 1].iter().sum();
    let mut parity_redraws = 0;
    while (sum1 + d1[n - 1]) % 2 != 0 || (sum2 + d2[n - 1]) % 3 != 0 {
        if parity_redraws >= PARITY_REDRAW_CAP {
            return Err(HcmError::ParityRepairFailed {
                tries: parity_redraws,
            });
        }
        parity_redraws += 1;
        d1[n - 1] = plain.sample(&mut rng);
        d2[n - 1] = tri.sample(&mut rng);
    }

    let max_attempts = match mode {
        SimpleMode::Multigraph => 1,
        SimpleMode::RejectUntilSimple { max_attempts } => max_attempts.max(1),
    };
    let mut attempts = 0;
    loop {
        attempts += 1;
        let (graph, label) = wire(&d1, &d2, &mut rng)?;
        if mode == SimpleMode::Multigraph || graph.is_simple() {
            let mut plain_degrees = vec![0; n];
            let mut triangle_degrees = vec![0; n];
            for v in 0..n {
                plain_degrees[label[v] as usize] = d1[v];
                triangle_degrees[label[v] as usize] = d2[v];
            }
            return Ok(TriangleModelRealization {
                graph,
                plain_degrees,
                triangle_degrees,
                parity_redraws,
                matchings: attempts,
            });
        }
        if attempts >= max_attempts {
            return Err(HcmError::SimpleRetriesExceeded {
                attempts,
                nu_d: f64::NAN,
                heuristic: f64::NAN,
            });
        }
    }
}

/// Groups triangle stubs into triples and pairs plain stubs, relabelling
/// vertices so each triangle cluster is a contiguous block ordered by its
/// lowest original vertex. Returns the graph and the new label of each
/// original vertex.
fn wire(d1: &[usize], d2: &[usize], rng: &mut ChaCha8Rng) -> Result<(HcmGraph, Vec<u32>)> {
    let n = d1.len();
    let mut tri_stubs: Vec<u32> = Vec::with_capacity(d2.iter().sum());
    for (v, &k) in d2.iter().enumerate() {
        tri_stubs.extend(std::iter::repeat(v as u32).take(k));
    }
    tri_stubs.shuffle(rng);
    let mut uf = UnionFind::new(n);
    for t in tri_stubs.chunks_exact(3) {
        uf.union(t[0] as usize, t[1] as usize);
        uf.union(t[1] as usize, t[2] as usize);
    }

    let mut block_of_root = vec![u32::MAX; n];
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if block_of_root[r] == u32::MAX {
            block_of_root[r] = blocks.len() as u32;
            blocks.push(Vec::new());
        }
        blocks[block_of_root[r] as usize].push(v as u32);
    }
    let mut label = vec![0u32; n];
    let mut communities = Vec::with_capacity(blocks.len());
    let mut next = 0u32;
    for b in &blocks {
        communities.push(CommunityInstance {
            shape: None,
            offset: next,
            size: b.len() as u32,
        });
        for &v in b {
            label[v as usize] = next;
            next += 1;
        }
    }

    let mut edges = Vec::with_capacity(tri_stubs.len() + d1.iter().sum::<usize>() / 2);
    for t in tri_stubs.chunks_exact(3) {
        let (a, b, c) = (
            label[t[0] as usize],
            label[t[1] as usize],
            label[t[2] as usize],
        );
        for (u, v) in [(a, b), (b, c), (a, c)] {
            edges.push(Edge {
                u,
                v,
                kind: EdgeKind::Intra,
            });
        }
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(d1.iter().sum());
    for (v, &k) in d1.iter().enumerate() {
        stubs.extend(std::iter::repeat(label[v]).take(k));
    }
    stubs.shuffle(rng);
    edges.extend(stubs.chunks_exact(2).map(|p| Edge {
        u: p[0],
        v: p[1],
        kind: EdgeKind::Inter,
    }));
    Ok((HcmGraph::from_parts(communities, edges)?, label))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleClusters {
    /// Fraction of clusters of each size.
    pub size_pmf: BTreeMap<usize, f64>,
    pub cluster_count: usize,
    /// Mean size of the cluster containing a uniformly chosen vertex,
    /// `Σ s² / Σ s`. Zero for an empty graph.
    pub size_biased_mean: f64,
}

/// Components of the triangle (intra) edges.
pub fn extract_triangle_communities(graph: &HcmGraph) -> TriangleClusters {
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    for e in graph.intra_edges() {
        uf.union(e.u as usize, e.v as usize);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut squares = 0.0;
    for v in 0..n {
        if uf.find(v) == v {
            let s = uf.set_size(v);
            *counts.entry(s).or_default() += 1;
            squares += (s * s) as f64;
        }
    }
    let cluster_count: usize = counts.values().sum();
    TriangleClusters {
        size_pmf: counts
            .into_iter()
            .map(|(s, c)| (s, c as f64 / cluster_count as f64))
            .collect(),
        cluster_count,
        size_biased_mean: if n == 0 { 0.0 } else { squares / n as f64 },
    }
}
