//! Measurements on realized graphs and the matching analytic predictions
//! for degrees and clustering.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{HcmError, Result};
use crate::graph::HcmGraph;
use crate::mixture::CommunityMixture;
use crate::numeric::CompensatedSum;
use crate::shape::{CommunityShape, Layout};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub vertex_count: usize,
    pub largest: usize,
    pub largest_fraction: f64,
    pub second_fraction: f64,
    /// Communities inside the largest component, over all communities.
    pub community_fraction: f64,
    /// Component size → number of components of that size.
    pub size_histogram: BTreeMap<usize, usize>,
}

pub fn components(graph: &HcmGraph) -> ComponentReport {
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    for e in graph.edges() {
        uf.union(e.u as usize, e.v as usize);
    }
    let mut size_histogram = BTreeMap::new();
    let mut largest = 0;
    let mut second = 0;
    let mut largest_root = usize::MAX;
    for v in 0..n {
        if uf.find(v) == v {
            let size = uf.set_size(v);
            *size_histogram.entry(size).or_insert(0) += 1;
            if size > largest {
                second = largest;
                largest = size;
                largest_root = v;
            } else if size > second {
                second = size;
            }
        }
    }
    let communities = graph.communities();
    let in_largest = communities
        .iter()
        .filter(|c| uf.find(c.offset as usize) == largest_root)
        .count();
    let frac = |x: usize| if n == 0 { 0.0 } else { x as f64 / n as f64 };
    ComponentReport {
        vertex_count: n,
        largest,
        largest_fraction: frac(largest),
        second_fraction: frac(second),
        community_fraction: if communities.is_empty() {
            0.0
        } else {
            in_largest as f64 / communities.len() as f64
        },
        size_histogram,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeHistogram {
    pub vertex_count: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl DegreeHistogram {
    pub fn from_samples<I: IntoIterator<Item = u64>>(samples: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut vertex_count = 0;
        for d in samples {
            *counts.entry(d).or_insert(0) += 1;
            vertex_count += 1;
        }
        DegreeHistogram {
            vertex_count,
            counts,
        }
    }

    pub fn fraction(&self, k: u64) -> f64 {
        self.counts.get(&k).copied().unwrap_or(0) as f64 / self.vertex_count as f64
    }

    pub fn pmf(&self) -> BTreeMap<u64, f64> {
        self.counts.keys().map(|&k| (k, self.fraction(k))).collect()
    }

    pub fn mean(&self) -> f64 {
        let total: u64 = self.counts.iter().map(|(&k, &c)| k * c).sum();
        total as f64 / self.vertex_count as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,count,frac")?;
        for (&k, &c) in &self.counts {
            writeln!(out, "{k},{c},{}", self.fraction(k))?;
        }
        Ok(())
    }
}

/// Empirical degree law; self-loops add two to their endpoint.
pub fn degree_histogram(graph: &HcmGraph) -> DegreeHistogram {
    DegreeHistogram::from_samples(graph.degrees())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    /// Closed over connected triples.
    pub global: f64,
    /// Degree → mean fraction of connected neighbor pairs, for `k ≥ 2`.
    pub per_degree: BTreeMap<u64, f64>,
}

impl Clustering {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,C_k")?;
        for (k, c) in &self.per_degree {
            writeln!(out, "{k},{c}")?;
        }
        Ok(())
    }
}

/// Triangle-based clustering of a simple graph.
pub fn clustering(graph: &HcmGraph) -> Result<Clustering> {
    if let Some(problem) = graph.simplicity_violation() {
        return Err(HcmError::NotSimple(format!(
            "clustering needs a simple graph ({problem})"
        )));
    }
    let n = graph.vertex_count();
    let degree = graph.degrees();
    // Orient each edge toward the endpoint of higher (degree, index) rank so
    // every triangle is found exactly once from its lowest-ranked vertex.
    let rank_lt = |a: usize, b: usize| (degree[a], a) < (degree[b], b);
    let mut start = vec![0usize; n + 1];
    for e in graph.edges() {
        let (a, b) = (e.u as usize, e.v as usize);
        let low = if rank_lt(a, b) { a } else { b };
        start[low + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut out = vec![0u32; graph.edge_count()];
    for e in graph.edges() {
        let (a, b) = (e.u as usize, e.v as usize);
        let (low, high) = if rank_lt(a, b) { (a, b) } else { (b, a) };
        out[fill[low]] = high as u32;
        fill[low] += 1;
    }
    for v in 0..n {
        out[start[v]..start[v + 1]].sort_unstable();
    }
    let mut triangles_at = vec![0u64; n];
    for u in 0..n {
        let nu = &out[start[u]..start[u + 1]];
        for &v in nu {
            let nv = &out[start[v as usize]..start[v as usize + 1]];
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        triangles_at[u] += 1;
                        triangles_at[v as usize] += 1;
                        triangles_at[nu[i] as usize] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    let mut closed = 0u64;
    let mut triples = 0u64;
    let mut by_degree: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for v in 0..n {
        let d = degree[v];
        closed += triangles_at[v];
        triples += d * d.saturating_sub(1) / 2;
        if d >= 2 {
            let slot = by_degree.entry(d).or_insert((0, 0));
            slot.0 += triangles_at[v];
            slot.1 += 1;
        }
    }
    let global = if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    };
    let per_degree = by_degree
        .into_iter()
        .map(|(k, (t, count))| (k, t as f64 / ((k * (k - 1) / 2) as f64 * count as f64)))
        .collect();
    Ok(Clustering { global, per_degree })
}

/// Number of adjacent pairs among the intra-community neighbors of each vertex.
fn closed_pairs(shape: &CommunityShape) -> Vec<u64> {
    let s = shape.vertex_count();
    match shape.layout() {
        Layout::Complete => {
            let m = (s as u64).saturating_sub(1);
            vec![m * m.saturating_sub(1) / 2; s]
        }
        Layout::Path | Layout::Star => vec![0; s],
        Layout::Listed(_) => {
            let adj = shape.adjacency();
            adj.iter()
                .map(|nbrs| {
                    let mut count = 0;
                    for (i, &a) in nbrs.iter().enumerate() {
                        for &b in &nbrs[i + 1..] {
                            if shape.has_edge(a as usize, b as usize) {
                                count += 1;
                            }
                        }
                    }
                    count
                })
                .collect()
        }
    }
}

/// Limiting clustering of a realized mixture, counting only triangles
/// inside communities:
/// `C = 2 Σ_H P(H) Σ_v P_v / Σ_H P(H) Σ_v d_v(d_v−1)` and
/// `C_k = 2 Σ_H P(H) Σ_{v: d_v=k} P_v / (k(k−1) Σ_H P(H) n_k)`,
/// where `P_v` counts adjacent pairs of intra neighbors of `v`.
pub fn analytic_clustering(mixture: &CommunityMixture) -> Clustering {
    let mut closed = CompensatedSum::new();
    let mut triples = CompensatedSum::new();
    let mut by_degree: BTreeMap<u64, (CompensatedSum, CompensatedSum)> = BTreeMap::new();
    for (shape, w) in mixture.iter() {
        if matches!(shape.layout(), Layout::Path | Layout::Star) {
            for (d, count) in shape.degree_counts() {
                triples.add(w * count as f64 * (d * d.saturating_sub(1)) as f64);
                if d >= 2 {
                    by_degree.entry(d).or_default().1.add(w * count as f64);
                }
            }
            continue;
        }
        let pairs = closed_pairs(shape);
        for (d, p) in shape.degrees().into_iter().zip(pairs) {
            closed.add(2.0 * w * p as f64);
            triples.add(w * (d * d.saturating_sub(1)) as f64);
            if d >= 2 {
                let slot = by_degree.entry(d).or_default();
                slot.0.add(2.0 * w * p as f64);
                slot.1.add(w);
            }
        }
    }
    let triples = triples.value();
    let global = if triples > 0.0 {
        closed.value() / triples
    } else {
        0.0
    };
    let per_degree = by_degree
        .into_iter()
        .map(|(k, (c, count))| (k, c.value() / ((k * (k - 1)) as f64 * count.value())))
        .collect();
    Clustering { global, per_degree }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    /// Estimated `τ` in `P(X = k) ∝ k^{-τ}`.
    pub exponent: f64,
    /// Fitted log-log slope of the CCDF, `1 − τ`.
    pub slope: f64,
    pub window: (f64, f64),
    /// Smallest and largest values inside the quantile window.
    pub range: (u64, u64),
    /// `(k, P(X ≥ k))` for every distinct sample value.
    pub ccdf: Vec<(u64, f64)>,
}

impl TailFit {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,ccdf")?;
        for (k, c) in &self.ccdf {
            writeln!(out, "{k},{c}")?;
        }
        Ok(())
    }
}

pub const DEFAULT_TAIL_WINDOW: (f64, f64) = (0.5, 0.99);
pub const MIN_TAIL_SAMPLES: usize = 100;

/// Power-law tail exponent from a least-squares fit of `ln P(X ≥ k)` against
/// `ln(k − 1/2)` over the distinct values between two sample quantiles. The
/// half-unit shift is the usual continuity correction for a discrete law:
/// `Σ_{j≥k} j^{-τ}` behaves like `(k − 1/2)^{1−τ}/(τ−1)` already for small `k`.
pub fn tail_exponent(samples: &[u64], window: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = window;
    if !(0.0..1.0).contains(&lo) || !(lo..=1.0).contains(&hi) || lo >= hi {
        return Err(HcmError::InvalidParameter(format!(
            "quantile window ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
        )));
    }
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(HcmError::TailFit(format!(
            "{} samples, need at least {MIN_TAIL_SAMPLES}",
            samples.len()
        )));
    }
    if samples.contains(&0) {
        return Err(HcmError::TailFit("samples must be positive".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let quantile = |q: f64| sorted[((q * (n - 1) as f64).floor() as usize).min(n - 1)];
    let (k_lo, k_hi) = (quantile(lo), quantile(hi));

    let mut ccdf = Vec::new();
    let mut i = 0;
    while i < n {
        let k = sorted[i];
        ccdf.push((k, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == k {
            i += 1;
        }
    }
    let points: Vec<(f64, f64)> = ccdf
        .iter()
        .filter(|&&(k, _)| k >= k_lo && k <= k_hi)
        .map(|&(k, c)| ((k as f64 - 0.5).ln(), c.ln()))
        .collect();
    if points.len() < 2 {
        return Err(HcmError::TailFit(format!(
            "only {} distinct value(s) in the quantile window; the CCDF does not vary",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(TailFit {
        exponent: 1.0 - slope,
        slope,
        window,
        range: (k_lo, k_hi),
        ccdf,
    })
}

pub fn write_component_csv<W: Write>(report: &ComponentReport, mut out: W) -> Result<()> {
    writeln!(out, "size,count")?;
    for (size, count) in &report.size_histogram {
        writeln!(out, "{size},{count}")?;
    }
    Ok(())
}
