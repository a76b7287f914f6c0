//! Monte-Carlo counterparts of the analytic predictions: bond percolation
//! on realized graphs, sampled spectra, and the probability that a
//! realization is simple.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HcmError, Result};
use crate::graph::HcmGraph;
use crate::mixture::CommunityMixture;
use crate::shape::CommunityShape;
use crate::spectrum::{check_pi, ComponentProfile};
use crate::synthesis::{realize, seeded_rng, SimpleMode};
use crate::union_find::UnionFind;

/// A component larger than this fraction of the vertices counts as giant.
pub const GIANT_THRESHOLD: f64 = 0.01;
pub const MIN_SPECTRUM_REPLICATES: usize = 1000;
pub const MIN_SIMPLE_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean; absent with fewer than two replicates.
    pub std_error: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64], seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = (n >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        McEstimate {
            mean,
            std_error,
            replicates: n,
            seed,
        }
    }

    /// Standard error, zero when unavailable.
    pub fn sigma(&self) -> f64 {
        self.std_error.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationEstimate {
    pub pi: f64,
    /// Largest component as a fraction of all vertices.
    pub largest: McEstimate,
    pub second: McEstimate,
    /// Replicates whose largest component exceeded the giant threshold.
    pub giant_replicates: usize,
}

impl PercolationEstimate {
    fn from_runs(pi: f64, runs: &[(f64, f64)], seed: u64) -> Self {
        let largest: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let second: Vec<f64> = runs.iter().map(|r| r.1).collect();
        PercolationEstimate {
            pi,
            giant_replicates: largest.iter().filter(|&&x| x > GIANT_THRESHOLD).count(),
            largest: McEstimate::from_samples(&largest, seed),
            second: McEstimate::from_samples(&second, seed),
        }
    }

    /// Majority of replicates show a giant component.
    pub fn has_giant(&self) -> bool {
        2 * self.giant_replicates > self.largest.replicates
    }
}

/// Keeps each edge with probability `pi` and returns the largest and
/// second-largest component fractions.
pub fn percolate_once(graph: &HcmGraph, pi: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    for e in graph.edges() {
        if rng.random::<f64>() < pi {
            uf.union(e.u as usize, e.v as usize);
        }
    }
    let (a, b) = uf.two_largest();
    (a as f64 / n as f64, b as f64 / n as f64)
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates == 0 {
        return Err(HcmError::InvalidParameter(
            "need at least one replicate".into(),
        ));
    }
    Ok(())
}

/// Bond percolation on a fixed graph; replicate `i` draws from seed `seed ^ i`.
pub fn percolate_graph(
    graph: &HcmGraph,
    pi: f64,
    replicates: usize,
    seed: u64,
) -> Result<PercolationEstimate> {
    check_pi(pi)?;
    check_replicates(replicates)?;
    let runs: Vec<(f64, f64)> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| percolate_once(graph, pi, &mut seeded_rng(seed ^ i)))
        .collect();
    Ok(PercolationEstimate::from_runs(pi, &runs, seed))
}

/// Percolation with a fresh realization per replicate. Replicate `i`
/// realizes the graph from seed `seed ^ i` and percolates it with an
/// independent stream of the same seed.
pub fn percolate_realizations(
    mixture: &CommunityMixture,
    n: usize,
    pi: f64,
    replicates: usize,
    seed: u64,
) -> Result<PercolationEstimate> {
    check_pi(pi)?;
    check_replicates(replicates)?;
    let runs = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let graph = realize(mixture, n, seed ^ i, SimpleMode::Multigraph)?;
            let mut rng = seeded_rng(seed ^ i);
            rng.set_stream(1);
            Ok(percolate_once(&graph, pi, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PercolationEstimate::from_runs(pi, &runs, seed))
}

/// Sampled spectrum `g(H, v, ·, π)` with a standard error per entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSpectrum {
    pub pmf: Vec<f64>,
    pub std_error: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
}

fn percolate_shape(
    edges: &[(usize, usize)],
    stubs: &[u64],
    pi: f64,
    rng: &mut ChaCha8Rng,
    uf: &mut UnionFind,
    piece_stubs: &mut [u64],
) {
    uf.reset();
    for &(a, b) in edges {
        if rng.random::<f64>() < pi {
            uf.union(a, b);
        }
    }
    piece_stubs.iter_mut().for_each(|x| *x = 0);
    for (v, &b) in stubs.iter().enumerate() {
        let r = uf.find(v);
        piece_stubs[r] += b;
    }
}

pub fn mc_spectrum(
    shape: &CommunityShape,
    vertex: usize,
    pi: f64,
    replicates: usize,
    seed: u64,
) -> Result<McSpectrum> {
    check_pi(pi)?;
    if replicates < MIN_SPECTRUM_REPLICATES {
        return Err(HcmError::InvalidParameter(format!(
            "mc_spectrum needs at least {MIN_SPECTRUM_REPLICATES} replicates (got {replicates})"
        )));
    }
    if vertex >= shape.vertex_count() {
        return Err(HcmError::InvalidParameter(format!(
            "vertex {vertex} out of range"
        )));
    }
    let s = shape.vertex_count();
    let edges: Vec<(usize, usize)> = shape
        .edges()
        .map(|(a, b)| (a as usize, b as usize))
        .collect();
    let stubs: Vec<u64> = shape.out_stubs().map(u64::from).collect();
    let mut counts = vec![0u64; shape.out_degree() as usize + 1];
    let mut rng = seeded_rng(seed);
    let mut uf = UnionFind::new(s);
    let mut piece_stubs = vec![0u64; s];
    for _ in 0..replicates {
        percolate_shape(&edges, &stubs, pi, &mut rng, &mut uf, &mut piece_stubs);
        let r = uf.find(vertex);
        counts[piece_stubs[r] as usize] += 1;
    }
    let r = replicates as f64;
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / r).collect();
    let std_error = pmf
        .iter()
        .map(|&p| (p * (1.0 - p) / (r - 1.0)).sqrt())
        .collect();
    Ok(McSpectrum {
        pmf,
        std_error,
        replicates,
        seed,
    })
}

/// Sample-mean component profile, used for communities beyond the
/// enumeration cap.
pub(crate) fn mc_profile(
    shape: &CommunityShape,
    pi: f64,
    replicates: usize,
    seed: u64,
) -> ComponentProfile {
    let s = shape.vertex_count();
    let edges: Vec<(usize, usize)> = shape
        .edges()
        .map(|(a, b)| (a as usize, b as usize))
        .collect();
    let stubs: Vec<u64> = shape.out_stubs().map(u64::from).collect();
    let mut profile = ComponentProfile::zeros(shape.out_degree() as usize);
    let mut rng = seeded_rng(seed ^ pi.to_bits());
    let mut uf = UnionFind::new(s);
    let mut piece_stubs = vec![0u64; s];
    let replicates = replicates.max(1);
    for _ in 0..replicates {
        percolate_shape(&edges, &stubs, pi, &mut rng, &mut uf, &mut piece_stubs);
        for v in 0..s {
            if uf.find(v) == v {
                let k = piece_stubs[v] as usize;
                profile.pieces[k] += 1.0;
                profile.vertices[k] += uf.set_size(v) as f64;
            }
        }
    }
    let r = replicates as f64;
    profile.pieces.iter_mut().for_each(|x| *x /= r);
    profile.vertices.iter_mut().for_each(|x| *x /= r);
    profile
}

/// Fraction of multigraph realizations that are simple at vertex level.
/// Trial `i` realizes from seed `seed ^ i`.
pub fn simple_fraction(
    mixture: &CommunityMixture,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials < MIN_SIMPLE_TRIALS {
        return Err(HcmError::InvalidParameter(format!(
            "simple_fraction needs at least {MIN_SIMPLE_TRIALS} trials (got {trials})"
        )));
    }
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let g = realize(mixture, n, seed ^ i, SimpleMode::Multigraph)?;
            Ok(if g.is_simple() { 1.0 } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&outcomes, seed))
}
