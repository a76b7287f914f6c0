//! Sampling communities from a mixture and wiring them with a uniform
//! matching of their half-edges.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HcmError, Result};
use crate::graph::{CommunityInstance, Edge, EdgeKind, HcmGraph};
use crate::mixture::CommunityMixture;
use crate::union_find::UnionFind;

pub const PARITY_REDRAW_CAP: u64 = 1_000_000;
pub const DEFAULT_SIMPLE_RETRY_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimpleMode {
    #[default]
    Multigraph,
    /// Rematch the inter-community stubs until the vertex-level graph has
    /// no self-loops or repeated pairs, giving up after `max_attempts`.
    RejectUntilSimple { max_attempts: u64 },
}

impl SimpleMode {
    pub fn reject_until_simple() -> Self {
        SimpleMode::RejectUntilSimple {
            max_attempts: DEFAULT_SIMPLE_RETRY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunitySample {
    /// Mixture entry index of each community, in draw order.
    pub shapes: Vec<u32>,
    /// Times the final community was redrawn to make the stub total even.
    pub parity_redraws: u64,
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub graph: HcmGraph,
    pub parity_redraws: u64,
    /// Number of matchings drawn (1 unless rejecting non-simple outcomes).
    pub matchings: u64,
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` i.i.d. draws from the mixture; if the total macro degree is odd the
/// final draw is repeated until it is even.
pub fn sample_communities(
    mixture: &CommunityMixture,
    n: usize,
    seed: u64,
) -> Result<CommunitySample> {
    sample_with(mixture, n, &mut seeded_rng(seed))
}

fn sample_with(
    mixture: &CommunityMixture,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CommunitySample> {
    if n == 0 {
        return Err(HcmError::InvalidParameter(
            "need at least one community".into(),
        ));
    }
    let dist = WeightedIndex::new(mixture.iter().map(|(_, w)| w))
        .map_err(|e| HcmError::InvalidParameter(format!("mixture weights: {e}")))?;
    let degree: Vec<u64> = mixture.iter().map(|(s, _)| s.out_degree()).collect();
    let mut shapes: Vec<u32> = (0..n).map(|_| dist.sample(rng) as u32).collect();
    let odd = shapes.iter().map(|&i| degree[i as usize] & 1).sum::<u64>() & 1;
    let mut parity_redraws = 0;
    if odd == 1 {
        let last = shapes.len() - 1;
        let rest = odd ^ (degree[shapes[last] as usize] & 1);
        loop {
            if parity_redraws == PARITY_REDRAW_CAP {
                return Err(HcmError::ParityRepairFailed {
                    tries: parity_redraws,
                });
            }
            parity_redraws += 1;
            shapes[last] = dist.sample(rng) as u32;
            if (rest + degree[shapes[last] as usize]) & 1 == 0 {
                break;
            }
        }
    }
    Ok(CommunitySample {
        shapes,
        parity_redraws,
    })
}

pub fn realize(
    mixture: &CommunityMixture,
    n: usize,
    seed: u64,
    mode: SimpleMode,
) -> Result<HcmGraph> {
    realize_detailed(mixture, n, seed, mode).map(|r| r.graph)
}

pub fn realize_detailed(
    mixture: &CommunityMixture,
    n: usize,
    seed: u64,
    mode: SimpleMode,
) -> Result<Realization> {
    mixture.ensure_structurally_valid()?;
    let mut rng = seeded_rng(seed);
    let sample = sample_with(mixture, n, &mut rng)?;
    let entries = mixture.entries();

    let mut communities = Vec::with_capacity(n);
    let mut intra = Vec::new();
    let mut stubs: Vec<u32> = Vec::new();
    let mut offset = 0u64;
    for &idx in &sample.shapes {
        let shape = &entries[idx as usize].shape;
        let size = shape.vertex_count() as u64;
        if offset + size > u32::MAX as u64 {
            return Err(HcmError::InvalidParameter(
                "graph exceeds 2^32 vertices".into(),
            ));
        }
        let base = offset as u32;
        communities.push(CommunityInstance {
            shape: Some(idx),
            offset: base,
            size: size as u32,
        });
        intra.extend(shape.edges().map(|(a, b)| Edge {
            u: base + a,
            v: base + b,
            kind: EdgeKind::Intra,
        }));
        for (start, len, count) in shape.stub_runs().runs() {
            for v in start..start + len {
                stubs.extend(std::iter::repeat(base + v as u32).take(count as usize));
            }
        }
        offset += size;
    }

    let max_attempts = match mode {
        SimpleMode::Multigraph => 1,
        SimpleMode::RejectUntilSimple { max_attempts } => max_attempts.max(1),
    };
    let mut attempts = 0;
    loop {
        attempts += 1;
        stubs.shuffle(&mut rng);
        let mut edges = intra.clone();
        edges.extend(stubs.chunks_exact(2).map(|p| Edge {
            u: p[0],
            v: p[1],
            kind: EdgeKind::Inter,
        }));
        let graph = HcmGraph::from_parts(communities.clone(), edges)?;
        if mode == SimpleMode::Multigraph || graph.is_simple() {
            return Ok(Realization {
                graph,
                parity_redraws: sample.parity_redraws,
                matchings: attempts,
            });
        }
        if attempts >= max_attempts {
            let nu_d = mixture.moments().map(|m| m.nu_d).unwrap_or(f64::NAN);
            return Err(HcmError::SimpleRetriesExceeded {
                attempts,
                nu_d,
                heuristic: (-nu_d / 2.0).exp(),
            });
        }
    }
}

/// Contracts each component of every community's kept intra edges to one
/// macro vertex and returns the macro degrees (sums of member half-edges),
/// ordered by lowest member vertex.
pub fn collapse(graph: &HcmGraph, keep: &[bool]) -> Result<Vec<u64>> {
    let intra_count = graph.intra_edge_count();
    if keep.len() != intra_count {
        return Err(HcmError::InvalidParameter(format!(
            "mask has {} entries for {intra_count} intra edges",
            keep.len()
        )));
    }
    let mut uf = UnionFind::new(graph.vertex_count());
    for (e, &k) in graph.intra_edges().zip(keep) {
        if k {
            uf.union(e.u as usize, e.v as usize);
        }
    }
    let inter = graph.inter_degrees();
    let mut slot = vec![u32::MAX; graph.vertex_count()];
    let mut degrees = Vec::new();
    for v in 0..graph.vertex_count() {
        let root = uf.find(v);
        if slot[root] == u32::MAX {
            slot[root] = degrees.len() as u32;
            degrees.push(0u64);
        }
        degrees[slot[root] as usize] += inter[v] as u64;
    }
    Ok(degrees)
}
