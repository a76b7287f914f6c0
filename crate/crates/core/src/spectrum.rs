//! Out-degree spectra of percolated communities.
//!
//! Keeping each intra-community edge independently with probability `π`
//! splits a community into pieces; the spectrum of a vertex `v` is the law
//! of the number of half-edges carried by the piece containing `v`. A
//! [`ComponentProfile`] aggregates the same information per community:
//! expected numbers of pieces and of vertices for every piece out-degree.

use rayon::prelude::*;

use crate::error::{HcmError, Result};
use crate::numeric::binomial_pmf;
use crate::shape::{CommunityShape, Layout};
use crate::union_find::UnionFind;

/// Largest intra edge count handled by exhaustive subset enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Enumeration table for one vertex: `counts[k][j]` is the number of kept
/// edge subsets of size `j` for which the vertex's piece carries `k`
/// half-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutDegreeSpectrum {
    edge_count: usize,
    counts: Vec<Vec<u64>>,
}

impl OutDegreeSpectrum {
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// `g(H, v, k, π)`.
    pub fn prob(&self, k: usize, pi: f64) -> f64 {
        self.counts
            .get(k)
            .map_or(0.0, |row| eval_subset_polynomial(row, self.edge_count, pi))
    }

    /// `g(H, v, ·, π)` for `k = 0..=d_H`.
    pub fn pmf(&self, pi: f64) -> Vec<f64> {
        (0..self.counts.len()).map(|k| self.prob(k, pi)).collect()
    }
}

/// `Σ_j row[j] π^j (1−π)^{m−j}`.
fn eval_subset_polynomial(row: &[u64], m: usize, pi: f64) -> f64 {
    let q = 1.0 - pi;
    let mut total = 0.0;
    for (j, &c) in row.iter().enumerate() {
        if c != 0 {
            total += c as f64 * pi.powi(j as i32) * q.powi((m - j) as i32);
        }
    }
    total
}

/// Per-community enumeration table: for each piece out-degree `k` and kept
/// edge count `j`, the number of pieces and the number of vertices in such
/// pieces, summed over all subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileTable {
    edge_count: usize,
    pieces: Vec<Vec<u64>>,
    vertices: Vec<Vec<u64>>,
}

impl ProfileTable {
    pub fn evaluate(&self, pi: f64) -> ComponentProfile {
        let m = self.edge_count;
        ComponentProfile {
            pieces: self
                .pieces
                .iter()
                .map(|r| eval_subset_polynomial(r, m, pi))
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|r| eval_subset_polynomial(r, m, pi))
                .collect(),
        }
    }
}

/// Expected pieces and vertices by piece out-degree (index `k = 0..=d_H`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentProfile {
    pub pieces: Vec<f64>,
    pub vertices: Vec<f64>,
}

impl ComponentProfile {
    pub fn zeros(max_degree: usize) -> Self {
        ComponentProfile {
            pieces: vec![0.0; max_degree + 1],
            vertices: vec![0.0; max_degree + 1],
        }
    }

    /// `Σ_k k(k−1) pieces[k]`, the expected forward-degree numerator.
    pub fn forward_moment(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(k, &c)| (k * k.saturating_sub(1)) as f64 * c)
            .sum()
    }

    /// Every vertex its own piece (`π = 0`).
    pub fn isolated(shape: &CommunityShape) -> Self {
        let mut p = Self::zeros(shape.out_degree() as usize);
        for (_, len, b) in shape.stub_runs().runs() {
            p.pieces[b as usize] += len as f64;
            p.vertices[b as usize] += len as f64;
        }
        p
    }

    /// The whole community is one piece (`π = 1`).
    pub fn intact(shape: &CommunityShape) -> Self {
        let d = shape.out_degree() as usize;
        let mut p = Self::zeros(d);
        p.pieces[d] = 1.0;
        p.vertices[d] = shape.vertex_count() as f64;
        p
    }
}

fn check_cap(shape: &CommunityShape, cap: usize) -> Result<()> {
    let m = shape.edge_count();
    if m > cap || m > 62 {
        return Err(HcmError::SpectrumCapExceeded { edges: m, cap });
    }
    Ok(())
}

struct Tally {
    vertex: Vec<Vec<Vec<u64>>>,
    pieces: Vec<Vec<u64>>,
    sizes: Vec<Vec<u64>>,
}

impl Tally {
    fn new(s: usize, d: usize, m: usize, per_vertex: bool) -> Self {
        let table = || vec![vec![0u64; m + 1]; d + 1];
        Tally {
            vertex: if per_vertex {
                (0..s).map(|_| table()).collect()
            } else {
                Vec::new()
            },
            pieces: table(),
            sizes: table(),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        fn add(a: &mut [Vec<u64>], b: &[Vec<u64>]) {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
        }
        for (a, b) in self.vertex.iter_mut().zip(&other.vertex) {
            add(a, b);
        }
        add(&mut self.pieces, &other.pieces);
        add(&mut self.sizes, &other.sizes);
        self
    }
}

fn enumerate(shape: &CommunityShape, cap: usize, per_vertex: bool) -> Result<Tally> {
    check_cap(shape, cap)?;
    let s = shape.vertex_count();
    let m = shape.edge_count();
    let d = shape.out_degree() as usize;
    let edges: Vec<(usize, usize)> = shape
        .edges()
        .map(|(a, b)| (a as usize, b as usize))
        .collect();
    let stubs: Vec<u64> = shape.out_stubs().map(u64::from).collect();
    let total: u64 = 1 << m;
    let chunk = 1u64 << m.saturating_sub(6).min(14);
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let tally = starts
        .into_par_iter()
        .fold(
            || Tally::new(s, d, m, per_vertex),
            |mut t, start| {
                let mut uf = UnionFind::new(s);
                let mut piece_stubs = vec![0u64; s];
                for mask in start..(start + chunk).min(total) {
                    uf.reset();
                    for (i, &(a, b)) in edges.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            uf.union(a, b);
                        }
                    }
                    let j = mask.count_ones() as usize;
                    piece_stubs.iter_mut().for_each(|x| *x = 0);
                    for v in 0..s {
                        let r = uf.find(v);
                        piece_stubs[r] += stubs[v];
                    }
                    for v in 0..s {
                        let r = uf.find(v);
                        let k = piece_stubs[r] as usize;
                        if r == v {
                            t.pieces[k][j] += 1;
                            t.sizes[k][j] += uf.set_size(v) as u64;
                        }
                        if per_vertex {
                            t.vertex[v][k][j] += 1;
                        }
                    }
                }
                t
            },
        )
        .reduce(|| Tally::new(s, d, m, per_vertex), Tally::merge);
    Ok(tally)
}

/// Exact spectrum of one vertex by enumerating all `2^m` kept-edge subsets.
pub fn spectrum(shape: &CommunityShape, vertex: usize, cap: usize) -> Result<OutDegreeSpectrum> {
    if vertex >= shape.vertex_count() {
        return Err(HcmError::InvalidParameter(format!(
            "vertex {vertex} out of range for a community of size {}",
            shape.vertex_count()
        )));
    }
    let mut all = spectra(shape, cap)?;
    Ok(all.swap_remove(vertex))
}

/// Exact spectra of every vertex (one enumeration pass).
pub fn spectra(shape: &CommunityShape, cap: usize) -> Result<Vec<OutDegreeSpectrum>> {
    let m = shape.edge_count();
    let tally = enumerate(shape, cap, true)?;
    Ok(tally
        .vertex
        .into_iter()
        .map(|counts| OutDegreeSpectrum {
            edge_count: m,
            counts,
        })
        .collect())
}

pub fn profile_table(shape: &CommunityShape, cap: usize) -> Result<ProfileTable> {
    let tally = enumerate(shape, cap, false)?;
    Ok(ProfileTable {
        edge_count: shape.edge_count(),
        pieces: tally.pieces,
        vertices: tally.sizes,
    })
}

/// Probability-and-size distribution over piece out-degree: `prob[k]` and
/// `size[k] = E[size · 1{degree = k}]`.
#[derive(Debug, Clone)]
struct PieceLaw {
    prob: Vec<f64>,
    size: Vec<f64>,
}

impl PieceLaw {
    fn point(k: usize, size: f64) -> Self {
        let mut prob = vec![0.0; k + 1];
        let mut sz = vec![0.0; k + 1];
        prob[k] = 1.0;
        sz[k] = size;
        PieceLaw { prob, size: sz }
    }

    /// Independent sum of degrees and sizes.
    fn combine(&self, other: &PieceLaw, track_size: bool) -> PieceLaw {
        let len = self.prob.len() + other.prob.len() - 1;
        let mut prob = vec![0.0; len];
        let mut size = vec![0.0; if track_size { len } else { 0 }];
        for (i, &a) in self.prob.iter().enumerate() {
            if a == 0.0 && (!track_size || self.size[i] == 0.0) {
                continue;
            }
            for (j, &b) in other.prob.iter().enumerate() {
                prob[i + j] += a * b;
                if track_size {
                    size[i + j] += self.size[i] * b + a * other.size[j];
                }
            }
        }
        PieceLaw { prob, size }
    }

    /// With probability `pi` this law, otherwise nothing attached.
    fn attach(&self, pi: f64, track_size: bool) -> PieceLaw {
        let mut prob: Vec<f64> = self.prob.iter().map(|p| pi * p).collect();
        prob[0] += 1.0 - pi;
        let size = if track_size {
            self.size.iter().map(|x| pi * x).collect()
        } else {
            Vec::new()
        };
        PieceLaw { prob, size }
    }
}

/// A tree rooted at `order[0]`, listed in breadth-first order.
#[derive(Debug, Clone)]
pub(crate) struct RootedTree {
    order: Vec<u32>,
    parent: Vec<u32>,
    stubs: Vec<u32>,
}

impl RootedTree {
    pub(crate) fn new(shape: &CommunityShape, root: usize) -> Self {
        let s = shape.vertex_count();
        let stubs: Vec<u32> = shape.out_stubs().collect();
        let (order, parent) = match shape.layout() {
            Layout::Path if root == 0 => {
                let order = (0..s as u32).collect();
                let parent = (0..s as u32).map(|v| v.saturating_sub(1)).collect();
                (order, parent)
            }
            _ => {
                let adj = shape.adjacency();
                let mut parent = vec![u32::MAX; s];
                let mut order = Vec::with_capacity(s);
                parent[root] = root as u32;
                order.push(root as u32);
                let mut head = 0;
                while head < order.len() {
                    let v = order[head] as usize;
                    head += 1;
                    for &u in &adj[v] {
                        if parent[u as usize] == u32::MAX {
                            parent[u as usize] = v as u32;
                            order.push(u);
                        }
                    }
                }
                (order, parent)
            }
        };
        RootedTree {
            order,
            parent,
            stubs,
        }
    }

    /// Runs the bottom-up merge. Returns the root's piece law and, when
    /// `profile` is given, accumulates every piece into it.
    fn run(&self, pi: f64, mut profile: Option<&mut ComponentProfile>) -> PieceLaw {
        let track = profile.is_some();
        let s = self.order.len();
        let mut acc: Vec<Option<PieceLaw>> = vec![None; s];
        let root = self.order[0] as usize;
        for &v in self.order.iter().rev() {
            let v = v as usize;
            let law = acc[v]
                .take()
                .unwrap_or_else(|| PieceLaw::point(self.stubs[v] as usize, 1.0));
            if v == root {
                if let Some(p) = profile.as_deref_mut() {
                    add_law(p, &law, 1.0);
                }
                return law;
            }
            if let Some(p) = profile.as_deref_mut() {
                add_law(p, &law, 1.0 - pi);
            }
            let parent = self.parent[v] as usize;
            let base = acc[parent]
                .take()
                .unwrap_or_else(|| PieceLaw::point(self.stubs[parent] as usize, 1.0));
            acc[parent] = Some(base.combine(&law.attach(pi, track), track));
        }
        unreachable!("root is visited last")
    }

    /// Expected `Σ_{u,v} b_u b_v π^{dist(u,v)}` over ordered pairs.
    fn stub_pair_sum(&self, pi: f64) -> f64 {
        let s = self.order.len();
        let mut down: Vec<f64> = self.stubs.iter().map(|&b| b as f64).collect();
        for &v in self.order.iter().skip(1).rev() {
            let p = self.parent[v as usize] as usize;
            down[p] += pi * down[v as usize];
        }
        let mut full = vec![0.0; s];
        let root = self.order[0] as usize;
        full[root] = down[root];
        for &v in self.order.iter().skip(1) {
            let v = v as usize;
            let p = self.parent[v] as usize;
            full[v] = down[v] + pi * (full[p] - pi * down[v]);
        }
        self.stubs
            .iter()
            .zip(&full)
            .map(|(&b, &f)| b as f64 * f)
            .sum()
    }
}

fn add_law(profile: &mut ComponentProfile, law: &PieceLaw, weight: f64) {
    for (k, (&p, &sz)) in law.prob.iter().zip(&law.size).enumerate() {
        profile.pieces[k] += weight * p;
        profile.vertices[k] += weight * sz;
    }
}

/// Profile of a tree-shaped community by dynamic programming.
pub(crate) fn tree_profile(tree: &RootedTree, d_h: usize, pi: f64) -> ComponentProfile {
    let mut profile = ComponentProfile::zeros(d_h);
    tree.run(pi, Some(&mut profile));
    profile
}

pub(crate) fn tree_forward_moment(tree: &RootedTree, pi: f64) -> f64 {
    let d: f64 = tree.stubs.iter().map(|&b| b as f64).sum();
    tree.stub_pair_sum(pi) - d
}

/// Profile of a path whose vertices all carry `t` half-edges: a piece of
/// `len` consecutive vertices survives with probability `π^{len−1}` times
/// `(1−π)` for each side not at an end of the path.
pub(crate) fn uniform_path_profile(len: usize, t: usize, pi: f64) -> ComponentProfile {
    let mut profile = ComponentProfile::zeros(len * t);
    let q = 1.0 - pi;
    let mut pow = 1.0;
    for piece in 1..=len {
        let interior = len.saturating_sub(piece + 1) as f64;
        let at_one_end = if piece < len { 2.0 } else { 0.0 };
        let whole = if piece == len { 1.0 } else { 0.0 };
        let expected = pow * (interior * q * q + at_one_end * q + whole);
        profile.pieces[piece * t] += expected;
        profile.vertices[piece * t] += expected * piece as f64;
        pow *= pi;
    }
    profile
}

/// `Σ_{u,v} π^{|u−v|}` over ordered vertex pairs of a path of `len` vertices.
pub(crate) fn path_pair_sum(len: usize, pi: f64) -> f64 {
    let l = len as f64;
    let q = 1.0 - pi;
    if q * l > 1.0 {
        l + 2.0 * pi * (l * q - 1.0 + pi.powi(len as i32)) / (q * q)
    } else {
        // Close to π = 1 the closed form cancels; sum directly.
        let mut total = 0.0;
        let mut pow = 1.0;
        for d in 1..len {
            pow *= pi;
            total += (len - d) as f64 * pow;
        }
        l + 2.0 * total
    }
}

/// Star: center 0 with stub runs over the leaves.
pub(crate) fn star_profile(shape: &CommunityShape, pi: f64) -> ComponentProfile {
    let d_h = shape.out_degree() as usize;
    let mut profile = ComponentProfile::zeros(d_h);
    let center_stubs = shape.out_stub(0) as usize;
    let mut center = PieceLaw::point(center_stubs, 1.0);
    for (start, len, t) in shape.stub_runs().runs() {
        let leaves = if start == 0 { len - 1 } else { len };
        if leaves == 0 {
            continue;
        }
        let t = t as usize;
        profile.pieces[t] += (1.0 - pi) * leaves as f64;
        profile.vertices[t] += (1.0 - pi) * leaves as f64;
        let kept = binomial_pmf(leaves, pi);
        let law = if t == 0 {
            PieceLaw {
                prob: vec![1.0],
                size: vec![leaves as f64 * pi],
            }
        } else {
            let mut prob = vec![0.0; leaves * t + 1];
            let mut size = vec![0.0; leaves * t + 1];
            for (x, &p) in kept.iter().enumerate() {
                prob[x * t] = p;
                size[x * t] = p * x as f64;
            }
            PieceLaw { prob, size }
        };
        center = center.combine(&law, true);
    }
    add_law(&mut profile, &center, 1.0);
    profile
}

/// `Σ_{u,v} b_u b_v π^{dist(u,v)}` for a star.
pub(crate) fn star_pair_sum(shape: &CommunityShape, pi: f64) -> f64 {
    let bc = shape.out_stub(0) as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for (start, len, t) in shape.stub_runs().runs() {
        let leaves = if start == 0 { len - 1 } else { len } as f64;
        s1 += leaves * t as f64;
        s2 += leaves * (t as f64).powi(2);
    }
    bc * bc + s2 + 2.0 * pi * bc * s1 + pi * pi * (s1 * s1 - s2)
}

/// Largest complete graph handled by the connectivity recursion; beyond it
/// the recursion loses precision.
pub(crate) const COMPLETE_RECURSION_MAX: usize = 20;

/// Complete graph on `k` vertices, `t` half-edges each. Uses
/// `E[#pieces of size i] = C(k,i) c_i (1−π)^{i(k−i)}` with `c_i` the
/// probability that the percolated `K_i` is connected.
pub(crate) fn uniform_complete_profile(k: usize, t: usize, pi: f64) -> ComponentProfile {
    let q = 1.0 - pi;
    let choose = |n: usize, r: usize| -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let mut connected = vec![0.0; k + 1];
    for n in 1..=k {
        let mut split = 0.0;
        for i in 1..n {
            split += choose(n - 1, i - 1) * connected[i] * q.powi((i * (n - i)) as i32);
        }
        connected[n] = (1.0 - split).max(0.0);
    }
    let mut profile = ComponentProfile::zeros(k * t);
    for i in 1..=k {
        let expected = choose(k, i) * connected[i] * q.powi((i * (k - i)) as i32);
        profile.pieces[i * t] += expected;
        profile.vertices[i * t] += expected * i as f64;
    }
    profile
}

/// Spectrum of one vertex at `π`, choosing the cheapest exact method:
/// trees by dynamic programming rooted at the vertex, other shapes by
/// enumeration within `cap`.
pub fn vertex_spectrum(
    shape: &CommunityShape,
    vertex: usize,
    pi: f64,
    cap: usize,
) -> Result<Vec<f64>> {
    if vertex >= shape.vertex_count() {
        return Err(HcmError::InvalidParameter(format!(
            "vertex {vertex} out of range for a community of size {}",
            shape.vertex_count()
        )));
    }
    check_pi(pi)?;
    let d = shape.out_degree() as usize;
    if shape.is_tree() {
        let mut pmf = RootedTree::new(shape, vertex).run(pi, None).prob;
        pmf.resize(d + 1, 0.0);
        return Ok(pmf);
    }
    Ok(spectrum(shape, vertex, cap)?.pmf(pi))
}

pub(crate) fn check_pi(pi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pi) {
        Ok(())
    } else {
        Err(HcmError::InvalidParameter(format!(
            "pi = {pi} outside [0, 1]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_family, Family, FamilySpec};
    use crate::shape::StubRuns;

    const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

    fn family(f: Family, l: usize) -> CommunityShape {
        make_family(FamilySpec::new(f, l)).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        let n = a.len().max(b.len());
        (0..n).all(|i| {
            (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs() <= tol
        })
    }

    #[test]
    fn triangle_spectrum_by_hand() {
        let tri = family(Family::Triangle, 3);
        let sp = spectrum(&tri, 0, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(sp.counts().iter().flatten().sum::<u64>(), 8);
        for pi in GRID {
            let q = 1.0 - pi;
            let expected = [0.0, q * q, 2.0 * pi * q * q, pi.powi(3) + 3.0 * pi * pi * q];
            assert!(close(&sp.pmf(pi), &expected, 1e-15), "pi={pi}");
        }
    }

    #[test]
    fn tree_dp_matches_enumeration_per_vertex() {
        let shapes = [
            family(Family::LineTwoEnds, 6),
            family(Family::LineAllStubs, 5),
            family(Family::StarEndpoints, 5),
            family(Family::StarCenter, 4),
            CommunityShape::new(
                6,
                vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)],
                &[2, 0, 1, 0, 3, 1],
            )
            .unwrap(),
        ];
        for shape in &shapes {
            let exact = spectra(shape, DEFAULT_ENUMERATION_CAP).unwrap();
            for (v, sp) in exact.iter().enumerate() {
                for pi in GRID {
                    let dp = vertex_spectrum(shape, v, pi, 0).unwrap();
                    assert!(close(&dp, &sp.pmf(pi), 1e-13), "{shape:?} v={v} pi={pi}");
                }
            }
        }
    }

    fn profile_by_enumeration(shape: &CommunityShape, pi: f64) -> ComponentProfile {
        profile_table(shape, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .evaluate(pi)
    }

    fn profiles_close(a: &ComponentProfile, b: &ComponentProfile) -> bool {
        close(&a.pieces, &b.pieces, 1e-12) && close(&a.vertices, &b.vertices, 1e-12)
    }

    #[test]
    fn fast_profiles_match_enumeration() {
        let odd_tree = CommunityShape::new(
            6,
            vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)],
            &[2, 0, 1, 0, 3, 1],
        )
        .unwrap();
        let odd_star = CommunityShape::from_layout(
            7,
            Layout::Star,
            StubRuns::from_values(&[2, 1, 1, 0, 3, 3, 0]),
        )
        .unwrap();
        for pi in GRID {
            for l in [1, 2, 3, 7] {
                let shape = family(Family::LineAllStubs, l);
                assert!(profiles_close(
                    &uniform_path_profile(l, 1, pi),
                    &profile_by_enumeration(&shape, pi)
                ));
            }
            for shape in [family(Family::LineTwoEnds, 5), odd_tree.clone()] {
                let tree = RootedTree::new(&shape, 0);
                let dp = tree_profile(&tree, shape.out_degree() as usize, pi);
                assert!(profiles_close(&dp, &profile_by_enumeration(&shape, pi)));
            }
            for shape in [
                family(Family::StarEndpoints, 6),
                family(Family::StarCenter, 3),
                odd_star.clone(),
            ] {
                assert!(profiles_close(
                    &star_profile(&shape, pi),
                    &profile_by_enumeration(&shape, pi)
                ));
            }
            for k in [1, 2, 3, 5, 6] {
                let shape = family(Family::Household, k);
                assert!(profiles_close(
                    &uniform_complete_profile(k, 1, pi),
                    &profile_by_enumeration(&shape, pi)
                ));
            }
        }
    }

    #[test]
    fn pair_sums_match_profiles() {
        for pi in GRID {
            for l in [1, 2, 9, 40] {
                let fwd = path_pair_sum(l, pi) - l as f64;
                assert!((fwd - uniform_path_profile(l, 1, pi).forward_moment()).abs() < 1e-9);
                let shape = family(Family::LineAllStubs, l);
                assert!((tree_forward_moment(&RootedTree::new(&shape, 0), pi) - fwd).abs() < 1e-9);
            }
            let star = CommunityShape::from_layout(
                6,
                Layout::Star,
                StubRuns::from_values(&[2, 1, 0, 3, 1, 1]),
            )
            .unwrap();
            let fwd = star_pair_sum(&star, pi) - star.out_degree() as f64;
            assert!((fwd - star_profile(&star, pi).forward_moment()).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_boundaries() {
        let shape = family(Family::Household, 4);
        assert!(profiles_close(
            &profile_by_enumeration(&shape, 0.0),
            &ComponentProfile::isolated(&shape)
        ));
        assert!(profiles_close(
            &profile_by_enumeration(&shape, 1.0),
            &ComponentProfile::intact(&shape)
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let k8 = family(Family::Household, 8);
        assert!(matches!(
            spectrum(&k8, 0, DEFAULT_ENUMERATION_CAP),
            Err(HcmError::SpectrumCapExceeded { edges: 28, cap: 24 })
        ));
    }
}
