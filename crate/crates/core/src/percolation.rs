//! Analytic bond percolation on the hierarchical configuration model:
//! the collapsed macro-degree law, the expected forward degree, the
//! critical retention probability and the percolated giant size.

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{family_mixture, truncated_power_law, Family};
use crate::error::{HcmError, Result};
use crate::mixture::CommunityMixture;
use crate::montecarlo::mc_profile;
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::shape::{CommunityShape, Layout};
use crate::spectrum::{
    check_pi, path_pair_sum, profile_table, star_pair_sum, star_profile, tree_forward_moment,
    tree_profile, uniform_complete_profile, uniform_path_profile, ComponentProfile, ProfileTable,
    RootedTree, COMPLETE_RECURSION_MAX, DEFAULT_ENUMERATION_CAP,
};

/// Fixed-point iterations before switching to bracketing.
const ITERATIONS_BEFORE_BRACKETING: u64 = 10_000;
pub const MAX_SOLVER_ITERATIONS: u64 = 1_000_000;
pub const XI_RESIDUAL: f64 = 1e-12;
pub const THRESHOLD_GRID: usize = 256;
/// Final bracket width of the threshold bisection.
pub const THRESHOLD_TOLERANCE: f64 = 1e-13;
const PROFILE_CHUNK: usize = 256;

/// Monte-Carlo estimation of component profiles for communities that are
/// neither covered by a closed form nor small enough to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McFallback {
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumPolicy {
    /// Largest intra edge count for exhaustive enumeration.
    pub cap: usize,
    pub monte_carlo: Option<McFallback>,
}

impl Default for SpectrumPolicy {
    fn default() -> Self {
        SpectrumPolicy {
            cap: DEFAULT_ENUMERATION_CAP,
            monte_carlo: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Isolated,
    UniformPath { len: usize, stubs: usize },
    Star,
    Tree(RootedTree),
    UniformComplete { size: usize, stubs: usize },
    Enumerated(ProfileTable),
    Sampled(McFallback),
}

fn uniform_stubs(shape: &CommunityShape) -> Option<usize> {
    let mut runs = shape.stub_runs().runs();
    match (runs.next(), runs.next()) {
        (Some((_, _, t)), None) => Some(t as usize),
        _ => None,
    }
}

fn choose_kernel(shape: &CommunityShape, index: usize, policy: &SpectrumPolicy) -> Result<Kernel> {
    if shape.edge_count() == 0 {
        return Ok(Kernel::Isolated);
    }
    match (shape.layout(), uniform_stubs(shape)) {
        (Layout::Path, Some(t)) => {
            return Ok(Kernel::UniformPath {
                len: shape.vertex_count(),
                stubs: t,
            })
        }
        (Layout::Star, _) => return Ok(Kernel::Star),
        (Layout::Complete, Some(t)) if shape.vertex_count() <= COMPLETE_RECURSION_MAX => {
            return Ok(Kernel::UniformComplete {
                size: shape.vertex_count(),
                stubs: t,
            })
        }
        _ => {}
    }
    if shape.is_tree() {
        return Ok(Kernel::Tree(RootedTree::new(shape, 0)));
    }
    match profile_table(shape, policy.cap) {
        Ok(table) => Ok(Kernel::Enumerated(table)),
        Err(err @ HcmError::SpectrumCapExceeded { .. }) => match policy.monte_carlo {
            Some(mc) => Ok(Kernel::Sampled(McFallback {
                replicates: mc.replicates,
                seed: mc.seed.wrapping_add(index as u64),
            })),
            None => Err(err),
        },
        Err(e) => Err(e),
    }
}

/// Collapsed macro-degree law `p′`: the out-degree law of the pieces a
/// community falls into, over pieces carrying at least one half-edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapsedLaw {
    /// `pmf[k] = p′_k`; `pmf[0]` is always zero.
    pub pmf: Vec<f64>,
    /// `λ = Σ k p′_k`.
    pub mean: f64,
}

impl CollapsedLaw {
    /// `h(z) = Σ_k k p′_k z^{k−1}`.
    pub fn h(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for k in (1..self.pmf.len()).rev() {
            acc = acc * z + k as f64 * self.pmf[k];
        }
        acc
    }

    fn from_pieces(pieces: &[f64]) -> Result<Self> {
        let total = compensated_sum(pieces.iter().skip(1).copied());
        if !(total > 0.0) {
            return Err(HcmError::ZeroNormalizer);
        }
        let mut pmf: Vec<f64> = pieces.iter().map(|c| c / total).collect();
        if let Some(first) = pmf.first_mut() {
            *first = 0.0;
        }
        let mean = compensated_sum(pmf.iter().enumerate().map(|(k, p)| k as f64 * p));
        Ok(CollapsedLaw { pmf, mean })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiMethod {
    /// `π E[D*_π] ≤ 1`: no giant, `ξ = 1`.
    Subcritical,
    FixedPoint,
    /// Fixed-point iteration was slow; finished by bisection.
    Bracketed,
    /// No piece carries a half-edge.
    NoStubs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationSolution {
    pub pi: f64,
    pub xi: f64,
    /// Limiting fraction of vertices in the largest component.
    pub fraction: f64,
    /// `λ`, the mean of the collapsed law.
    pub lambda: f64,
    /// `E[D*_π]`.
    pub forward_degree: f64,
    pub supercritical: bool,
    pub method: XiMethod,
    pub iterations: u64,
    pub residual: f64,
    pub monte_carlo_spectra: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdDiagnostics {
    pub bracket: (f64, f64),
    pub bisection_steps: u32,
    /// `π_c E[D*_{π_c}] − 1`.
    pub residual: f64,
    /// `π E[D*_π]` was nondecreasing on the scan grid.
    pub monotone: bool,
    /// `π E[D*_π] < 1` even at `π = 1`.
    pub no_threshold: bool,
    /// The root lies below the bisection resolution; a heavy tail of
    /// half-edges per vertex (see `stub_second_moment`) is the usual cause.
    pub below_resolution: bool,
    /// `Σ_H P(H) Σ_v (d_v^(b))²`.
    pub stub_second_moment: f64,
    pub monte_carlo_spectra: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub pi_c: f64,
    pub diagnostics: ThresholdDiagnostics,
}

/// A mixture prepared for percolation queries: one evaluation kernel per
/// community shape, built once and shared read-only.
#[derive(Debug)]
pub struct PercolationModel<'a> {
    mixture: &'a CommunityMixture,
    kernels: Vec<Kernel>,
    mean_d: f64,
    mean_size: f64,
    sampled: bool,
}

impl<'a> PercolationModel<'a> {
    pub fn new(mixture: &'a CommunityMixture, policy: &SpectrumPolicy) -> Result<Self> {
        mixture.ensure_structurally_valid()?;
        let kernels = mixture
            .entries()
            .par_iter()
            .enumerate()
            .map(|(i, e)| choose_kernel(&e.shape, i, policy))
            .collect::<Result<Vec<_>>>()?;
        let sampled = kernels.iter().any(|k| matches!(k, Kernel::Sampled(_)));
        Ok(PercolationModel {
            mixture,
            kernels,
            mean_d: mixture.mean_macro_degree(),
            mean_size: mixture.mean_size(),
            sampled,
        })
    }

    pub fn mixture(&self) -> &CommunityMixture {
        self.mixture
    }

    /// True when some community is handled by Monte-Carlo estimation.
    pub fn uses_monte_carlo(&self) -> bool {
        self.sampled
    }

    /// Expected pieces and vertices by out-degree for mixture entry `index`.
    pub fn profile(&self, index: usize, pi: f64) -> ComponentProfile {
        let shape = &self.mixture.entries()[index].shape;
        if pi == 0.0 {
            return ComponentProfile::isolated(shape);
        }
        if pi == 1.0 {
            return ComponentProfile::intact(shape);
        }
        let d = shape.out_degree() as usize;
        match &self.kernels[index] {
            Kernel::Isolated => ComponentProfile::isolated(shape),
            Kernel::UniformPath { len, stubs } => uniform_path_profile(*len, *stubs, pi),
            Kernel::Star => star_profile(shape, pi),
            Kernel::Tree(tree) => tree_profile(tree, d, pi),
            Kernel::UniformComplete { size, stubs } => uniform_complete_profile(*size, *stubs, pi),
            Kernel::Enumerated(table) => table.evaluate(pi),
            Kernel::Sampled(mc) => mc_profile(shape, pi, mc.replicates, mc.seed),
        }
    }

    /// `Σ_v d_v^(b) Σ_{k≥1} k g(H, v, k+1, π)` for entry `index`.
    fn forward_moment(&self, index: usize, pi: f64) -> f64 {
        let shape = &self.mixture.entries()[index].shape;
        let d = shape.out_degree() as f64;
        match &self.kernels[index] {
            _ if pi == 0.0 || pi == 1.0 => self.profile(index, pi).forward_moment(),
            Kernel::UniformPath { len, stubs } => {
                let t = *stubs as f64;
                t * t * path_pair_sum(*len, pi) - d
            }
            Kernel::Star => star_pair_sum(shape, pi) - d,
            Kernel::Tree(tree) => tree_forward_moment(tree, pi),
            _ => self.profile(index, pi).forward_moment(),
        }
    }

    /// Weighted sums of profiles over the mixture, deterministic in the
    /// number of worker threads.
    fn aggregate(&self, pi: f64) -> (Vec<f64>, Vec<f64>) {
        let max_d = self
            .mixture
            .iter()
            .map(|(s, _)| s.out_degree() as usize)
            .max()
            .unwrap_or(0);
        let mut pieces = vec![CompensatedSum::new(); max_d + 1];
        let mut vertices = vec![CompensatedSum::new(); max_d + 1];
        let entries = self.mixture.entries();
        for chunk_start in (0..entries.len()).step_by(PROFILE_CHUNK) {
            let end = (chunk_start + PROFILE_CHUNK).min(entries.len());
            let profiles: Vec<ComponentProfile> = (chunk_start..end)
                .into_par_iter()
                .map(|i| self.profile(i, pi))
                .collect();
            for (i, p) in (chunk_start..end).zip(profiles) {
                let w = entries[i].weight;
                for (k, (c, v)) in p.pieces.iter().zip(&p.vertices).enumerate() {
                    if *c != 0.0 {
                        pieces[k].add(w * c);
                    }
                    if *v != 0.0 {
                        vertices[k].add(w * v);
                    }
                }
            }
        }
        (
            pieces.iter().map(CompensatedSum::value).collect(),
            vertices.iter().map(CompensatedSum::value).collect(),
        )
    }

    pub fn collapsed_law(&self, pi: f64) -> Result<CollapsedLaw> {
        check_pi(pi)?;
        CollapsedLaw::from_pieces(&self.aggregate(pi).0)
    }

    /// `E[D*_π]`: expected number of further half-edges of the piece
    /// reached along a uniformly chosen half-edge.
    pub fn mean_forward_degree(&self, pi: f64) -> Result<f64> {
        check_pi(pi)?;
        if !(self.mean_d > 0.0) {
            return Err(HcmError::UndefinedNu);
        }
        let weights: Vec<f64> = self.mixture.iter().map(|(_, w)| w).collect();
        let moments: Vec<f64> = (0..self.kernels.len())
            .into_par_iter()
            .map(|i| self.forward_moment(i, pi))
            .collect();
        let total = compensated_sum(weights.iter().zip(&moments).map(|(w, m)| w * m));
        Ok(total / self.mean_d)
    }

    fn criticality(&self, pi: f64) -> Result<f64> {
        Ok(pi * self.mean_forward_degree(pi)? - 1.0)
    }

    /// Root of `π E[D*_π] = 1` on `(0, 1]`.
    pub fn critical_pi(&self) -> Result<CriticalPoint> {
        let grid: Vec<f64> = (1..=THRESHOLD_GRID)
            .map(|i| i as f64 / THRESHOLD_GRID as f64)
            .collect();
        let values = grid
            .iter()
            .map(|&p| self.criticality(p))
            .collect::<Result<Vec<_>>>()?;
        let monotone = values.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let stub_second_moment = compensated_sum(self.mixture.iter().map(|(s, w)| {
            w * s
                .stub_runs()
                .runs()
                .map(|(_, len, b)| len as f64 * (b as f64).powi(2))
                .sum::<f64>()
        }));
        let mut diagnostics = ThresholdDiagnostics {
            bracket: (1.0, 1.0),
            bisection_steps: 0,
            residual: values[THRESHOLD_GRID - 1],
            monotone,
            no_threshold: false,
            below_resolution: false,
            stub_second_moment,
            monte_carlo_spectra: self.sampled,
        };
        let Some(first) = values.iter().position(|&r| r >= 0.0) else {
            diagnostics.no_threshold = true;
            return Ok(CriticalPoint {
                pi_c: 1.0,
                diagnostics,
            });
        };
        let mut lo = if first == 0 { 0.0 } else { grid[first - 1] };
        let mut hi = grid[first];
        let mut steps = 0;
        while hi - lo > THRESHOLD_TOLERANCE && steps < 200 {
            let mid = 0.5 * (lo + hi);
            if self.criticality(mid)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
        }
        let pi_c = 0.5 * (lo + hi);
        diagnostics.bracket = (lo, hi);
        diagnostics.bisection_steps = steps;
        diagnostics.residual = self.criticality(pi_c)?;
        diagnostics.below_resolution = pi_c < 1e-9;
        Ok(CriticalPoint { pi_c, diagnostics })
    }

    /// Smallest root `ξ` of `√π h(1−√π+√πξ) + (1−√π)λ = λξ` and the limiting
    /// fraction of vertices in the largest component of the percolated graph.
    pub fn percolated_giant(&self, pi: f64) -> Result<PercolationSolution> {
        check_pi(pi)?;
        let (pieces, vertices) = self.aggregate(pi);
        let mut solution = PercolationSolution {
            pi,
            xi: 1.0,
            fraction: 0.0,
            lambda: 0.0,
            forward_degree: 0.0,
            supercritical: false,
            method: XiMethod::NoStubs,
            iterations: 0,
            residual: 0.0,
            monte_carlo_spectra: self.sampled,
        };
        let law = match CollapsedLaw::from_pieces(&pieces) {
            Ok(law) => law,
            Err(HcmError::ZeroNormalizer) => return Ok(solution),
            Err(e) => return Err(e),
        };
        let lambda = law.mean;
        let second: f64 = law
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k.saturating_sub(1)) as f64 * p)
            .sum();
        solution.lambda = lambda;
        solution.forward_degree = second / lambda;
        solution.supercritical = pi * solution.forward_degree > 1.0;
        if !solution.supercritical {
            solution.method = XiMethod::Subcritical;
            return Ok(solution);
        }
        let root = pi.sqrt();
        let map = |xi: f64| (root * law.h(1.0 - root + root * xi) + (1.0 - root) * lambda) / lambda;
        let (xi, iterations, method) = smallest_fixed_point(map)?;
        let y = 1.0 - root + root * xi;
        let mut covered = CompensatedSum::new();
        for (k, v) in vertices.iter().enumerate().skip(1) {
            if *v != 0.0 {
                covered.add(v * (1.0 - y.powi(k as i32)));
            }
        }
        solution.xi = xi;
        solution.iterations = iterations;
        solution.residual = (map(xi) - xi).abs();
        solution.method = method;
        solution.fraction = (covered.value() / self.mean_size).clamp(0.0, 1.0);
        Ok(solution)
    }
}

/// Smallest fixed point in `[0, 1)` of an increasing convex map with
/// `map(1) = 1` and slope above one at 1. Iterates from 0; if progress is
/// slow, brackets the root between the current iterate and a point below 1
/// where the map lies under the diagonal and bisects.
fn smallest_fixed_point<F: Fn(f64) -> f64>(map: F) -> Result<(f64, u64, XiMethod)> {
    let mut xi = 0.0;
    let mut iterations = 0;
    while iterations < ITERATIONS_BEFORE_BRACKETING {
        let next = map(xi);
        iterations += 1;
        if (next - xi).abs() < XI_RESIDUAL {
            return Ok((next, iterations, XiMethod::FixedPoint));
        }
        xi = next;
    }
    let mut lo = xi;
    let mut gap = 0.5 * (1.0 - lo);
    let hi = loop {
        iterations += 1;
        if gap < f64::EPSILON || iterations >= MAX_SOLVER_ITERATIONS {
            return Err(HcmError::SolverDiverged(format!(
                "no point below 1 where the percolation map is under the diagonal (last iterate {xi})"
            )));
        }
        let candidate = 1.0 - gap;
        if map(candidate) < candidate {
            break candidate;
        }
        lo = lo.max(candidate);
        gap *= 0.5;
    };
    let mut hi = hi;
    while hi - lo > 1e-15 && iterations < MAX_SOLVER_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if map(mid) >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    if (map(xi) - xi).abs() > XI_RESIDUAL {
        return Err(HcmError::SolverDiverged(format!(
            "fixed point residual {} after {iterations} iterations",
            (map(xi) - xi).abs()
        )));
    }
    Ok((xi, iterations, XiMethod::Bracketed))
}

/// Giant component without percolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnpercolatedGiant {
    /// Root of `g′(ξ) = ξ E[D]` in `[0, 1)`, or 1 when `ν_D ≤ 1`.
    pub xi: f64,
    /// `Σ_{k,s} s p_{k,s} (1 − ξ^k) / E[S]`.
    pub vertex_fraction: f64,
    /// `1 − g(ξ)`.
    pub community_fraction: f64,
    pub residual: f64,
    pub iterations: u32,
    pub nu_d: f64,
}

pub fn solve_xi_unpercolated(mixture: &CommunityMixture) -> Result<UnpercolatedGiant> {
    let moments = mixture.moments()?;
    let degree = mixture.macro_degree_pmf();
    let mean_d = moments.mean_d;
    let f = |x: f64| {
        let mut g1 = CompensatedSum::new();
        for (&k, &p) in &degree {
            if k >= 1 {
                g1.add(k as f64 * p * x.powi(k as i32 - 1));
            }
        }
        g1.value() - x * mean_d
    };
    let mut result = UnpercolatedGiant {
        xi: 1.0,
        vertex_fraction: 0.0,
        community_fraction: 0.0,
        residual: 0.0,
        iterations: 0,
        nu_d: moments.nu_d,
    };
    if !moments.supercritical {
        return Ok(result);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-12);
    let xi = if f(lo) <= 0.0 {
        0.0
    } else {
        if f(hi) >= 0.0 {
            return Err(HcmError::SolverDiverged(format!(
                "no sign change of g'(x) - x E[D] on [0, 1) although nu_D = {}",
                moments.nu_d
            )));
        }
        while hi - lo > 1e-16 && result.iterations < 200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            result.iterations += 1;
        }
        0.5 * (lo + hi)
    };
    result.xi = xi;
    result.residual = f(xi).abs();
    result.community_fraction =
        1.0 - compensated_sum(degree.iter().map(|(&k, &p)| p * xi.powi(k as i32)));
    let joint = mixture.joint_pmf();
    result.vertex_fraction = compensated_sum(
        joint
            .iter()
            .map(|((k, s), p)| s as f64 * p * (1.0 - xi.powi(k as i32))),
    ) / moments.mean_size;
    Ok(result)
}

/// Line communities with one half-edge per vertex and lengths
/// `p_L ∝ L^{-alpha}`, `L = 1..=truncation`.
pub fn line3regular_mixture(alpha: f64, truncation: usize) -> Result<CommunityMixture> {
    family_mixture(
        Family::LineAllStubs,
        &truncated_power_law(alpha, 1, truncation)?,
    )
}

/// Closed form of `E[D*_π]` for [`line3regular_mixture`]:
/// `(1/E[D]) · 2π/(1−π)² · (−1 + (1−π)E[D] + Σ_L p_L π^L)`.
pub fn forward_degree_line3regular(alpha: f64, truncation: usize, pi: f64) -> Result<f64> {
    if !(alpha > 2.0 && alpha < 3.0) {
        return Err(HcmError::InvalidParameter(format!(
            "alpha = {alpha} outside (2, 3)"
        )));
    }
    if truncation < 1000 {
        return Err(HcmError::InvalidParameter(format!(
            "truncation {truncation} below 1000"
        )));
    }
    if !(0.0..1.0).contains(&pi) {
        return Err(HcmError::InvalidParameter(format!(
            "pi = {pi} outside [0, 1)"
        )));
    }
    let p = truncated_power_law(alpha, 1, truncation)?;
    let mean_d = compensated_sum(p.iter().map(|&(l, w)| l as f64 * w));
    let tail = compensated_sum(p.iter().map(|&(l, w)| w * pi.powi(l as i32)));
    let q = 1.0 - pi;
    Ok(2.0 * pi / (q * q) * (-1.0 + q * mean_d + tail) / mean_d)
}
