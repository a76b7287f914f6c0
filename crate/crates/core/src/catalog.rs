//! Parameterized community families and the household-model adapters.

use std::fmt;
use std::str::FromStr;

use crate::error::{HcmError, Result};
use crate::mixture::CommunityMixture;
use crate::numeric::compensated_sum;
use crate::shape::{CommunityShape, Layout, StubRuns};

/// Default truncation for power-law size laws.
pub const DEFAULT_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// One vertex carrying `k` half-edges.
    SingleVertex,
    /// Complete graph `K_k`, one half-edge per vertex.
    Household,
    /// Path of `L` vertices with one half-edge at each end.
    LineTwoEnds,
    /// Path of `L` vertices with one half-edge on every vertex.
    LineAllStubs,
    /// Center joined to `L` leaves; each leaf has one half-edge.
    StarEndpoints,
    /// Center joined to `L` leaves; only the center has a half-edge.
    StarCenter,
    /// `K_3` with one half-edge per vertex.
    Triangle,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::SingleVertex,
        Family::Household,
        Family::LineTwoEnds,
        Family::LineAllStubs,
        Family::StarEndpoints,
        Family::StarCenter,
        Family::Triangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SingleVertex => "single_vertex",
            Family::Household => "household",
            Family::LineTwoEnds => "line_two_ends",
            Family::LineAllStubs => "line_all_stubs",
            Family::StarEndpoints => "star_endpoints",
            Family::StarCenter => "star_center",
            Family::Triangle => "triangle",
        }
    }

    /// Name of the size parameter, or `None` for the triangle.
    pub fn parameter(self) -> Option<&'static str> {
        match self {
            Family::SingleVertex | Family::Household => Some("k"),
            Family::Triangle => None,
            _ => Some("L"),
        }
    }

    pub fn min_parameter(self) -> usize {
        match self {
            Family::LineTwoEnds => 2,
            Family::Triangle => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = HcmError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                HcmError::InvalidParameter(format!(
                    "unknown family `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    /// `k` or `L`; ignored for the triangle.
    pub size: usize,
}

impl FamilySpec {
    pub fn new(family: Family, size: usize) -> Self {
        FamilySpec { family, size }
    }
}

pub fn make_family(spec: FamilySpec) -> Result<CommunityShape> {
    let FamilySpec { family, size } = spec;
    if family != Family::Triangle && size < family.min_parameter() {
        return Err(HcmError::InvalidParameter(format!(
            "{family} needs {} >= {} (got {size})",
            family.parameter().unwrap_or("size"),
            family.min_parameter()
        )));
    }
    if size > u32::MAX as usize / 4 {
        return Err(HcmError::InvalidParameter(format!(
            "{family} size {size} is too large"
        )));
    }
    match family {
        Family::SingleVertex => Ok(CommunityShape::single_vertex(size as u32)),
        Family::Household => {
            CommunityShape::from_layout(size, Layout::Complete, StubRuns::uniform(size, 1))
        }
        Family::Triangle => {
            CommunityShape::from_layout(3, Layout::Complete, StubRuns::uniform(3, 1))
        }
        Family::LineTwoEnds => CommunityShape::from_layout(
            size,
            Layout::Path,
            StubRuns::from_runs([(1, 1), (size - 2, 0), (1, 1)]),
        ),
        Family::LineAllStubs => {
            CommunityShape::from_layout(size, Layout::Path, StubRuns::uniform(size, 1))
        }
        Family::StarEndpoints => CommunityShape::from_layout(
            size + 1,
            Layout::Star,
            StubRuns::from_runs([(1, 0), (size, 1)]),
        ),
        Family::StarCenter => CommunityShape::from_layout(
            size + 1,
            Layout::Star,
            StubRuns::from_runs([(1, 1), (size, 0)]),
        ),
    }
}

/// Normalized `p_L ∝ L^{-alpha}` on `min..=max`.
pub fn truncated_power_law(alpha: f64, min: usize, max: usize) -> Result<Vec<(usize, f64)>> {
    if !alpha.is_finite() || min == 0 || max < min {
        return Err(HcmError::InvalidParameter(format!(
            "power law needs finite alpha and 1 <= min <= max (alpha={alpha}, min={min}, max={max})"
        )));
    }
    let raw: Vec<(usize, f64)> = (min..=max).map(|l| (l, (l as f64).powf(-alpha))).collect();
    normalize_pmf(raw)
}

/// Checks nonnegativity, drops zeros, and divides by the (compensated) total.
pub fn normalize_pmf(pmf: Vec<(usize, f64)>) -> Result<Vec<(usize, f64)>> {
    if let Some(&(k, p)) = pmf.iter().find(|(_, p)| !p.is_finite() || *p < 0.0) {
        return Err(HcmError::InvalidParameter(format!("pmf entry p_{k} = {p}")));
    }
    let total = compensated_sum(pmf.iter().map(|&(_, p)| p));
    if total <= 0.0 {
        return Err(HcmError::InvalidParameter("pmf has no mass".into()));
    }
    Ok(pmf
        .into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(k, p)| (k, p / total))
        .collect())
}

/// One family member per support point of `size_pmf`, weighted by it.
pub fn family_mixture(family: Family, size_pmf: &[(usize, f64)]) -> Result<CommunityMixture> {
    let entries = size_pmf
        .iter()
        .map(|&(size, p)| Ok((make_family(FamilySpec::new(family, size))?, p)))
        .collect::<Result<Vec<_>>>()?;
    CommunityMixture::normalized(entries)
}

/// Line communities with two end stubs w.p. `phi`, otherwise a single
/// vertex with three half-edges.
pub fn line_vertex_mixture(length: usize, phi: f64) -> Result<CommunityMixture> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(HcmError::InvalidParameter(format!(
            "phi = {phi} outside [0, 1]"
        )));
    }
    CommunityMixture::normalized(vec![
        (
            make_family(FamilySpec::new(Family::LineTwoEnds, length))?,
            phi,
        ),
        (CommunityShape::single_vertex(3), 1.0 - phi),
    ])
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(HcmError::InvalidParameter(format!(
            "{name} = {x} outside [0, 1]"
        )))
    }
}

fn restrict(pmf: &[(usize, f64)], max_k: usize) -> Result<Vec<(usize, f64)>> {
    normalize_pmf(pmf.iter().copied().filter(|&(k, _)| k <= max_k).collect())
}

fn household_or_vertex(k: usize) -> Result<CommunityShape> {
    make_family(FamilySpec::new(Family::Household, k))
}

/// Household model: a vertex of degree `k` stays a single vertex w.p.
/// `(1−γ)p_k`, or the community is `K_k` w.p. `γ p_k / (k E[W⁻¹])`.
/// The weight law is truncated to `1..=max_k` and renormalized.
pub fn household_or_single_mixture(
    p: &[(usize, f64)],
    gamma: f64,
    max_k: usize,
) -> Result<CommunityMixture> {
    check_probability("gamma", gamma)?;
    if p.iter().any(|&(k, w)| k == 0 && w > 0.0) {
        return Err(HcmError::InvalidParameter(
            "household weights need support on k >= 1".into(),
        ));
    }
    let p = restrict(p, max_k)?;
    let inv_mean = compensated_sum(p.iter().map(|&(k, w)| w / k as f64));
    let mut entries = Vec::new();
    for &(k, w) in &p {
        entries.push((CommunityShape::single_vertex(k as u32), (1.0 - gamma) * w));
        entries.push((household_or_vertex(k)?, gamma * w / (k as f64 * inv_mean)));
    }
    finish(entries)
}

/// Clustered configuration model: a degree-`k` draw from `p̄` becomes `K_k`
/// w.p. `γ_k`, else stays a single vertex. `gamma` lists `(k, γ_k)`;
/// unlisted degrees use `γ_k = 0`.
pub fn clique_degree_mixture(
    pbar: &[(usize, f64)],
    gamma: &[(usize, f64)],
    max_k: usize,
) -> Result<CommunityMixture> {
    let pbar = restrict(pbar, max_k)?;
    for &(k, g) in gamma {
        check_probability(&format!("gamma_{k}"), g)?;
    }
    let gamma_of = |k: usize| {
        gamma
            .iter()
            .find(|&&(j, _)| j == k)
            .map_or(0.0, |&(_, g)| g)
    };
    let mut entries = Vec::new();
    for &(k, w) in &pbar {
        let g = if k <= 1 { 0.0 } else { gamma_of(k) };
        entries.push((CommunityShape::single_vertex(k as u32), (1.0 - g) * w));
        if g > 0.0 {
            entries.push((household_or_vertex(k)?, g * w));
        }
    }
    finish(entries)
}

/// Same model parameterized by the vertex degree law `p` instead of the
/// community law: `p̄_k ∝ p_k / (kγ_k + 1 − γ_k)`, so that a uniformly
/// chosen vertex has degree law `p` for every choice of `γ`.
pub fn clique_degree_mixture_for_degree_law(
    p: &[(usize, f64)],
    gamma: &[(usize, f64)],
    max_k: usize,
) -> Result<CommunityMixture> {
    let gamma_of = |k: usize| {
        gamma
            .iter()
            .find(|&&(j, _)| j == k)
            .map_or(0.0, |&(_, g)| g)
    };
    let pbar: Vec<(usize, f64)> = restrict(p, max_k)?
        .into_iter()
        .map(|(k, w)| {
            let g = gamma_of(k);
            (k, w / (k as f64 * g + 1.0 - g))
        })
        .collect();
    clique_degree_mixture(&pbar, gamma, max_k)
}

fn finish(entries: Vec<(CommunityShape, f64)>) -> Result<CommunityMixture> {
    let mixture = CommunityMixture::normalized(entries)?;
    mixture.ensure_valid()?;
    Ok(mixture)
}
