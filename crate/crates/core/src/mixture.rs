//! Community mixtures `P(H)`, their validation, the joint law of
//! (inter-community degree, size), and moments of `D` and `S`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HcmError, Result};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::shape::{CommunityShape, ShapeDefect};

/// Weights must sum to one within this tolerance once constructed.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Looser tolerance accepted when reading a mixture spec file; the weights
/// are renormalized after the check.
pub const LOAD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    Shape {
        index: usize,
        defect: ShapeDefect,
    },
    NonPositiveWeight {
        index: usize,
        weight: f64,
    },
    WeightsNotNormalized {
        sum: f64,
    },
    /// Every community has exactly two half-edges, so `P(D=2) = 1`.
    AllMassOnDegreeTwo,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "mixture has no communities"),
            Violation::Shape { index, defect } => write!(f, "community {index}: {defect}"),
            Violation::NonPositiveWeight { index, weight } => {
                write!(
                    f,
                    "community {index}: weight {weight} is not strictly positive"
                )
            }
            Violation::WeightsNotNormalized { sum } => {
                write!(f, "weights sum to {sum:.15}, not 1")
            }
            Violation::AllMassOnDegreeTwo => write!(f, "P(D=2)=1"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MixtureEntry {
    pub shape: CommunityShape,
    pub weight: f64,
}

/// A finite probability distribution over community shapes.
///
/// Construction does not validate; call [`CommunityMixture::validate`] or
/// [`CommunityMixture::ensure_valid`] before relying on the model's standing
/// assumptions.
#[derive(Debug, Clone)]
pub struct CommunityMixture {
    entries: Vec<MixtureEntry>,
}

impl CommunityMixture {
    pub fn new(entries: Vec<(CommunityShape, f64)>) -> Self {
        CommunityMixture {
            entries: entries
                .into_iter()
                .map(|(shape, weight)| MixtureEntry { shape, weight })
                .collect(),
        }
    }

    /// Divides the weights by their sum. Zero-weight entries are dropped;
    /// negative or non-finite weights are rejected.
    pub fn normalized(entries: Vec<(CommunityShape, f64)>) -> Result<Self> {
        if let Some((_, w)) = entries.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(HcmError::InvalidParameter(format!("mixture weight {w}")));
        }
        let total = compensated_sum(entries.iter().map(|(_, w)| *w));
        if total <= 0.0 {
            return Err(HcmError::InvalidParameter(
                "mixture weights sum to zero".into(),
            ));
        }
        Ok(Self::new(
            entries
                .into_iter()
                .filter(|(_, w)| *w > 0.0)
                .map(|(s, w)| (s, w / total))
                .collect(),
        ))
    }

    pub fn single(shape: CommunityShape) -> Self {
        Self::new(vec![(shape, 1.0)])
    }

    pub fn entries(&self) -> &[MixtureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CommunityShape, f64)> {
        self.entries.iter().map(|e| (&e.shape, e.weight))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.entries.is_empty() {
            violations.push(Violation::Empty);
            return ValidationReport { violations };
        }
        for (index, entry) in self.entries.iter().enumerate() {
            for defect in entry.shape.defects() {
                violations.push(Violation::Shape { index, defect });
            }
            if !(entry.weight > 0.0) || !entry.weight.is_finite() {
                violations.push(Violation::NonPositiveWeight {
                    index,
                    weight: entry.weight,
                });
            }
        }
        let sum = compensated_sum(self.entries.iter().map(|e| e.weight));
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            violations.push(Violation::WeightsNotNormalized { sum });
        }
        if self.entries.iter().all(|e| e.shape.out_degree() == 2) {
            violations.push(Violation::AllMassOnDegreeTwo);
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(HcmError::InvalidMixture(report))
        }
    }

    /// Like [`CommunityMixture::ensure_valid`] but tolerates `P(D=2)=1`.
    /// That condition is a hypothesis of the giant-component results, not a
    /// requirement for building graphs or evaluating percolation formulas.
    pub fn ensure_structurally_valid(&self) -> Result<()> {
        let mut report = self.validate();
        report
            .violations
            .retain(|v| *v != Violation::AllMassOnDegreeTwo);
        if report.is_ok() {
            Ok(())
        } else {
            Err(HcmError::InvalidMixture(report))
        }
    }

    /// `p_{k,s}`: probability that a community has macro degree `k` and size `s`.
    pub fn joint_pmf(&self) -> JointPmf {
        let mut acc: BTreeMap<(u64, usize), CompensatedSum> = BTreeMap::new();
        for (shape, w) in self.iter() {
            acc.entry((shape.out_degree(), shape.vertex_count()))
                .or_default()
                .add(w);
        }
        JointPmf {
            cells: acc
                .into_iter()
                .map(|(key, sum)| (key, sum.value()))
                .collect(),
        }
    }

    /// Law of `D`, the macro degree of a random community.
    pub fn macro_degree_pmf(&self) -> BTreeMap<u64, f64> {
        self.joint_pmf().degree_marginal()
    }

    /// `E[S]`.
    pub fn mean_size(&self) -> f64 {
        compensated_sum(self.iter().map(|(s, w)| w * s.vertex_count() as f64))
    }

    /// `E[D]`.
    pub fn mean_macro_degree(&self) -> f64 {
        compensated_sum(self.iter().map(|(s, w)| w * s.out_degree() as f64))
    }

    pub fn moments(&self) -> Result<Moments> {
        let mut d1 = CompensatedSum::new();
        let mut d2 = CompensatedSum::new();
        let mut s1 = CompensatedSum::new();
        let mut deg = CompensatedSum::new();
        for (shape, w) in self.iter() {
            let d = shape.out_degree() as f64;
            d1.add(w * d);
            d2.add(w * d * d);
            s1.add(w * shape.vertex_count() as f64);
            let degree_total = 2.0 * shape.edge_count() as f64 + d;
            deg.add(w * degree_total);
        }
        let mean_d = d1.value();
        if mean_d <= 0.0 {
            return Err(HcmError::UndefinedNu);
        }
        let second_d = d2.value();
        let factorial_d = second_d - mean_d;
        let nu_d = factorial_d / mean_d;
        let mean_size = s1.value();
        Ok(Moments {
            mean_d,
            second_moment_d: second_d,
            factorial_moment_d: factorial_d,
            nu_d,
            supercritical: nu_d > 1.0,
            mean_size,
            mean_vertex_degree: deg.value() / mean_size,
        })
    }

    /// Limiting degree law of a uniformly chosen vertex:
    /// `p̂_k = Σ_H P(H) n_k^(H) / E[S]`, with `n_k^(H)` the number of
    /// degree-`k` vertices of `H`.
    pub fn vertex_degree_pmf(&self) -> BTreeMap<u64, f64> {
        let mut acc: BTreeMap<u64, CompensatedSum> = BTreeMap::new();
        for (shape, w) in self.iter() {
            for (k, count) in shape.degree_counts() {
                acc.entry(k).or_default().add(w * count as f64);
            }
        }
        let mean_size = self.mean_size();
        acc.into_iter()
            .map(|(k, sum)| (k, sum.value() / mean_size))
            .collect()
    }

    pub fn to_spec(&self) -> MixtureSpec {
        MixtureSpec {
            communities: self
                .iter()
                .map(|(shape, w)| CommunitySpec {
                    prob: w,
                    size: shape.vertex_count(),
                    edges: shape
                        .edges()
                        .map(|(a, b)| [a as usize, b as usize])
                        .collect(),
                    out_stubs: shape.out_stubs().collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("mixture spec serializes")
    }

    /// Parses a mixture spec document. Shapes are checked for range errors
    /// only; run [`CommunityMixture::validate`] for the model assumptions.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MixtureSpec =
            serde_json::from_str(text).map_err(|e| HcmError::MixtureSpec(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn from_spec(spec: MixtureSpec) -> Result<Self> {
        if spec.communities.is_empty() {
            return Err(HcmError::MixtureSpec("no communities".into()));
        }
        let mut entries = Vec::with_capacity(spec.communities.len());
        for (i, c) in spec.communities.into_iter().enumerate() {
            if !(c.prob > 0.0) || !c.prob.is_finite() {
                return Err(HcmError::MixtureSpec(format!(
                    "community {i}: probability {} is not strictly positive",
                    c.prob
                )));
            }
            let shape =
                CommunityShape::new(c.size, c.edges.iter().map(|e| (e[0], e[1])), &c.out_stubs)
                    .map_err(|e| HcmError::MixtureSpec(format!("community {i}: {e}")))?;
            entries.push((shape, c.prob));
        }
        let sum = compensated_sum(entries.iter().map(|(_, w)| *w));
        if (sum - 1.0).abs() > LOAD_TOLERANCE {
            return Err(HcmError::MixtureSpec(format!(
                "probabilities sum to {sum}, outside 1 ± {LOAD_TOLERANCE:e}"
            )));
        }
        Self::normalized(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// JSON interchange form of a mixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub communities: Vec<CommunitySpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommunitySpec {
    pub prob: f64,
    pub size: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    pub out_stubs: Vec<u32>,
}

/// `p_{k,s}` keyed by (macro degree, size).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    cells: BTreeMap<(u64, usize), f64>,
}

impl JointPmf {
    pub fn prob(&self, k: u64, s: usize) -> f64 {
        self.cells.get(&(k, s)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, usize), f64)> + '_ {
        self.cells.iter().map(|(&key, &p)| (key, p))
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.cells.values().copied())
    }

    pub fn degree_marginal(&self) -> BTreeMap<u64, f64> {
        let mut acc: BTreeMap<u64, CompensatedSum> = BTreeMap::new();
        for (&(k, _), &p) in &self.cells {
            acc.entry(k).or_default().add(p);
        }
        acc.into_iter().map(|(k, s)| (k, s.value())).collect()
    }

    pub fn size_marginal(&self) -> BTreeMap<usize, f64> {
        let mut acc: BTreeMap<usize, CompensatedSum> = BTreeMap::new();
        for (&(_, s), &p) in &self.cells {
            acc.entry(s).or_default().add(p);
        }
        acc.into_iter().map(|(s, sum)| (s, sum.value())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    /// `E[D]`.
    pub mean_d: f64,
    /// `E[D^2]`.
    pub second_moment_d: f64,
    /// `E[D(D-1)]`.
    pub factorial_moment_d: f64,
    /// `E[D(D-1)] / E[D]`.
    pub nu_d: f64,
    pub supercritical: bool,
    /// `E[S]`.
    pub mean_size: f64,
    /// Mean total degree of a uniformly chosen vertex.
    pub mean_vertex_degree: f64,
}

/// `(η, ε)`-denseness: at least `eps·s` vertices have intra-degree at
/// least `eta·(s−1)`.
pub fn is_dense(shape: &CommunityShape, eta: f64, eps: f64) -> Result<bool> {
    if !(eta > 0.0 && eta <= 1.0 && eps > 0.0 && eps <= 1.0) {
        return Err(HcmError::InvalidParameter(format!(
            "denseness needs 0 < eta, eps <= 1 (got eta={eta}, eps={eps})"
        )));
    }
    let s = shape.vertex_count();
    let threshold = eta * (s - 1) as f64;
    let dense = shape
        .intra_degrees()
        .into_iter()
        .filter(|&d| d as f64 >= threshold)
        .count();
    Ok(dense as f64 >= eps * s as f64)
}
