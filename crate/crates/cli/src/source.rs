//! Resolution of `--family`/`--param` and mixture files into mixtures, plus
//! the small value grammars shared by the subcommands.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use hcm::catalog::{
    clique_degree_mixture_for_degree_law, family_mixture, household_or_single_mixture,
    line_vertex_mixture, make_family, truncated_power_law, Family, FamilySpec, DEFAULT_TRUNCATION,
};
use hcm::percolation::line3regular_mixture;
use hcm::CommunityMixture;
use serde::Serialize;

/// Families beyond the single-shape catalog.
pub const COMPOSITE_FAMILIES: &[(&str, &str)] = &[
    (
        "line_vertex",
        "L, phi: line_two_ends(L) w.p. phi, else a vertex with 3 half-edges",
    ),
    (
        "line3regular",
        "alpha, max: line_all_stubs with lengths ~ L^-alpha on 1..=max",
    ),
    (
        "clique_degree",
        "a, gamma3: vertex degrees 3 w.p. a and 6 otherwise; K_3 w.p. gamma3",
    ),
    (
        "household_or_single",
        "pmf, gamma, max: households of size k or single vertices",
    ),
];

#[derive(Debug, Clone, Args)]
pub struct MixtureArgs {
    /// Mixture spec JSON file.
    #[arg(conflicts_with = "family")]
    pub mixture: Option<PathBuf>,

    /// Catalog family instead of a file.
    #[arg(long)]
    pub family: Option<String>,

    /// Family parameter `key=value`; repeatable. Single-shape families take
    /// `L` (or `k`), or `alpha`, `min`, `max` for power-law sizes.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MixtureSource {
    File {
        mixture: PathBuf,
    },
    Family {
        family: String,
        params: BTreeMap<String, String>,
    },
}

impl MixtureArgs {
    pub fn source(&self) -> Result<MixtureSource> {
        match (&self.mixture, &self.family) {
            (Some(path), None) => {
                if !self.params.is_empty() {
                    bail!("--param needs --family");
                }
                Ok(MixtureSource::File {
                    mixture: path.clone(),
                })
            }
            (None, Some(family)) => Ok(MixtureSource::Family {
                family: family.clone(),
                params: parse_params(&self.params)?,
            }),
            (None, None) => bail!("give a mixture file or --family"),
            (Some(_), Some(_)) => bail!("give either a mixture file or --family, not both"),
        }
    }
}

pub fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>> {
    let mut params = BTreeMap::new();
    for item in raw {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter `{item}` is not KEY=VALUE"))?;
        if params
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            bail!("parameter `{k}` given twice");
        }
    }
    Ok(params)
}

struct Params<'a> {
    family: &'a str,
    map: &'a BTreeMap<String, String>,
    used: Vec<&'a str>,
}

impl<'a> Params<'a> {
    fn raw(&mut self, keys: &[&'a str]) -> Option<&'a str> {
        for &k in keys {
            if let Some(v) = self.map.get(k) {
                self.used.push(k);
                return Some(v.as_str());
            }
        }
        None
    }

    fn get<T: FromStr>(&mut self, keys: &[&'a str]) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(keys) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("{}: parameter {} = `{v}`: {e}", self.family, keys[0])),
        }
    }

    fn need<T: FromStr>(&mut self, keys: &[&'a str]) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(keys)?
            .ok_or_else(|| anyhow!("{} needs parameter {}", self.family, keys[0]))
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().find(|k| !self.used.contains(&k.as_str())) {
            bail!("{} does not take parameter `{k}`", self.family);
        }
        Ok(())
    }
}

pub fn build_family(family: &str, map: &BTreeMap<String, String>) -> Result<CommunityMixture> {
    let mut p = Params {
        family,
        map,
        used: Vec::new(),
    };
    let mixture = match family {
        "line_vertex" => line_vertex_mixture(p.need(&["L"])?, p.need(&["phi"])?)?,
        "line3regular" => {
            let max = p.get(&["max"])?.unwrap_or(DEFAULT_TRUNCATION);
            line3regular_mixture(p.need(&["alpha"])?, max)?
        }
        "clique_degree" => {
            let a: f64 = p.need(&["a"])?;
            let gamma: f64 = p.need(&["gamma3", "gamma"])?;
            clique_degree_mixture_for_degree_law(&[(3, a), (6, 1.0 - a)], &[(3, gamma)], 6)?
        }
        "household_or_single" => {
            let pmf = parse_pmf(
                p.raw(&["pmf"])
                    .ok_or_else(|| anyhow!("household_or_single needs parameter pmf"))?,
            )?;
            let max = p.get(&["max"])?.unwrap_or(DEFAULT_TRUNCATION);
            household_or_single_mixture(&pmf, p.need(&["gamma"])?, max)?
        }
        name => {
            let fam = Family::from_str(name).map_err(|e| anyhow!("{e}"))?;
            if fam == Family::Triangle {
                CommunityMixture::single(make_family(FamilySpec::new(fam, 3))?)
            } else if let Some(size) = p.get::<usize>(&["L", "k", "size"])? {
                CommunityMixture::single(make_family(FamilySpec::new(fam, size))?)
            } else {
                let alpha: f64 = p
                    .get(&["alpha"])?
                    .ok_or_else(|| anyhow!("{name} needs L (or k) or alpha"))?;
                let min = p.get(&["min"])?.unwrap_or(fam.min_parameter().max(1));
                let max = p.get(&["max"])?.unwrap_or(DEFAULT_TRUNCATION);
                family_mixture(fam, &truncated_power_law(alpha, min, max)?)?
            }
        }
    };
    p.finish()?;
    Ok(mixture)
}

pub fn load_mixture(source: &MixtureSource) -> Result<CommunityMixture> {
    match source {
        MixtureSource::File { mixture } => CommunityMixture::load(mixture)
            .with_context(|| format!("loading {}", mixture.display())),
        MixtureSource::Family { family, params } => build_family(family, params),
    }
}

/// `k:p,k:p,...`
pub fn parse_pmf(text: &str) -> Result<Vec<(usize, f64)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, p) = item
                .split_once(':')
                .ok_or_else(|| anyhow!("pmf entry `{item}` is not k:p"))?;
            Ok((
                k.trim()
                    .parse()
                    .with_context(|| format!("pmf value `{k}`"))?,
                p.trim()
                    .parse()
                    .with_context(|| format!("pmf probability `{p}`"))?,
            ))
        })
        .collect()
}

/// `start:stop:count` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse()?;
        let stop: f64 = parts[1].trim().parse()?;
        let count: usize = parts[2].trim().parse()?;
        return Ok(match count {
            0 => bail!("grid `{text}` has no points"),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        });
    }
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("grid value `{s}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("empty grid");
    }
    Ok(values)
}
