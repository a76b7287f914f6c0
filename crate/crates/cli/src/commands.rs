use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use hcm::catalog::Family;
use hcm::graph::HcmGraph;
use hcm::metrics::{
    clustering, components, degree_histogram, tail_exponent, write_component_csv,
    DEFAULT_TAIL_WINDOW,
};
use hcm::montecarlo::{percolate_realizations, PercolationEstimate, GIANT_THRESHOLD};
use hcm::percolation::{solve_xi_unpercolated, McFallback, PercolationModel, SpectrumPolicy};
use hcm::spectrum::DEFAULT_ENUMERATION_CAP;
use hcm::synthesis::{collapse, realize_detailed, SimpleMode};
use hcm::triangles::{
    expected_cluster_size, extract_triangle_communities, generate_triangle_model, pmf_mean,
};
use hcm::CommunityMixture;
use serde::Serialize;
use serde_json::{json, Value};

use crate::source::{
    build_family, load_mixture, parse_grid, parse_params, parse_pmf, MixtureSource,
    COMPOSITE_FAMILIES,
};
use crate::Command;

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Largest intra edge count handled by exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    /// Estimate larger communities by simulation with this many replicates
    /// instead of failing.
    #[arg(long, value_name = "REPLICATES")]
    pub mc_fallback: Option<usize>,
}

impl SpectrumArgs {
    fn policy(&self, seed: u64) -> SpectrumPolicy {
        SpectrumPolicy {
            cap: self.cap,
            monte_carlo: self
                .mc_fallback
                .map(|replicates| McFallback { replicates, seed }),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Communities per simulated graph.
    #[arg(long = "mc-n", value_name = "N")]
    pub n: Option<usize>,
    /// Simulation replicates; 0 disables simulation.
    #[arg(long, default_value_t = 0)]
    pub replicates: usize,
}

impl McArgs {
    fn enabled(&self) -> Result<Option<usize>> {
        match (self.replicates, self.n) {
            (0, _) => Ok(None),
            (_, Some(n)) => Ok(Some(n)),
            (_, None) => bail!("--replicates needs --mc-n"),
        }
    }
}

/// Everything needed to rerun a command; embedded in every output.
#[derive(Debug, Clone, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<MixtureSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    replicates: Option<usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    options: BTreeMap<&'static str, Value>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    fn new(command: &'static str, seed: u64) -> Self {
        Manifest {
            tool: "hcm",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            source: None,
            input: None,
            n: None,
            pi: None,
            vary: None,
            replicates: None,
            options: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn output(&mut self, path: &Option<PathBuf>) {
        if let Some(p) = path {
            self.outputs.push(p.clone());
        }
    }

    fn comment(&self) -> String {
        format!(
            "manifest {}",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn with_manifest<T: Serialize>(manifest: &Manifest, body: T) -> Result<Value> {
    let mut value = serde_json::to_value(body)?;
    match value.as_object_mut() {
        Some(map) => {
            map.insert("manifest".into(), serde_json::to_value(manifest)?);
            Ok(value)
        }
        None => bail!("output body is not an object"),
    }
}

fn mixture_with_warnings(source: &MixtureSource) -> Result<CommunityMixture> {
    let mixture = load_mixture(source)?;
    mixture.ensure_structurally_valid()?;
    let report = mixture.validate();
    if !report.is_ok() {
        eprintln!("hcm: warning: {report}");
    }
    Ok(mixture)
}

pub fn run(command: Command, seed: u64) -> Result<()> {
    match command {
        Command::Generate {
            mixture,
            n,
            out,
            summary,
            simple,
        } => generate(mixture.source()?, n, out, summary, simple, seed),
        Command::Analyze {
            edges,
            out,
            csv_dir,
        } => analyze(edges, out, csv_dir, seed),
        Command::Threshold {
            mixture,
            spectra,
            out,
        } => threshold(mixture.source()?, &spectra, out, seed),
        Command::Giant {
            mixture,
            pi,
            spectra,
            mc,
            out,
        } => giant(mixture.source()?, pi, &spectra, &mc, out, seed),
        Command::Sweep {
            mixture,
            pi,
            vary,
            spectra,
            mc,
            out,
        } => match vary {
            Some(vary) => sweep_parameter(mixture.source()?, &vary, &spectra, out, seed),
            None => sweep_pi(mixture.source()?, &pi, &spectra, &mc, out, seed),
        },
        Command::Catalog {
            family,
            params,
            out,
        } => catalog(family, &params, out),
        Command::TriangleModel {
            edge_pmf,
            tri_pmf,
            n,
            simple,
            edges,
            out,
        } => triangle_model(&edge_pmf, &tri_pmf, n, simple, edges, out, seed),
    }
}

fn generate(
    source: MixtureSource,
    n: usize,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
    simple: bool,
    seed: u64,
) -> Result<()> {
    let mixture = mixture_with_warnings(&source)?;
    let mut manifest = Manifest::new("generate", seed);
    manifest.source = Some(source);
    manifest.n = Some(n);
    manifest.options.insert("simple", json!(simple));
    manifest.output(&out);
    manifest.output(&summary);

    let mode = if simple {
        SimpleMode::reject_until_simple()
    } else {
        SimpleMode::Multigraph
    };
    let r = realize_detailed(&mixture, n, seed, mode)?;
    if r.parity_redraws > 0 {
        eprintln!(
            "hcm: parity repair: redrew the final community {} time(s) to make the half-edge total even",
            r.parity_redraws
        );
    }
    let mut edge_out = open_out(out.as_deref())?;
    r.graph
        .write_edge_list(&mut edge_out, Some(seed), &[manifest.comment()])?;
    edge_out.flush()?;

    let g = &r.graph;
    let body = json!({
        "N": g.vertex_count(),
        "n": g.communities().len(),
        "E": g.edge_count(),
        "intra_edges": g.intra_edge_count(),
        "inter_edges": g.edge_count() - g.intra_edge_count(),
        "nu_d": mixture.moments().ok().map(|m| m.nu_d),
        "parity_redraws": r.parity_redraws,
        "matchings": r.matchings,
        "simple": g.is_simple(),
    });
    let value = with_manifest(&manifest, body)?;
    match (&summary, &out) {
        (Some(path), _) => write_json(Some(path), &value),
        (None, Some(_)) => write_json(None, &value),
        (None, None) => {
            eprintln!("{}", serde_json::to_string_pretty(&value)?);
            Ok(())
        }
    }
}

fn write_csv_file(
    dir: &Path,
    name: &str,
    manifest: &Manifest,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let mut out = io::BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(out, "# {}", manifest.comment())?;
    body(&mut out)?;
    out.flush()?;
    Ok(())
}

fn analyze(
    edges: PathBuf,
    out: Option<PathBuf>,
    csv_dir: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let file = File::open(&edges).with_context(|| format!("opening {}", edges.display()))?;
    let graph = HcmGraph::read_edge_list(BufReader::new(file))?;
    let mut manifest = Manifest::new("analyze", seed);
    manifest.input = Some(edges);
    manifest.output(&out);
    if let Some(dir) = &csv_dir {
        for name in ["degree.csv", "components.csv", "clustering.csv", "tail.csv"] {
            manifest.outputs.push(dir.join(name));
        }
    }

    let degrees = degree_histogram(&graph);
    let comps = components(&graph);
    let clust = clustering(&graph);
    let samples = graph.degrees();
    let tail = tail_exponent(&samples, DEFAULT_TAIL_WINDOW);
    let macro_degrees = collapse(&graph, &vec![true; graph.intra_edge_count()])?;
    let macro_tail = tail_exponent(&macro_degrees, DEFAULT_TAIL_WINDOW);

    let body = json!({
        "vertex_count": graph.vertex_count(),
        "edge_count": graph.edge_count(),
        "community_count": graph.communities().len(),
        "simple": graph.is_simple(),
        "mean_degree": degrees.mean(),
        "components": {
            "largest": comps.largest,
            "largest_fraction": comps.largest_fraction,
            "second_fraction": comps.second_fraction,
            "community_fraction": comps.community_fraction,
        },
        "clustering": clust.as_ref().ok().map(|c| c.global),
        "clustering_error": clust.as_ref().err().map(|e| e.to_string()),
        "degree_tail": tail.as_ref().ok().map(|t| json!({"exponent": t.exponent, "range": t.range})),
        "degree_tail_error": tail.as_ref().err().map(|e| e.to_string()),
        "macro_degree_tail": macro_tail.as_ref().ok().map(|t| json!({"exponent": t.exponent, "range": t.range})),
        "macro_degree_tail_error": macro_tail.as_ref().err().map(|e| e.to_string()),
    });
    if let Err(e) = &clust {
        eprintln!("hcm: clustering skipped: {e}");
    }

    if let Some(dir) = &csv_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_csv_file(dir, "degree.csv", &manifest, |w| Ok(degrees.write_csv(w)?))?;
        write_csv_file(dir, "components.csv", &manifest, |w| {
            Ok(write_component_csv(&comps, w)?)
        })?;
        write_csv_file(dir, "clustering.csv", &manifest, |w| match &clust {
            Ok(c) => Ok(c.write_csv(w)?),
            Err(e) => Ok(writeln!(w, "# not computed: {e}")?),
        })?;
        write_csv_file(dir, "tail.csv", &manifest, |w| match &tail {
            Ok(t) => Ok(t.write_csv(w)?),
            Err(e) => Ok(writeln!(w, "# not computed: {e}")?),
        })?;
    }
    write_json(out.as_deref(), &with_manifest(&manifest, body)?)
}

fn threshold(
    source: MixtureSource,
    spectra: &SpectrumArgs,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let mixture = mixture_with_warnings(&source)?;
    let mut manifest = Manifest::new("threshold", seed);
    manifest.source = Some(source);
    manifest.options.insert("cap", json!(spectra.cap));
    manifest
        .options
        .insert("mc_fallback", json!(spectra.mc_fallback));
    manifest.output(&out);
    let model = PercolationModel::new(&mixture, &spectra.policy(seed))?;
    let critical = model.critical_pi()?;
    write_json(out.as_deref(), &with_manifest(&manifest, critical)?)
}

fn giant(
    source: MixtureSource,
    pi: Option<f64>,
    spectra: &SpectrumArgs,
    mc: &McArgs,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let mixture = mixture_with_warnings(&source)?;
    let mc_n = mc.enabled()?;
    let mut manifest = Manifest::new("giant", seed);
    manifest.source = Some(source);
    manifest.pi = pi.map(|p| vec![p]);
    manifest.n = mc_n;
    manifest.replicates = mc_n.map(|_| mc.replicates);
    manifest.output(&out);

    let analytic = match pi {
        None => serde_json::to_value(solve_xi_unpercolated(&mixture)?)?,
        Some(pi) => {
            manifest.options.insert("cap", json!(spectra.cap));
            let model = PercolationModel::new(&mixture, &spectra.policy(seed))?;
            serde_json::to_value(model.percolated_giant(pi)?)?
        }
    };
    let simulated = match mc_n {
        Some(n) => Some(percolate_realizations(
            &mixture,
            n,
            pi.unwrap_or(1.0),
            mc.replicates,
            seed,
        )?),
        None => None,
    };
    let body = json!({
        "pi": pi,
        "analytic": analytic,
        "monte_carlo": simulated,
    });
    write_json(out.as_deref(), &with_manifest(&manifest, body)?)
}

fn sweep_pi(
    source: MixtureSource,
    grid: &str,
    spectra: &SpectrumArgs,
    mc: &McArgs,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let mixture = mixture_with_warnings(&source)?;
    let pis = parse_grid(grid)?;
    let mc_n = mc.enabled()?;
    let mut manifest = Manifest::new("sweep", seed);
    manifest.source = Some(source);
    manifest.pi = Some(pis.clone());
    manifest.n = mc_n;
    manifest.replicates = mc_n.map(|_| mc.replicates);
    manifest.options.insert("cap", json!(spectra.cap));
    manifest.output(&out);

    let model = PercolationModel::new(&mixture, &spectra.policy(seed))?;
    let critical = model.critical_pi()?;
    let mut w = open_out(out.as_deref())?;
    writeln!(w, "# {}", manifest.comment())?;
    writeln!(w, "# pi_c={}", critical.pi_c)?;
    writeln!(
        w,
        "pi,forward_degree,xi,analytic_fraction,mc_mean,mc_stderr,mc_giant_replicates"
    )?;
    for (i, &pi) in pis.iter().enumerate() {
        let sol = model.percolated_giant(pi)?;
        let sim: Option<PercolationEstimate> = match mc_n {
            Some(n) => Some(percolate_realizations(
                &mixture,
                n,
                pi,
                mc.replicates,
                seed.wrapping_add((i as u64) << 32),
            )?),
            None => None,
        };
        let (mean, se, giants) = match &sim {
            Some(s) => (
                s.largest.mean.to_string(),
                s.largest.std_error.map_or(String::new(), |x| x.to_string()),
                s.giant_replicates.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(
            w,
            "{pi},{},{},{},{mean},{se},{giants}",
            sol.forward_degree, sol.xi, sol.fraction
        )?;
    }
    w.flush()?;
    Ok(())
}

fn sweep_parameter(
    source: MixtureSource,
    vary: &str,
    spectra: &SpectrumArgs,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let MixtureSource::Family { family, params } = &source else {
        bail!("--vary needs --family");
    };
    let (key, grid) = vary
        .split_once('=')
        .with_context(|| format!("--vary `{vary}` is not KEY=GRID"))?;
    let values = parse_grid(grid)?;
    let mut manifest = Manifest::new("sweep", seed);
    manifest.vary = Some(vary.to_string());
    manifest.options.insert("cap", json!(spectra.cap));
    manifest.output(&out);
    let family = family.clone();
    let base = params.clone();
    manifest.source = Some(source);

    let mut w = open_out(out.as_deref())?;
    writeln!(w, "# {}", manifest.comment())?;
    writeln!(w, "{key},pi_c,residual,no_threshold")?;
    for v in values {
        let mut params = base.clone();
        params.insert(key.to_string(), v.to_string());
        let mixture = build_family(&family, &params)?;
        let model = PercolationModel::new(&mixture, &spectra.policy(seed))?;
        let c = model.critical_pi()?;
        writeln!(
            w,
            "{v},{},{},{}",
            c.pi_c, c.diagnostics.residual, c.diagnostics.no_threshold
        )?;
    }
    w.flush()?;
    Ok(())
}

fn catalog(family: Option<String>, params: &[String], out: Option<PathBuf>) -> Result<()> {
    let mut w = open_out(out.as_deref())?;
    match family {
        None => {
            for f in Family::ALL {
                let p = f
                    .parameter()
                    .map_or("-".to_string(), |p| format!("{p} >= {}", f.min_parameter()));
                writeln!(w, "{:<20} {p}", f.name())?;
            }
            for (name, help) in COMPOSITE_FAMILIES {
                writeln!(w, "{name:<20} {help}")?;
            }
        }
        Some(family) => {
            let mixture = build_family(&family, &parse_params(params)?)?;
            writeln!(w, "{}", mixture.to_json())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn triangle_model(
    edge_pmf: &str,
    tri_pmf: &str,
    n: usize,
    simple: bool,
    edges: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<()> {
    let edge = parse_pmf(edge_pmf)?;
    let tri = parse_pmf(tri_pmf)?;
    let mut manifest = Manifest::new("newman", seed);
    manifest.n = Some(n);
    manifest.options.insert("edge_pmf", json!(edge_pmf));
    manifest.options.insert("tri_pmf", json!(tri_pmf));
    manifest.options.insert("simple", json!(simple));
    manifest.output(&edges);
    manifest.output(&out);

    let mode = if simple {
        SimpleMode::reject_until_simple()
    } else {
        SimpleMode::Multigraph
    };
    let r = generate_triangle_model(&edge, &tri, n, seed, mode)?;
    if let Some(path) = &edges {
        let mut w = open_out(Some(path))?;
        r.graph
            .write_edge_list(&mut w, Some(seed), &[manifest.comment()])?;
    }
    let clusters = extract_triangle_communities(&r.graph);
    let comps = components(&r.graph);
    let m1 = pmf_mean(&edge);
    let m2: f64 = {
        let total: f64 = edge.iter().map(|p| p.1).sum();
        edge.iter().map(|&(k, p)| (k * k) as f64 * p).sum::<f64>() / total
    };
    let forward = if m1 > 0.0 { (m2 - m1) / m1 } else { 0.0 };
    let body = json!({
        "vertex_count": r.graph.vertex_count(),
        "edge_count": r.graph.edge_count(),
        "triangles": r.graph.intra_edge_count() / 3,
        "parity_redraws": r.parity_redraws,
        "clusters": clusters,
        "expected_cluster_size": expected_cluster_size(&tri),
        "plain_forward_degree": forward,
        "largest_fraction": comps.largest_fraction,
        "has_giant": comps.largest_fraction > GIANT_THRESHOLD,
    });
    write_json(out.as_deref(), &with_manifest(&manifest, body)?)
}
