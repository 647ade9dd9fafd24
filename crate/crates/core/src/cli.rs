//! `balance-lens` command line.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 I/O error,
//! 3 malformed input data.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::binning::Alpha;
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorConfig, Model};
use crate::graph::{build_graph, in_degree_histogram, DirectedGraph};
use crate::ingest::{read_edge_list, write_edge_list, ReadOptions};
use crate::metrics::{balance_profile, degree_at_top_percent, degree_slice};
use crate::report::{
    read_document, read_profile, write_degrees_csv, write_json, write_profile_csv, write_sidecar,
    write_slice_csv, ComparisonDocument, Document, EstimateRow, ProfileDocument, ProfileTable,
    ReferenceKind, RunManifest, TheoryDocument,
};
use crate::theory::{
    compare_fits, compare_profiles, estimate_gamma, estimate_scale_a, theorem1_profile_with,
    FitBoundaries, GammaMethod, TheoryParams,
};

/// Environment variable holding the default interval parameter.
pub const ALPHA_ENV: &str = "BALANCE_LENS_ALPHA";
/// Smallest in-degree used when estimating the power law from data.
pub const DEFAULT_K_MIN: u64 = 15;
pub const DEFAULT_TOLERANCE: f64 = 0.25;

#[derive(Debug, Parser)]
#[command(name = "balance-lens", version, about = "Edge balance ratio analytics for directed graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a power-law network as an edge list
    Generate(GenerateArgs),
    /// Compute the balance profile and positivity of an edge list
    Analyze(AnalyzeArgs),
    /// Write the closed-form profile for given power-law parameters
    Predict(PredictArgs),
    /// Fit section slopes of a profile and compare them with a reference
    Compare(CompareArgs),
    /// List balance ratios of edges touching vertices of one in-degree
    Slice(SliceArgs),
    /// Write the in-degree histogram of an edge list
    Degrees(DegreesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Deterministic,
    Type1,
    Type2,
    Type3,
    Sequence,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest admissible in-degree (default N - 1)
    #[arg(long)]
    pub k_cap: Option<u64>,
    /// Target in-degrees, one per line (with --model sequence)
    #[arg(long)]
    pub degrees: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct AlphaArg {
    /// Interval parameter, a float or b^e such as 10^0.1
    #[arg(long, env = ALPHA_ENV, default_value = "10^0.1")]
    pub alpha: String,
}

impl AlphaArg {
    fn resolve(&self) -> Result<Alpha> {
        self.alpha.parse()
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub alpha: AlphaArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Reject the file on the first malformed line
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Below this ratio intervals belong to the far-below section
    #[arg(long, default_value_t = 0.1)]
    pub r_lo: f64,
    /// Above this ratio intervals belong to the far-above section
    #[arg(long, default_value_t = 10.0)]
    pub r_hi: f64,
}

impl BoundaryArgs {
    fn resolve(&self) -> Result<FitBoundaries> {
        let b = FitBoundaries {
            r_lo: self.r_lo,
            r_hi: self.r_hi,
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub scale_a: f64,
    #[arg(long)]
    pub nodes: u64,
    #[command(flatten)]
    pub alpha: AlphaArg,
    #[command(flatten)]
    pub bounds: BoundaryArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mle,
    LoglogLs,
}

impl From<MethodArg> for GammaMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mle => GammaMethod::Mle,
            MethodArg::LoglogLs => GammaMethod::LoglogLs,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Profile document (JSON or CSV)
    #[arg(long)]
    pub empirical: PathBuf,
    /// Theory document, or another profile document
    #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
    pub theory: Option<PathBuf>,
    /// Edge list to estimate the power law from
    #[arg(long)]
    pub auto: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mle")]
    pub method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_K_MIN)]
    pub k_min: u64,
    /// Largest |slope delta| counted as agreement
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    pub bounds: BoundaryArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, conflicts_with = "top_percent", required_unless_present = "top_percent")]
    pub k: Option<u64>,
    /// Pick k as the in-degree at this top percentile of vertices
    #[arg(long)]
    pub top_percent: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        Error::Format { .. } | Error::Document { .. } => 3,
        _ => 1,
    }
}

/// Parses `std::env::args` and runs; for use from `main`.
pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Slice(a) => cmd_slice(a),
        Command::Degrees(a) => cmd_degrees(a),
    }
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

fn load_graph(path: &Path, strict: bool) -> Result<DirectedGraph> {
    let list = read_edge_list(
        path,
        ReadOptions {
            strict,
            ..Default::default()
        },
    )?;
    let r = &list.report;
    if r.malformed > 0 {
        eprintln!("warning: {}: skipped {} malformed line(s)", path.display(), r.malformed);
        for e in &r.errors {
            eprintln!("  line {}: {}", e.line, e.reason);
        }
    }
    let (g, built) = build_graph(list.edges);
    if built.self_loops_dropped + built.duplicates_dropped > 0 {
        eprintln!(
            "note: dropped {} self-loop(s) and {} duplicate edge(s)",
            built.self_loops_dropped, built.duplicates_dropped
        );
    }
    eprintln!("read {} vertices, {} edges from {}", g.vertex_count(), g.edge_count(), path.display());
    Ok(g)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn read_degree_sequence(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse::<u64>().map_err(|e| Error::Format {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Config(format!("--{name} is required for model {:?}", a.model)))
    };
    let (model, n, gamma) = match a.model {
        ModelArg::Sequence => {
            let path = a
                .degrees
                .as_ref()
                .ok_or_else(|| Error::Config("--degrees is required with --model sequence".into()))?;
            let seq = read_degree_sequence(path)?;
            let n = seq.len();
            (Model::Sequence(seq), n, a.gamma.unwrap_or(f64::NAN))
        }
        m => {
            let model = match m {
                ModelArg::Deterministic => Model::Deterministic,
                ModelArg::Type1 => Model::TypeI,
                ModelArg::Type2 => Model::TypeII,
                _ => Model::TypeIII,
            };
            let n = a
                .nodes
                .ok_or_else(|| Error::Config("--nodes is required".into()))?;
            (model, n, need(a.gamma, "gamma")?)
        }
    };
    let mut cfg = GeneratorConfig::new(model, n, gamma, a.seed);
    if let Some(cap) = a.k_cap {
        cfg = cfg.with_k_cap(cap);
    }
    cfg.validate()?;
    eprintln!("generating {} network with {} vertices", cfg.model.name(), n);
    let out = generate(&cfg)?;
    let g = &out.graph;
    write_edge_list(g, &a.out)?;

    let mut manifest = RunManifest::new("generate")
        .param("model", cfg.model.name())
        .param("nodes", n)
        .param("gamma", a.gamma)
        .param("k_cap", cfg.effective_k_cap())
        .output(&a.out);
    manifest.seed = Some(a.seed);
    if let Some(d) = &a.degrees {
        manifest = manifest.input(d);
    }
    write_sidecar(&a.out, &manifest)?;

    summary(json!({
        "n_vertices": g.vertex_count(),
        "n_edges": g.edge_count(),
        "max_in_degree": g.max_in_degree(),
        "scale_a": out.assignment.scale_a,
    }));
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let alpha = a.alpha.resolve()?;
    let g = load_graph(&a.input, a.strict)?;
    let profile = balance_profile(&g, alpha);
    if profile.positivity.is_none() {
        eprintln!("warning: positivity undefined (needs N > 2 and at least one finite-ratio edge)");
    }
    let manifest = RunManifest::new("analyze")
        .param("alpha", alpha.value())
        .param("format", format!("{:?}", a.format).to_lowercase())
        .param("strict", a.strict)
        .input(&a.input)
        .output(&a.out);
    match a.format {
        Format::Json => write_json(&a.out, &ProfileDocument::new(&profile, Some(manifest.clone())))?,
        Format::Csv => {
            let mut w = create(&a.out)?;
            write_profile_csv(&profile, &mut w, &a.out)?;
            w.flush().map_err(|e| Error::io(&a.out, e))?;
        }
    }
    write_sidecar(&a.out, &manifest)?;
    summary(json!({
        "n_vertices": profile.n_vertices,
        "n_edges": profile.n_edges,
        "positivity": profile.positivity,
        "infinite_edges": profile.infinite_count,
    }));
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let alpha = a.alpha.resolve()?;
    let bounds = a.bounds.resolve()?;
    let params = TheoryParams::new(a.scale_a, a.gamma, a.nodes, alpha)?;
    let theory = theorem1_profile_with(&params, bounds)?;
    let manifest = RunManifest::new("predict")
        .param("gamma", a.gamma)
        .param("scale_a", a.scale_a)
        .param("nodes", a.nodes)
        .param("alpha", alpha.value())
        .param("r_lo", bounds.r_lo)
        .param("r_hi", bounds.r_hi)
        .output(&a.out);
    write_json(&a.out, &TheoryDocument::new(&theory, Some(manifest.clone())))?;
    write_sidecar(&a.out, &manifest)?;
    summary(json!({
        "sections": theory.sections.iter().map(|l| json!({
            "label": l.section,
            "exponent": l.exponent,
            "coefficient": l.coefficient,
        })).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let bounds = a.bounds.resolve()?;
    let empirical: ProfileTable = read_profile(&a.empirical)?;
    let mut manifest = RunManifest::new("compare")
        .param("tolerance", a.tolerance)
        .param("r_lo", bounds.r_lo)
        .param("r_hi", bounds.r_hi)
        .input(&a.empirical);

    let (report, reference, estimate) = if let Some(edges) = &a.auto {
        let g = load_graph(edges, false)?;
        let hist = in_degree_histogram(&g);
        let method: GammaMethod = a.method.into();
        let est = estimate_gamma(&hist, method, a.k_min)?;
        let scale = estimate_scale_a(&hist, est.gamma, a.k_min)?;
        eprintln!("estimated gamma {:.4} (se {:.4}), A {:.1}", est.gamma, est.std_error, scale);
        let params = TheoryParams::new(scale, est.gamma, g.vertex_count() as u64, empirical.alpha)?;
        let theory = theorem1_profile_with(&params, bounds)?;
        manifest = manifest
            .param("method", format!("{method:?}").to_lowercase())
            .param("k_min", a.k_min)
            .input(edges);
        let row = EstimateRow {
            gamma: est,
            scale_a: scale,
            n_vertices: params.n_vertices,
        };
        (compare_profiles(&empirical, &theory, a.tolerance)?, ReferenceKind::Theory, Some(row))
    } else {
        let path = a.theory.as_ref().expect("clap enforces --theory or --auto");
        manifest = manifest.input(path);
        match read_document(path)? {
            Document::Theory(doc) => {
                let mut theory = doc.to_theory(path)?;
                theory.boundaries = bounds;
                (compare_profiles(&empirical, &theory, a.tolerance)?, ReferenceKind::Theory, None)
            }
            Document::Profile(doc) => {
                let reference = ProfileTable::from(&doc.to_profile());
                (compare_fits(&empirical, &reference, &bounds, a.tolerance)?, ReferenceKind::Profile, None)
            }
            Document::Comparison(_) => {
                return Err(Error::Document {
                    path: path.clone(),
                    reason: "expected a theory or profile document, found a comparison".into(),
                })
            }
        }
    };
    manifest = manifest.output(&a.out);
    let doc = ComparisonDocument::new(&report, reference, estimate, Some(manifest.clone()));
    write_json(&a.out, &doc)?;
    write_sidecar(&a.out, &manifest)?;
    summary(json!({
        "sections": report.sections.iter().map(|s| json!({
            "label": s.label,
            "fitted_slope": s.fitted_slope,
            "delta": s.delta,
            "verdict": s.verdict,
        })).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn cmd_slice(a: &SliceArgs) -> Result<()> {
    let g = load_graph(&a.input, false)?;
    let k = match (a.k, a.top_percent) {
        (Some(k), _) => k,
        (None, Some(p)) => degree_at_top_percent(&g, p)?,
        (None, None) => unreachable!("clap enforces --k or --top-percent"),
    };
    let slice = degree_slice(&g, k);
    let mut w = create(&a.out)?;
    write_slice_csv(&slice, &mut w, &a.out)?;
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let manifest = RunManifest::new("slice")
        .param("k", k)
        .param("top_percent", a.top_percent)
        .input(&a.input)
        .output(&a.out);
    write_sidecar(&a.out, &manifest)?;
    summary(json!({
        "k": k,
        "vertices": slice.vertices,
        "in_edges": slice.in_edges.len(),
        "out_edges": slice.out_edges.len(),
    }));
    Ok(())
}

fn cmd_degrees(a: &DegreesArgs) -> Result<()> {
    let g = load_graph(&a.input, false)?;
    let hist = in_degree_histogram(&g);
    let mut w = create(&a.out)?;
    write_degrees_csv(&hist, &mut w, &a.out)?;
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let manifest = RunManifest::new("degrees").input(&a.input).output(&a.out);
    write_sidecar(&a.out, &manifest)?;
    summary(json!({
        "n_vertices": hist.n_vertices(),
        "distinct_degrees": hist.distinct_degrees(),
        "max_in_degree": hist.max_degree(),
    }));
    Ok(())
}
