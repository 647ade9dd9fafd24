//! Output documents: JSON with an embedded run manifest, flat CSV tables,
//! and `.manifest` sidecars.
//!
//! Field order is fixed by the struct definitions below and floats are
//! written in shortest round-trip form, so equal inputs give equal bytes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::binning::Alpha;
use crate::error::{Error, Result};
use crate::graph::InDegreeHistogram;
use crate::metrics::{BalanceProfile, DegreeSlice, ProfileBin};
use crate::theory::{
    BinResidual, BinnedSeries, ComparisonReport, FitBoundaries, GammaEstimate, PredictedBin,
    Section, SectionComparison, SectionLaw, TheoreticalProfile, TheoryParams, TheoryPoint, Verdict,
};

pub const TOOL_NAME: &str = "balance-lens";

/// Resolved parameters of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            params: BTreeMap::new(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("parameter values serialise");
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

pub fn write_sidecar(output: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = sidecar_path(output);
    write_json(&path, manifest)?;
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub s: i32,
    pub r_low: f64,
    pub r_high: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub kind: String,
    pub n_vertices: u64,
    pub n_edges: u64,
    pub alpha: Alpha,
    pub bins: Vec<BinRow>,
    pub infinite_edges: u64,
    pub positivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

pub const PROFILE_KIND: &str = "balance-profile";
pub const THEORY_KIND: &str = "theoretical-profile";
pub const COMPARISON_KIND: &str = "comparison";

impl ProfileDocument {
    pub fn new(p: &BalanceProfile, manifest: Option<RunManifest>) -> Self {
        ProfileDocument {
            kind: PROFILE_KIND.into(),
            n_vertices: p.n_vertices,
            n_edges: p.n_edges,
            alpha: p.alpha,
            bins: p
                .bins
                .iter()
                .map(|b| BinRow {
                    s: b.s,
                    r_low: p.alpha.lower_edge(b.s),
                    r_high: p.alpha.upper_edge(b.s),
                    count: b.count,
                })
                .collect(),
            infinite_edges: p.infinite_count,
            positivity: p.positivity,
            manifest,
        }
    }

    pub fn to_profile(&self) -> BalanceProfile {
        BalanceProfile {
            alpha: self.alpha,
            bins: self
                .bins
                .iter()
                .map(|b| ProfileBin {
                    s: b.s,
                    count: b.count,
                })
                .collect(),
            infinite_count: self.infinite_edges,
            n_vertices: self.n_vertices,
            n_edges: self.n_edges,
            positivity: self.positivity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsRow {
    pub scale_a: f64,
    pub gamma: f64,
    pub n_vertices: u64,
    pub alpha: Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedRow {
    pub s: i32,
    pub r_low: f64,
    pub r_high: f64,
    pub section: Section,
    pub predicted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub label: Section,
    pub exponent: f64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryDocument {
    pub kind: String,
    pub params: ParamsRow,
    pub boundaries: FitBoundaries,
    pub sections: Vec<LawRow>,
    pub points: Vec<TheoryPoint>,
    pub bins: Vec<PredictedRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl TheoryDocument {
    pub fn new(t: &TheoreticalProfile, manifest: Option<RunManifest>) -> Self {
        let a = t.params.alpha;
        TheoryDocument {
            kind: THEORY_KIND.into(),
            params: ParamsRow {
                scale_a: t.params.scale_a,
                gamma: t.params.gamma,
                n_vertices: t.params.n_vertices,
                alpha: a,
            },
            boundaries: t.boundaries,
            sections: t
                .sections
                .iter()
                .map(|l| LawRow {
                    label: l.section,
                    exponent: l.exponent,
                    coefficient: l.coefficient,
                })
                .collect(),
            points: t.points.clone(),
            bins: t
                .bins
                .iter()
                .map(|b| PredictedRow {
                    s: b.s,
                    r_low: a.lower_edge(b.s),
                    r_high: a.upper_edge(b.s),
                    section: b.section,
                    predicted: b.predicted,
                })
                .collect(),
            manifest,
        }
    }

    pub fn to_theory(&self, path: &Path) -> Result<TheoreticalProfile> {
        let bad = |reason: String| Error::Document {
            path: path.to_path_buf(),
            reason,
        };
        let params = TheoryParams::new(
            self.params.scale_a,
            self.params.gamma,
            self.params.n_vertices,
            self.params.alpha,
        )
        .map_err(|e| bad(e.to_string()))?;
        let laws: Vec<SectionLaw> = self
            .sections
            .iter()
            .map(|r| SectionLaw {
                section: r.label,
                exponent: r.exponent,
                coefficient: r.coefficient,
            })
            .collect();
        let sections: [SectionLaw; 4] = laws
            .try_into()
            .map_err(|v: Vec<SectionLaw>| bad(format!("expected 4 sections, found {}", v.len())))?;
        if sections.iter().map(|l| l.section).ne(Section::ALL) {
            return Err(bad("sections out of order".into()));
        }
        Ok(TheoreticalProfile {
            params,
            boundaries: self.boundaries,
            sections,
            points: self.points.clone(),
            bins: self
                .bins
                .iter()
                .map(|b| PredictedBin {
                    s: b.s,
                    section: b.section,
                    predicted: b.predicted,
                })
                .collect(),
        })
    }
}

/// How the reference slopes of a comparison were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Theory,
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRow {
    pub label: Section,
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    pub fitted_slope: Option<f64>,
    pub delta: Option<f64>,
    pub intercept_delta: Option<f64>,
    pub n_points: usize,
    pub verdict: Verdict,
}

impl From<&SectionComparison> for SectionRow {
    fn from(c: &SectionComparison) -> Self {
        SectionRow {
            label: c.label,
            exponent: c.exponent,
            coefficient: c.coefficient,
            fitted_slope: c.fitted_slope,
            delta: c.delta,
            intercept_delta: c.intercept_delta,
            n_points: c.n_points,
            verdict: c.verdict,
        }
    }
}

impl From<&SectionRow> for SectionComparison {
    fn from(r: &SectionRow) -> Self {
        SectionComparison {
            label: r.label,
            exponent: r.exponent,
            coefficient: r.coefficient,
            fitted_slope: r.fitted_slope,
            delta: r.delta,
            intercept_delta: r.intercept_delta,
            n_points: r.n_points,
            verdict: r.verdict,
        }
    }
}

/// Estimated parameters behind a synthesised theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub gamma: GammaEstimate,
    pub scale_a: f64,
    pub n_vertices: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDocument {
    pub kind: String,
    pub reference: ReferenceKind,
    pub alpha: Alpha,
    pub boundaries: FitBoundaries,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateRow>,
    pub sections: Vec<SectionRow>,
    pub residuals: Vec<BinResidual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl ComparisonDocument {
    pub fn new(
        report: &ComparisonReport,
        reference: ReferenceKind,
        estimate: Option<EstimateRow>,
        manifest: Option<RunManifest>,
    ) -> Self {
        ComparisonDocument {
            kind: COMPARISON_KIND.into(),
            reference,
            alpha: report.alpha,
            boundaries: report.boundaries,
            tolerance: report.tolerance,
            estimate,
            sections: report.sections.iter().map(SectionRow::from).collect(),
            residuals: report.residuals.clone(),
            manifest,
        }
    }

    pub fn to_report(&self) -> ComparisonReport {
        ComparisonReport {
            alpha: self.alpha,
            boundaries: self.boundaries,
            tolerance: self.tolerance,
            sections: self.sections.iter().map(SectionComparison::from).collect(),
            residuals: self.residuals.clone(),
        }
    }
}

/// Any JSON document this crate writes.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Profile(ProfileDocument),
    Theory(TheoryDocument),
    Comparison(ComparisonDocument),
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, doc: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, doc)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

fn read_to_string(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut s = String::new();
    BufReader::new(file)
        .read_to_string(&mut s)
        .map_err(|e| Error::io(path, e))?;
    Ok(s)
}

/// Parses a JSON document, dispatching on its `kind` field.
pub fn read_document(path: &Path) -> Result<Document> {
    let text = read_to_string(path)?;
    parse_document(&text, path)
}

pub fn parse_document(text: &str, path: &Path) -> Result<Document> {
    let bad = |reason: String| Error::Document {
        path: path.to_path_buf(),
        reason,
    };
    let value: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing \"kind\" field".into()))?
        .to_string();
    let de = |e: serde_json::Error| bad(e.to_string());
    match kind.as_str() {
        PROFILE_KIND => Ok(Document::Profile(serde_json::from_value(value).map_err(de)?)),
        THEORY_KIND => Ok(Document::Theory(serde_json::from_value(value).map_err(de)?)),
        COMPARISON_KIND => Ok(Document::Comparison(serde_json::from_value(value).map_err(de)?)),
        other => Err(bad(format!("unknown document kind {other:?}"))),
    }
}

/// Reads a profile from either JSON or the flat CSV table.
pub fn read_profile(path: &Path) -> Result<ProfileTable> {
    let text = read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        match parse_document(&text, path)? {
            Document::Profile(d) => Ok(ProfileTable::from(&d.to_profile())),
            _ => Err(Error::Document {
                path: path.to_path_buf(),
                reason: "expected a balance-profile document".into(),
            }),
        }
    } else {
        parse_profile_csv(text.as_bytes(), path)
    }
}

/// Binned counts as carried by the CSV form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub alpha: Alpha,
    pub bins: Vec<BinRow>,
}

impl From<&BalanceProfile> for ProfileTable {
    fn from(p: &BalanceProfile) -> Self {
        ProfileTable {
            alpha: p.alpha,
            bins: ProfileDocument::new(p, None).bins,
        }
    }
}

impl BinnedSeries for ProfileTable {
    fn alpha(&self) -> Alpha {
        self.alpha
    }

    fn values(&self) -> Vec<(i32, f64)> {
        self.bins.iter().map(|b| (b.s, b.count as f64)).collect()
    }
}

pub const PROFILE_CSV_HEADER: [&str; 4] = ["s", "r_low", "r_high", "count"];
pub const DEGREES_CSV_HEADER: [&str; 2] = ["k", "n_k"];
pub const SLICE_CSV_HEADER: [&str; 4] = ["direction", "source_d_i", "target_d_i", "ratio"];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Document {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

pub fn write_profile_csv<W: Write>(p: &BalanceProfile, out: W, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(PROFILE_CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for row in ProfileDocument::new(p, None).bins {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_profile_csv<R: Read>(input: R, path: &Path) -> Result<ProfileTable> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(PROFILE_CSV_HEADER) {
        return Err(Error::Document {
            path: path.to_path_buf(),
            reason: format!("unexpected profile header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut bins = Vec::new();
    for row in r.deserialize::<BinRow>() {
        bins.push(row.map_err(|e| csv_err(path, e))?);
    }
    let bad = |reason: &str| Error::Document {
        path: path.to_path_buf(),
        reason: reason.into(),
    };
    let first = bins.first().ok_or_else(|| bad("profile table has no rows"))?;
    let alpha = Alpha::new(first.r_high / first.r_low).map_err(|e| bad(&e.to_string()))?;
    if !bins.iter().all(|b| (alpha.lower_edge(b.s) - b.r_low).abs() <= 1e-9 * b.r_low) {
        return Err(bad("bin edges are not powers of a single alpha"));
    }
    Ok(ProfileTable { alpha, bins })
}

pub fn write_degrees_csv<W: Write>(h: &InDegreeHistogram, out: W, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DEGREES_CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for (k, c) in h.iter() {
        w.write_record([k.to_string(), c.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_degrees_csv<R: Read>(input: R, path: &Path) -> Result<InDegreeHistogram> {
    let mut r = csv::Reader::from_reader(input);
    let mut pairs = Vec::new();
    for row in r.deserialize::<(u64, u64)>() {
        pairs.push(row.map_err(|e| csv_err(path, e))?);
    }
    Ok(InDegreeHistogram::from_counts(pairs))
}

/// Rows `(direction, source in-degree, target in-degree, ratio)`; in-edges
/// first, then out-edges, each in edge storage order.
pub fn write_slice_csv<W: Write>(slice: &DegreeSlice, out: W, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SLICE_CSV_HEADER).map_err(|e| csv_err(path, e))?;
    let rows = slice
        .in_edges
        .iter()
        .map(|r| ("in", r))
        .chain(slice.out_edges.iter().map(|r| ("out", r)));
    for (dir, rec) in rows {
        w.write_record([
            dir.to_string(),
            rec.ratio.source_in.to_string(),
            rec.ratio.target_in.to_string(),
            rec.ratio.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
