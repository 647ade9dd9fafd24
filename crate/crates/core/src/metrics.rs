//! Edge balance ratios and whole-network balance statistics.
//!
//! For an edge `A → B` the balance ratio is `d_i(B) / d_i(A)`, infinite when
//! the source has no followers. The balance profile tallies finite ratios in
//! logarithmic bins; the positivity is the mean log-ratio over finite edges
//! normalised by `log(N − 1)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::Alpha;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId};

const PAR_CHUNK: usize = 1 << 16;

/// `d_i(target) / d_i(source)` kept as the integer pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalanceRatio {
    pub target_in: u64,
    pub source_in: u64,
}

impl BalanceRatio {
    pub fn new(target_in: u64, source_in: u64) -> Self {
        BalanceRatio {
            target_in,
            source_in,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.source_in == 0
    }

    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.target_in as f64 / self.source_in as f64
        }
    }

    /// Natural log of the ratio, `None` when infinite.
    pub fn ln(&self) -> Option<f64> {
        (!self.is_infinite()).then(|| (self.target_in as f64).ln() - (self.source_in as f64).ln())
    }
}

impl fmt::Display for BalanceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.value())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBalanceRecord {
    pub source: VertexId,
    pub target: VertexId,
    pub ratio: BalanceRatio,
}

#[inline]
fn ratio_of(g: &DirectedGraph, source: VertexId, target: VertexId) -> BalanceRatio {
    BalanceRatio::new(g.in_degree(target), g.in_degree(source))
}

pub fn edge_balance_ratio(
    g: &DirectedGraph,
    source: VertexId,
    target: VertexId,
) -> Result<EdgeBalanceRecord> {
    if source.index() >= g.vertex_count() || !g.contains_edge(source, target) {
        return Err(Error::NoSuchEdge(source.0, target.0));
    }
    Ok(EdgeBalanceRecord {
        source,
        target,
        ratio: ratio_of(g, source, target),
    })
}

pub fn edge_balance_records(g: &DirectedGraph) -> impl Iterator<Item = EdgeBalanceRecord> + '_ {
    g.edges().iter().map(move |&(s, t)| EdgeBalanceRecord {
        source: s,
        target: t,
        ratio: ratio_of(g, s, t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileBin {
    pub s: i32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceProfile {
    pub alpha: Alpha,
    /// Non-empty bins in ascending `s`.
    pub bins: Vec<ProfileBin>,
    pub infinite_count: u64,
    pub n_vertices: u64,
    pub n_edges: u64,
    /// `None` when undefined (no finite edge, or `N ≤ 2`).
    pub positivity: Option<f64>,
}

impl BalanceProfile {
    pub fn count(&self, s: i32) -> u64 {
        self.bins
            .binary_search_by_key(&s, |b| b.s)
            .map(|i| self.bins[i].count)
            .unwrap_or(0)
    }

    pub fn finite_count(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Per-degree tallies that are enough to rebuild every statistic here.
/// Integer-only, so partial tallies merge in any order to the same result.
#[derive(Debug, Clone, Default)]
struct EdgeTally {
    bins: BTreeMap<i32, u64>,
    infinite: u64,
    /// finite edges by target degree, and by source degree
    target_hist: BTreeMap<u64, u64>,
    source_hist: BTreeMap<u64, u64>,
}

impl EdgeTally {
    fn merge(mut self, other: EdgeTally) -> EdgeTally {
        for (k, v) in other.bins {
            *self.bins.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.target_hist {
            *self.target_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.source_hist {
            *self.source_hist.entry(k).or_insert(0) += v;
        }
        self.infinite += other.infinite;
        self
    }
}

fn log_table(g: &DirectedGraph) -> Vec<f64> {
    (0..=g.max_in_degree()).map(|d| (d as f64).ln()).collect()
}

fn tally(g: &DirectedGraph, alpha: &Alpha) -> EdgeTally {
    let logs = log_table(g);
    let degrees = g.in_degrees();
    g.edges()
        .par_chunks(PAR_CHUNK)
        .map(|chunk| {
            let mut t = EdgeTally::default();
            let mut dense: BTreeMap<(u64, u64), u64> = BTreeMap::new();
            for &(s, v) in chunk {
                let m = degrees[s.index()];
                if m == 0 {
                    t.infinite += 1;
                    continue;
                }
                *dense.entry((degrees[v.index()], m)).or_insert(0) += 1;
            }
            for ((k, m), c) in dense {
                let s = alpha.bin_of_logs(logs[k as usize], logs[m as usize], k, m);
                *t.bins.entry(s).or_insert(0) += c;
                *t.target_hist.entry(k).or_insert(0) += c;
                *t.source_hist.entry(m).or_insert(0) += c;
            }
            t
        })
        .reduce(EdgeTally::default, EdgeTally::merge)
}

fn positivity_from(
    tally: &EdgeTally,
    n_vertices: u64,
    log: impl Fn(f64) -> f64,
) -> Result<f64> {
    if n_vertices <= 2 {
        return Err(Error::UndefinedPositivity(format!(
            "need N >= 3 for log(N-1) > 0, graph has {n_vertices} vertices"
        )));
    }
    let finite: u64 = tally.target_hist.values().sum();
    if finite == 0 {
        return Err(Error::UndefinedPositivity(
            "graph has no edge with a finite balance ratio".into(),
        ));
    }
    // Σ ln d_i(B) − Σ ln d_i(A) taken per degree with integer weights.
    // Bi-directed graphs have equal histograms, hence exactly zero.
    let mut weights: BTreeMap<u64, i128> = BTreeMap::new();
    for (&k, &c) in &tally.target_hist {
        *weights.entry(k).or_insert(0) += c as i128;
    }
    for (&k, &c) in &tally.source_hist {
        *weights.entry(k).or_insert(0) -= c as i128;
    }
    let sum: f64 = weights
        .iter()
        .filter(|(_, &w)| w != 0)
        .map(|(&k, &w)| w as f64 * log(k as f64))
        .sum();
    let p = sum / (finite as f64 * log((n_vertices - 1) as f64));
    Ok(p.clamp(-1.0, 1.0))
}

pub fn balance_profile(g: &DirectedGraph, alpha: Alpha) -> BalanceProfile {
    let t = tally(g, &alpha);
    let n_vertices = g.vertex_count() as u64;
    let positivity = positivity_from(&t, n_vertices, f64::ln).ok();
    BalanceProfile {
        alpha,
        bins: t
            .bins
            .iter()
            .map(|(&s, &count)| ProfileBin { s, count })
            .collect(),
        infinite_count: t.infinite,
        n_vertices,
        n_edges: g.edge_count() as u64,
        positivity,
    }
}

pub fn positivity(g: &DirectedGraph) -> Result<f64> {
    positivity_with_log(g, f64::ln)
}

/// Positivity computed with an arbitrary logarithm. The base cancels; this
/// exists so that can be checked.
pub fn positivity_with_log(g: &DirectedGraph, log: impl Fn(f64) -> f64) -> Result<f64> {
    // the bin layout is irrelevant here
    let t = tally(g, &Alpha::default());
    positivity_from(&t, g.vertex_count() as u64, log)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DegreeSlice {
    pub k: u64,
    pub vertices: u64,
    /// Edges pointing to a vertex of in-degree `k`.
    pub in_edges: Vec<EdgeBalanceRecord>,
    /// Edges leaving a vertex of in-degree `k`.
    pub out_edges: Vec<EdgeBalanceRecord>,
}

impl DegreeSlice {
    pub fn in_edge_ratios(&self) -> impl Iterator<Item = BalanceRatio> + '_ {
        self.in_edges.iter().map(|r| r.ratio)
    }

    pub fn out_edge_ratios(&self) -> impl Iterator<Item = BalanceRatio> + '_ {
        self.out_edges.iter().map(|r| r.ratio)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices == 0
    }
}

pub fn degree_slice(g: &DirectedGraph, k: u64) -> DegreeSlice {
    let mut slice = DegreeSlice {
        k,
        vertices: g.in_degrees().iter().filter(|&&d| d == k).count() as u64,
        ..Default::default()
    };
    if slice.vertices == 0 {
        return slice;
    }
    for rec in edge_balance_records(g) {
        if rec.ratio.target_in == k {
            slice.in_edges.push(rec);
        }
        if rec.ratio.source_in == k {
            slice.out_edges.push(rec);
        }
    }
    slice
}

/// In-degree of the vertex ranked at the top `percent` of vertices by
/// descending in-degree. `100` yields the minimum in-degree.
pub fn degree_at_top_percent(g: &DirectedGraph, percent: f64) -> Result<u64> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::Parameter(format!(
            "percentile must be in (0, 100], got {percent}"
        )));
    }
    if g.vertex_count() == 0 {
        return Err(Error::Parameter("graph has no vertices".into()));
    }
    let mut degrees = g.in_degrees().to_vec();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let n = degrees.len();
    let rank = ((percent / 100.0) * n as f64).ceil() as usize;
    Ok(degrees[rank.clamp(1, n) - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinDegreeMeans {
    pub s: i32,
    pub edges: u64,
    /// Mean in-degree of the targets (in-vertices).
    pub mean_target_in: f64,
    /// Mean in-degree of the sources (out-vertices).
    pub mean_source_in: f64,
}

pub fn bin_average_degrees(g: &DirectedGraph, alpha: Alpha) -> Vec<BinDegreeMeans> {
    let degrees = g.in_degrees();
    let mut acc: BTreeMap<i32, (u64, u128, u128)> = BTreeMap::new();
    for &(s, v) in g.edges() {
        let m = degrees[s.index()];
        if m == 0 {
            continue;
        }
        let k = degrees[v.index()];
        let e = acc.entry(alpha.bin_of_ratio(k, m)).or_insert((0, 0, 0));
        e.0 += 1;
        e.1 += k as u128;
        e.2 += m as u128;
    }
    acc.into_iter()
        .map(|(s, (n, sum_t, sum_m))| BinDegreeMeans {
            s,
            edges: n,
            mean_target_in: sum_t as f64 / n as f64,
            mean_source_in: sum_m as f64 / n as f64,
        })
        .collect()
}
