//! Power-law network models with controlled in-degree.
//!
//! Degree assignment and edge realization are picked independently:
//!
//! | assignment \ realization | exact sources | Bernoulli sources |
//! |--------------------------|---------------|-------------------|
//! | exact counts `A·k^-γ`    | deterministic | type II           |
//! | i.i.d. draws `∝ k^-γ`    | type I        | type III          |
//!
//! Every vertex draws from its own ChaCha stream keyed by `(seed, phase,
//! vertex)`, so output does not depend on the number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Deterministic,
    TypeI,
    TypeII,
    TypeIII,
    /// Caller-supplied target in-degree per vertex, realized exactly.
    Sequence(Vec<u64>),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Deterministic => "deterministic",
            Model::TypeI => "type1",
            Model::TypeII => "type2",
            Model::TypeIII => "type3",
            Model::Sequence(_) => "sequence",
        }
    }

    fn exact_counts(&self) -> bool {
        matches!(self, Model::Deterministic | Model::TypeII)
    }

    fn bernoulli_sources(&self) -> bool {
        matches!(self, Model::TypeII | Model::TypeIII)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "deterministic" | "det" => Model::Deterministic,
            "type1" | "type-i" | "i" => Model::TypeI,
            "type2" | "type-ii" | "ii" => Model::TypeII,
            "type3" | "type-iii" | "iii" => Model::TypeIII,
            other => {
                return Err(Error::Config(format!(
                    "unknown model {other:?} (expected deterministic, type1, type2, type3)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub model: Model,
    pub n_vertices: usize,
    pub gamma: f64,
    pub seed: u64,
    /// Largest admissible in-degree; `None` means `N − 1`.
    pub k_cap: Option<u64>,
}

impl GeneratorConfig {
    pub fn new(model: Model, n_vertices: usize, gamma: f64, seed: u64) -> Self {
        GeneratorConfig {
            model,
            n_vertices,
            gamma,
            seed,
            k_cap: None,
        }
    }

    pub fn with_k_cap(mut self, k_cap: u64) -> Self {
        self.k_cap = Some(k_cap);
        self
    }

    pub fn effective_k_cap(&self) -> u64 {
        self.k_cap.unwrap_or(self.n_vertices.saturating_sub(1) as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if let Model::Sequence(seq) = &self.model {
            if seq.len() < 2 {
                return Err(Error::Config("degree sequence needs at least 2 vertices".into()));
            }
            if seq.len() != self.n_vertices {
                return Err(Error::Config(format!(
                    "degree sequence has {} entries but n_vertices is {}",
                    seq.len(),
                    self.n_vertices
                )));
            }
            return Ok(());
        }
        if self.n_vertices < 2 {
            return Err(Error::Config(format!(
                "need at least 2 vertices, got {}",
                self.n_vertices
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::Config(format!(
                "scaling exponent gamma must be > 1, got {}",
                self.gamma
            )));
        }
        let cap = self.effective_k_cap();
        if cap < 1 || cap > self.n_vertices as u64 - 1 {
            return Err(Error::Config(format!(
                "k_cap must be in [1, N-1] = [1, {}], got {cap}",
                self.n_vertices - 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeAssignment {
    pub target_in_degree: Vec<u64>,
    /// Realized power-law scale `A`.
    pub scale_a: f64,
}

impl DegreeAssignment {
    pub fn from_sequence(target_in_degree: Vec<u64>) -> Self {
        DegreeAssignment {
            target_in_degree,
            scale_a: f64::NAN,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.target_in_degree.len()
    }
}

// stream domains
const PHASE_SHUFFLE: u64 = 0x5348_5546;
const PHASE_DEGREE: u64 = 0x4445_4752;
const PHASE_SOURCES: u64 = 0x534f_5552;

fn vertex_rng(seed: u64, phase: u64, vertex: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ phase.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(vertex);
    rng
}

/// `round(A·k^-γ)` for `k = 1..=k_cap` while the rounded value is ≥ 1.
fn rounded_counts(scale: f64, gamma: f64, k_cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for k in 1..=k_cap {
        let c = (scale * (k as f64).powf(-gamma)).round();
        if c < 1.0 {
            break;
        }
        out.push(c as u64);
    }
    out
}

/// Condition 1: exactly `round(A·k^-γ)` vertices of in-degree `k`.
///
/// `A` is the largest scale whose rounded counts do not exceed `N`; vertices
/// left over by rounding get in-degree 1. Degrees are shuffled over vertex
/// ids with the config seed.
pub fn assign_degrees_deterministic(cfg: &GeneratorConfig) -> Result<DegreeAssignment> {
    cfg.validate()?;
    let n = cfg.n_vertices as u64;
    let k_cap = cfg.effective_k_cap();
    let total = |a: f64| -> u64 { rounded_counts(a, cfg.gamma, k_cap).iter().sum() };

    let mut lo = 0.0f64;
    let mut hi = n as f64;
    while total(hi) <= n {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut counts = rounded_counts(lo, cfg.gamma, k_cap);
    let residual = n - counts.iter().sum::<u64>();
    if counts.is_empty() {
        counts.push(0);
    }
    counts[0] += residual;

    let mut degrees = Vec::with_capacity(cfg.n_vertices);
    for (i, &c) in counts.iter().enumerate() {
        degrees.extend(std::iter::repeat_n(i as u64 + 1, c as usize));
    }
    degrees.shuffle(&mut vertex_rng(cfg.seed, PHASE_SHUFFLE, 0));
    Ok(DegreeAssignment {
        target_in_degree: degrees,
        scale_a: lo,
    })
}

/// Condition 1′: each vertex draws `k ∈ [1, k_cap]` with probability
/// `k^-γ / Σ_j j^-γ`, by inverse CDF over the cumulative weights.
pub fn assign_degrees_stochastic(cfg: &GeneratorConfig) -> Result<DegreeAssignment> {
    cfg.validate()?;
    let k_cap = cfg.effective_k_cap();
    let mut cumulative = Vec::with_capacity(k_cap as usize);
    let mut acc = 0.0f64;
    for k in 1..=k_cap {
        acc += (k as f64).powf(-cfg.gamma);
        cumulative.push(acc);
    }
    let z = acc;
    let degrees = (0..cfg.n_vertices as u64)
        .into_par_iter()
        .map(|v| {
            let u: f64 = vertex_rng(cfg.seed, PHASE_DEGREE, v).random::<f64>() * z;
            let idx = cumulative.partition_point(|&c| c <= u);
            idx.min(cumulative.len() - 1) as u64 + 1
        })
        .collect();
    Ok(DegreeAssignment {
        target_in_degree: degrees,
        scale_a: cfg.n_vertices as f64 / z,
    })
}

/// `count` distinct sources for `target`, uniform over the other vertices.
fn sample_sources(rng: &mut ChaCha8Rng, n: usize, target: usize, count: usize) -> Vec<VertexId> {
    index::sample(rng, n - 1, count)
        .into_iter()
        .map(|i| VertexId(if i >= target { i + 1 } else { i } as u64))
        .collect()
}

fn check_targets(assign: &DegreeAssignment, max: u64) -> Result<()> {
    if let Some((v, &d)) = assign
        .target_in_degree
        .iter()
        .enumerate()
        .find(|(_, &d)| d > max)
    {
        return Err(Error::Config(format!(
            "vertex {v} has target in-degree {d}, more than the {max} allowed"
        )));
    }
    Ok(())
}

fn realize(
    assign: &DegreeAssignment,
    seed: u64,
    draw_count: impl Fn(&mut ChaCha8Rng, u64) -> u64 + Sync,
) -> DirectedGraph {
    let n = assign.n_vertices();
    let per_target: Vec<Vec<(VertexId, VertexId)>> = assign
        .target_in_degree
        .par_iter()
        .enumerate()
        .map(|(v, &k)| {
            if k == 0 {
                return Vec::new();
            }
            let mut rng = vertex_rng(seed, PHASE_SOURCES, v as u64);
            let count = draw_count(&mut rng, k) as usize;
            sample_sources(&mut rng, n, v, count)
                .into_iter()
                .map(|s| (s, VertexId(v as u64)))
                .collect()
        })
        .collect();
    DirectedGraph::from_simple_edges(n, per_target.into_iter().flatten().collect())
}

/// Condition 2: vertex `v` gets exactly `target_in_degree[v]` distinct
/// followers.
pub fn realize_edges_exact(assign: &DegreeAssignment, seed: u64) -> Result<DirectedGraph> {
    let n = assign.n_vertices();
    check_targets(assign, n.saturating_sub(1) as u64)?;
    Ok(realize(assign, seed, |_, k| k))
}

/// Condition 2′: every other vertex follows `v` independently with
/// probability `target_in_degree[v] / N`. The follower count is drawn from
/// `Binomial(N − 1, k/N)` and that many distinct sources are sampled.
pub fn realize_edges_bernoulli(assign: &DegreeAssignment, seed: u64) -> Result<DirectedGraph> {
    let n = assign.n_vertices();
    check_targets(assign, n as u64)?;
    Ok(realize(assign, seed, |rng, k| {
        let p = k as f64 / n as f64;
        if p >= 1.0 {
            return (n - 1) as u64;
        }
        Binomial::new((n - 1) as u64, p)
            .expect("probability in [0, 1)")
            .sample(rng)
    }))
}

pub struct Generated {
    pub graph: DirectedGraph,
    pub assignment: DegreeAssignment,
}

pub fn generate(cfg: &GeneratorConfig) -> Result<Generated> {
    cfg.validate()?;
    let assignment = match &cfg.model {
        Model::Sequence(seq) => DegreeAssignment::from_sequence(seq.clone()),
        m if m.exact_counts() => assign_degrees_deterministic(cfg)?,
        _ => assign_degrees_stochastic(cfg)?,
    };
    let graph = if cfg.model.bernoulli_sources() {
        realize_edges_bernoulli(&assignment, cfg.seed)?
    } else {
        realize_edges_exact(&assignment, cfg.seed)?
    };
    Ok(Generated { graph, assignment })
}
