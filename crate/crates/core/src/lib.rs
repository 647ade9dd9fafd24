//! Edge balance ratio analytics for directed graphs.
//!
//! For an edge `A → B` the balance ratio is `d_in(B) / d_in(A)`. The
//! crate bins these ratios on a logarithmic scale, summarises them as a
//! single positivity score, generates power-law test networks, and
//! predicts the binned profile of such networks in closed form.

pub mod binning;
pub mod cli;
pub mod error;
pub mod generator;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod theory;

pub use binning::{Alpha, DEFAULT_ALPHA};
pub use error::{Error, Result};
pub use graph::{build_graph, in_degree_histogram, DirectedGraph, InDegreeHistogram, VertexId};
pub use metrics::{balance_profile, positivity, BalanceProfile};
