//! Node centrality on collaboration graphs.
//!
//! * [`betweenness`]: Brandes accumulation over every source, with hop-count
//!   or `1 / weight` path lengths, optionally scaled by `2 / ((n-1)(n-2))`.
//! * [`pagerank`]: damped power iteration on the undirected graph read as
//!   two directed links per edge; mass held by isolated nodes is spread
//!   uniformly.
//!
//! Both are generic over [`Scalar`]; see the crate-root aliases for the
//! `f64` instantiations.

mod betweenness;
mod pagerank;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use betweenness::{betweenness, BetweennessParams};
pub use pagerank::{pagerank, pagerank_observed, PageRankParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CentralityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Betweenness,
    PageRank,
}

impl CentralityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CentralityKind::Betweenness => "betweenness",
            CentralityKind::PageRank => "pagerank",
        }
    }
}

/// Parameters a result was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "measure",
    rename_all = "lowercase",
    bound(serialize = "T: Serialize", deserialize = "T: Scalar")
)]
pub enum CentralityParams<T> {
    Betweenness(BetweennessParams),
    PageRank(PageRankParams<T>),
}

/// How a PageRank iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence<T> {
    pub iterations: usize,
    /// L1 distance between the last two iterates.
    pub residual: T,
    pub converged: bool,
}

/// One score per graph node, aligned with the graph's node indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Scalar"))]
pub struct CentralityResult<T> {
    pub kind: CentralityKind,
    pub labels: Vec<String>,
    pub scores: Vec<T>,
    pub normalized: bool,
    pub params: CentralityParams<T>,
    pub convergence: Option<Convergence<T>>,
    /// Set when PageRank stopped at `max_iter` without converging.
    pub warning: Option<String>,
}

impl<T: Scalar> CentralityResult<T> {
    pub fn get(&self, label: &str) -> Option<T> {
        self.labels.iter().position(|l| l == label).map(|i| self.scores[i])
    }

    /// `(label, score)` by descending score, then ascending label.
    pub fn ranked(&self) -> Vec<(&str, T)> {
        let mut out: Vec<(&str, T)> = self
            .labels
            .iter()
            .map(String::as_str)
            .zip(self.scores.iter().copied())
            .collect();
        out.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.cmp(b.0))
        });
        out
    }
}
