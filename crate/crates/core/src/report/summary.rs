use std::io::Write;

use serde::{Deserialize, Serialize};

use super::latex::{EntityCount, Metric, TableEntity};
use super::ReportError;
use crate::centrality::{CentralityKind, CentralityResult, Convergence};
use crate::graph::{CollaborationGraph, EntityKind};
use crate::normalize::Diagnostic;
use crate::relevance::RelevanceMatrix;
use crate::scalar::Scalar;
use crate::trends::YearTrends;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub entity: TableEntity,
    pub metric: Metric,
    pub entries: Vec<EntityCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ScoreEntry<T> {
    pub label: String,
    pub score: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GraphSummary<T> {
    pub entity_kind: EntityKind,
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub pagerank: Vec<ScoreEntry<T>>,
    pub pagerank_convergence: Option<Convergence<T>>,
    pub pagerank_warning: Option<String>,
    pub betweenness: Vec<ScoreEntry<T>>,
}

impl<T: Scalar> GraphSummary<T> {
    /// Scores are listed by label so the document diffs cleanly.
    pub fn new(g: &CollaborationGraph, pagerank: &CentralityResult<T>, betweenness: &CentralityResult<T>) -> Self {
        debug_assert_eq!(pagerank.kind, CentralityKind::PageRank);
        debug_assert_eq!(betweenness.kind, CentralityKind::Betweenness);
        let by_label = |r: &CentralityResult<T>| {
            let mut entries: Vec<ScoreEntry<T>> = r
                .labels
                .iter()
                .zip(&r.scores)
                .map(|(label, &score)| ScoreEntry {
                    label: label.clone(),
                    score,
                })
                .collect();
            entries.sort_by(|a, b| a.label.cmp(&b.label));
            entries
        };
        GraphSummary {
            entity_kind: g.entity_kind,
            nodes: g.n(),
            edges: g.m(),
            total_weight: g.edges.iter().map(|e| e.weight).sum(),
            pagerank: by_label(pagerank),
            pagerank_convergence: pagerank.convergence,
            pagerank_warning: pagerank.warning.clone(),
            betweenness: by_label(betweenness),
        }
    }
}

/// Machine-readable companion to the LaTeX tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Summary<T> {
    pub schema_version: String,
    pub generated_at: Option<String>,
    pub papers: usize,
    pub diagnostics: Vec<Diagnostic>,
    pub rankings: Vec<Ranking>,
    pub graphs: Vec<GraphSummary<T>>,
    pub trends: Vec<YearTrends<T>>,
    pub relevance: RelevanceMatrix<T>,
}

impl<T: Scalar> Summary<T> {
    pub fn empty(generated_at: Option<String>) -> Self {
        Summary {
            schema_version: crate::normalize::SCHEMA_VERSION.to_owned(),
            generated_at,
            papers: 0,
            diagnostics: Vec::new(),
            rankings: Vec::new(),
            graphs: Vec::new(),
            trends: Vec::new(),
            relevance: RelevanceMatrix {
                topics: Vec::new(),
                queries: Vec::new(),
                rows: Vec::new(),
            },
        }
    }
}

/// Writes `summary` as pretty JSON followed by a newline.
pub fn summary_json<T: Scalar, W: Write>(summary: &Summary<T>, sink: &mut W) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut *sink, summary)?;
    sink.write_all(b"\n")?;
    sink.flush()?;
    Ok(())
}
