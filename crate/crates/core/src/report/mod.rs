//! Output artifacts: LaTeX table fragments, graph exports and the JSON
//! summary.
//!
//! Every emitter is deterministic; identical inputs give byte-identical
//! output.

mod graph_export;
mod latex;
mod summary;

use std::fmt;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph_export::{export_graph, GraphFormat, SizeRange};
pub use latex::{
    entity_ranking, escape_latex, relevance_table, source_year_matrix, top_entities_table, trending_table, EntityCount,
    Metric, TableEntity,
};
pub use summary::{summary_json, GraphSummary, Ranking, ScoreEntry, Summary};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("scores cover {scores} nodes but the graph has {nodes}")]
    ScoreMismatch { scores: usize, nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactFormat {
    Latex,
    Json,
    Graphml,
    Dot,
    Csv,
}

impl fmt::Display for ArtifactFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArtifactFormat::Latex => "latex",
            ArtifactFormat::Json => "json",
            ArtifactFormat::Graphml => "graphml",
            ArtifactFormat::Dot => "dot",
            ArtifactFormat::Csv => "csv",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub format: ArtifactFormat,
    pub path: PathBuf,
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReportBundle {
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
}

impl ReportBundle {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        ReportBundle {
            output_dir: output_dir.into(),
            artifacts: Vec::new(),
        }
    }

    /// Writes `contents` to `output_dir/name` and records it. A second
    /// artifact with the same name replaces the first entry.
    pub fn write(&mut self, name: &str, format: ArtifactFormat, contents: &[u8]) -> io::Result<()> {
        let path = self.output_dir.join(name);
        std::fs::write(&path, contents)?;
        self.artifacts.retain(|a| a.name != name);
        self.artifacts.push(Artifact {
            name: name.to_owned(),
            format,
            path,
        });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.artifacts.iter().map(|a| a.name.as_str()).collect()
    }
}
