//! Systematic-review analytics over bibliographic export files.
//!
//! The pipeline reads field-tagged or CSV exports ([`ingest`]), cleans them
//! into [`PaperRecord`]s ([`normalize`]), builds author, institution and
//! country collaboration networks ([`graph`]) scored by betweenness and
//! PageRank ([`centrality`]), ranks trending topics per year ([`trends`]),
//! scores paper/topic relevance with BM25 ([`relevance`]) and writes LaTeX,
//! JSON, GraphML and DOT artifacts ([`report`]). [`pipeline::run`] wires the
//! stages together.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the pipeline uses.

pub mod centrality;
pub mod graph;
pub mod ingest;
pub mod normalize;
pub mod pipeline;
pub mod relevance;
pub mod report;
pub mod scalar;
pub mod trends;

pub use graph::{build_graph, degree_stats, CollaborationGraph, EntityKind};
pub use ingest::{parse_address, parse_csv, parse_tagged, RawRecord, Tag};
pub use normalize::{clean, emit_json, PaperRecord};
pub use scalar::Scalar;
pub use trends::TopicVector;

/// Centrality scores in double precision.
pub type CentralityResult = centrality::CentralityResult<f64>;
pub type PageRankParams = centrality::PageRankParams<f64>;
pub type TrendObservation = trends::TrendObservation<f64>;
pub type TrendTable = trends::TrendTable<f64>;
pub type Bm25Params = relevance::Bm25Params<f64>;
pub type CorpusStats = relevance::CorpusStats<f64>;
pub type RelevanceMatrix = relevance::RelevanceMatrix<f64>;
