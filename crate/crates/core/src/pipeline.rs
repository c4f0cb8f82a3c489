//! End-to-end driver: load exports, clean, filter, analyze, write artifacts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{betweenness, pagerank, BetweennessParams, CentralityKind, PageRankParams};
use crate::graph::{build_graph, EntityKind};
use crate::ingest::{decode_input, parse_csv, parse_tagged, HeaderMap, InputFormat, RawRecord, Tag};
use crate::normalize::{clean, emit_json, AliasMap, CleanOptions, Diagnostic, PaperRecord};
use crate::relevance::{relevance_matrix, Bm25Params, RelevanceMatrix, TokenFilters};
use crate::report::{
    entity_ranking, export_graph, relevance_table, source_year_matrix, summary_json, top_entities_table,
    trending_table, ArtifactFormat, GraphFormat, GraphSummary, Metric, Ranking, ReportBundle, SizeRange, Summary,
    TableEntity,
};
use crate::trends::{match_topic, trend_table, validate_topics, TopicVector, TrendOptions, TrendTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Clean,
    Graphs,
    Trends,
    Relevance,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Clean,
        Stage::Graphs,
        Stage::Trends,
        Stage::Relevance,
        Stage::Report,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Clean => "clean",
            Stage::Graphs => "graphs",
            Stage::Trends => "trends",
            Stage::Relevance => "relevance",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Centrality measure that drives node sizes, per graph kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizeBy {
    pub author: CentralityKind,
    pub institution: CentralityKind,
    pub country: CentralityKind,
}

impl Default for SizeBy {
    fn default() -> Self {
        SizeBy {
            author: CentralityKind::PageRank,
            institution: CentralityKind::PageRank,
            country: CentralityKind::Betweenness,
        }
    }
}

impl SizeBy {
    pub fn for_kind(&self, kind: EntityKind) -> CentralityKind {
        match kind {
            EntityKind::Author => self.author,
            EntityKind::Institution => self.institution,
            EntityKind::Country => self.country,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    /// Rows in each top-entity table and in the summary rankings.
    pub limit: usize,
    /// Rows in the source-by-year table.
    pub source_limit: usize,
    /// Inclusive year span of the source-by-year table; defaults to the
    /// corpus span.
    pub year_range: Option<(i32, i32)>,
    pub size_min: f64,
    pub size_max: f64,
    pub size_by: SizeBy,
}

impl Default for ReportOptions {
    fn default() -> Self {
        let sizes = SizeRange::default();
        ReportOptions {
            limit: 20,
            source_limit: 10,
            year_range: None,
            size_min: sizes.min,
            size_max: sizes.max,
            size_by: SizeBy::default(),
        }
    }
}

/// Everything a run needs, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub input_format: InputFormat,
    /// Extra CSV header names mapped to field tags, on top of the defaults.
    pub csv_columns: BTreeMap<String, String>,
    /// Read non-UTF-8 input as Latin-1 instead of replacing bad bytes.
    pub latin1_fallback: bool,
    pub topics: Vec<TopicVector>,
    /// A record is kept only if every level has a matching pattern.
    pub query_levels: Vec<TopicVector>,
    pub bm25: Bm25Params<f64>,
    pub tokens: TokenFilters,
    pub pagerank: PageRankParams<f64>,
    pub betweenness: BetweennessParams,
    pub trend: TrendOptions,
    pub aliases_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub strict: bool,
    pub current_year: Option<i32>,
    /// Timestamp written into JSON outputs. Falls back to
    /// `SOURCE_DATE_EPOCH`, then to the current time.
    pub generated_at: Option<String>,
    pub threads: Option<usize>,
    pub dry_run: bool,
    pub report: ReportOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            input_format: InputFormat::Auto,
            csv_columns: BTreeMap::new(),
            latin1_fallback: true,
            topics: Vec::new(),
            query_levels: Vec::new(),
            bm25: Bm25Params::default(),
            tokens: TokenFilters::default(),
            pagerank: PageRankParams::default(),
            betweenness: BetweennessParams::default(),
            trend: TrendOptions::default(),
            aliases_path: None,
            output_dir: PathBuf::from("out"),
            strict: false,
            current_year: None,
            generated_at: None,
            threads: None,
            dry_run: false,
            report: ReportOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: crate::ingest::IngestError,
    },
    #[error("{path}: {source}")]
    Aliases {
        path: PathBuf,
        source: crate::normalize::NormalizeError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{} stage(s) failed: {}", failures.len(), join(failures))]
    Stages {
        failures: Vec<StageFailure>,
        bundle: ReportBundle,
    },
}

fn join(failures: &[StageFailure]) -> String {
    failures.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.inputs.iter_mut().for_each(fix);
        if let Some(p) = self.aliases_path.as_mut() {
            fix(p);
        }
        fix(&mut self.output_dir);
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn header_map(&self) -> Result<HeaderMap, ConfigError> {
        let mut map = HeaderMap::default();
        for (column, tag) in &self.csv_columns {
            let tag = Tag::new(tag).map_err(|e| ConfigError::Invalid(format!("csv column {column:?}: {e}")))?;
            map.insert(column.clone(), tag);
        }
        Ok(map)
    }

    pub fn validate(&self, stages: &[Stage]) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.inputs.is_empty() {
            return invalid("no input files given".into());
        }
        let needs_topics = stages.iter().any(|s| matches!(s, Stage::Trends | Stage::Relevance));
        if needs_topics && self.topics.is_empty() {
            return invalid("trends and relevance need at least one topic".into());
        }
        validate_topics(&self.topics).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        validate_topics(&self.query_levels).map_err(|e| ConfigError::Invalid(format!("query level: {e}")))?;
        self.bm25.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.pagerank
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.trend.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.header_map()?;
        if self.threads == Some(0) {
            return invalid("threads must be at least 1".into());
        }
        let r = &self.report;
        if !(r.size_min.is_finite() && r.size_max.is_finite() && r.size_min <= r.size_max) {
            return invalid(format!("bad size range [{}, {}]", r.size_min, r.size_max));
        }
        if let Some((from, to)) = r.year_range {
            if from > to {
                return invalid(format!("empty year range {from}..{to}"));
            }
        }
        if self.output_dir.is_file() {
            return invalid(format!("output_dir {} is a file", self.output_dir.display()));
        }
        Ok(())
    }

    fn timestamp(&self) -> String {
        if let Some(t) = &self.generated_at {
            return t.clone();
        }
        let epoch = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
        epoch
            .unwrap_or_else(chrono::Utc::now)
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }
}

/// Result of a successful (or dry) run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub bundle: ReportBundle,
    /// Records parsed from all inputs.
    pub parsed: usize,
    /// Records left after cleaning and the query filter.
    pub papers: usize,
    pub excluded_by_query: usize,
    pub diagnostics: Vec<Diagnostic>,
}

/// Stages to run, in dependency order, with `clean` always included.
pub fn plan(stages: &[Stage]) -> Vec<Stage> {
    let mut out: Vec<Stage> = stages.to_vec();
    out.push(Stage::Clean);
    out.sort();
    out.dedup();
    out
}

/// Reads and parses every input, concatenating records in input order.
pub fn load_inputs(config: &RunConfig) -> Result<Vec<RawRecord>, PipelineError> {
    let header_map = config.header_map()?;
    let mut records = Vec::new();
    for path in &config.inputs {
        let bytes = std::fs::read(path).map_err(|source| InputError::Io {
            path: path.clone(),
            source,
        })?;
        let text = decode_input(&bytes, config.latin1_fallback);
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        let parsed = match config.input_format.resolve(name, &text) {
            InputFormat::Csv => parse_csv(&text, &header_map),
            _ => parse_tagged(&text),
        };
        let mut parsed = parsed.map_err(|source| InputError::Parse {
            path: path.clone(),
            source,
        })?;
        log::info!("{}: {} records", path.display(), parsed.len());
        records.append(&mut parsed);
    }
    Ok(records)
}

fn clean_options(config: &RunConfig) -> Result<CleanOptions, PipelineError> {
    let mut options = CleanOptions {
        strict: config.strict,
        ..CleanOptions::default()
    };
    if let Some(year) = config.current_year {
        options.current_year = year;
    }
    if let Some(path) = &config.aliases_path {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.clone(),
            source,
        })?;
        options.aliases = AliasMap::with_overrides(&text).map_err(|source| InputError::Aliases {
            path: path.clone(),
            source,
        })?;
    }
    Ok(options)
}

/// Keeps records that match at least one pattern of every query level.
pub fn apply_query_levels(records: Vec<PaperRecord>, levels: &[TopicVector]) -> Vec<PaperRecord> {
    if levels.is_empty() {
        return records;
    }
    records
        .into_iter()
        .filter(|r| levels.iter().all(|level| match_topic(r, level)))
        .collect()
}

/// Runs `stages` (plus `clean`) and writes artifacts into
/// `config.output_dir`.
///
/// Analysis stages that fail are collected and reported together after
/// the remaining stages have run.
pub fn run(config: &RunConfig, stages: &[Stage]) -> Result<RunOutcome, PipelineError> {
    let stages = plan(stages);
    config.validate(&stages)?;
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
            pool.install(|| run_stages(config, &stages))
        }
        None => run_stages(config, &stages),
    }
}

struct Analyses {
    graphs: Vec<GraphSummary<f64>>,
    trends: Option<TrendTable<f64>>,
    relevance: Option<RelevanceMatrix<f64>>,
}

fn run_stages(config: &RunConfig, stages: &[Stage]) -> Result<RunOutcome, PipelineError> {
    let raw = load_inputs(config)?;
    let options = clean_options(config)?;
    let (cleaned, diagnostics) = clean(&raw, &options);
    for d in &diagnostics {
        log::debug!("record {}: {}", d.record, d.message);
    }
    let before = cleaned.len();
    let papers = apply_query_levels(cleaned, &config.query_levels);
    let excluded_by_query = before - papers.len();
    log::info!(
        "{} records parsed, {} kept, {} outside the query",
        raw.len(),
        papers.len(),
        excluded_by_query
    );

    let mut outcome = RunOutcome {
        bundle: ReportBundle::new(&config.output_dir),
        parsed: raw.len(),
        papers: papers.len(),
        excluded_by_query,
        diagnostics,
    };
    if config.dry_run {
        return Ok(outcome);
    }

    let io_err = |path: &Path, source: std::io::Error| InputError::Io {
        path: path.to_owned(),
        source,
    };
    std::fs::create_dir_all(&config.output_dir).map_err(|e| io_err(&config.output_dir, e))?;
    let generated_at = config.timestamp();
    let bundle = &mut outcome.bundle;
    let mut failures = Vec::new();
    let mut fail = |stage: Stage, message: String| {
        log::error!("{stage} stage failed: {message}");
        failures.push(StageFailure { stage, message });
    };

    let mut buf = Vec::new();
    emit_json(&papers, Some(&generated_at), &mut buf).map_err(|e| io_err(&config.output_dir, e))?;
    bundle
        .write("papers.json", ArtifactFormat::Json, &buf)
        .map_err(|e| io_err(&config.output_dir, e))?;

    let mut analyses = Analyses {
        graphs: Vec::new(),
        trends: None,
        relevance: None,
    };
    for &stage in stages {
        let result = match stage {
            Stage::Clean | Stage::Report => Ok(()),
            Stage::Graphs => graphs_stage(config, &papers, bundle, &mut analyses),
            Stage::Trends => trend_table(&papers, &config.topics, &config.trend)
                .map(|t| analyses.trends = Some(t))
                .map_err(|e| e.to_string()),
            Stage::Relevance => relevance_stage(config, &papers, &mut analyses),
        };
        if let Err(message) = result {
            fail(stage, message);
        }
    }
    if stages.contains(&Stage::Report) {
        if let Err(message) = report_stage(config, &papers, bundle, &analyses) {
            fail(Stage::Report, message);
        }
    }
    if stages.len() > 1 {
        let summary = Summary {
            generated_at: Some(generated_at),
            papers: papers.len(),
            diagnostics: outcome.diagnostics.clone(),
            rankings: rankings(&papers, config.report.limit),
            graphs: analyses.graphs,
            trends: analyses.trends.map(|t| t.years).unwrap_or_default(),
            relevance: analyses.relevance.unwrap_or_else(|| empty_matrix(&config.topics)),
            ..Summary::empty(None)
        };
        let mut buf = Vec::new();
        let written = summary_json(&summary, &mut buf)
            .map_err(|e| e.to_string())
            .and_then(|()| {
                bundle
                    .write("summary.json", ArtifactFormat::Json, &buf)
                    .map_err(|e| e.to_string())
            });
        if let Err(message) = written {
            fail(Stage::Report, message);
        }
    }

    if failures.is_empty() {
        Ok(outcome)
    } else {
        Err(PipelineError::Stages {
            failures,
            bundle: outcome.bundle,
        })
    }
}

fn empty_matrix(topics: &[TopicVector]) -> RelevanceMatrix<f64> {
    RelevanceMatrix {
        topics: topics.iter().map(|t| t.name.clone()).collect(),
        queries: Vec::new(),
        rows: Vec::new(),
    }
}

fn rankings(papers: &[PaperRecord], limit: usize) -> Vec<Ranking> {
    let mut out = Vec::new();
    for entity in TableEntity::ALL {
        for metric in Metric::ALL {
            let mut entries = entity_ranking(papers, entity, metric);
            entries.truncate(limit);
            out.push(Ranking {
                entity,
                metric,
                entries,
            });
        }
    }
    out
}

fn graphs_stage(
    config: &RunConfig,
    papers: &[PaperRecord],
    bundle: &mut ReportBundle,
    analyses: &mut Analyses,
) -> Result<(), String> {
    let sizes = SizeRange {
        min: config.report.size_min,
        max: config.report.size_max,
    };
    for kind in EntityKind::ALL {
        let g = build_graph(papers, kind);
        let pr = pagerank::<f64>(&g, config.pagerank).map_err(|e| e.to_string())?;
        if let Some(w) = &pr.warning {
            log::warn!("{} graph: {w}", kind.as_str());
        }
        let bc = betweenness::<f64>(&g, config.betweenness);
        let sized_by = match config.report.size_by.for_kind(kind) {
            CentralityKind::PageRank => &pr,
            CentralityKind::Betweenness => &bc,
        };
        for format in [GraphFormat::Graphml, GraphFormat::Dot] {
            let mut buf = Vec::new();
            export_graph(&g, sized_by, format, sizes, &mut buf).map_err(|e| e.to_string())?;
            let name = format!("graph_{}.{}", kind.as_str(), format.extension());
            let artifact = match format {
                GraphFormat::Graphml => ArtifactFormat::Graphml,
                GraphFormat::Dot => ArtifactFormat::Dot,
            };
            bundle.write(&name, artifact, &buf).map_err(|e| e.to_string())?;
        }
        analyses.graphs.push(GraphSummary::new(&g, &pr, &bc));
    }
    Ok(())
}

fn relevance_stage(config: &RunConfig, papers: &[PaperRecord], analyses: &mut Analyses) -> Result<(), String> {
    if papers.is_empty() {
        analyses.relevance = Some(empty_matrix(&config.topics));
        return Ok(());
    }
    let matrix = relevance_matrix(papers, &config.topics, &config.bm25, &config.tokens).map_err(|e| e.to_string())?;
    analyses.relevance = Some(matrix);
    Ok(())
}

fn report_stage(
    config: &RunConfig,
    papers: &[PaperRecord],
    bundle: &mut ReportBundle,
    analyses: &Analyses,
) -> Result<(), String> {
    let mut tables: Vec<(String, String)> = Vec::new();
    for entity in TableEntity::ALL {
        for metric in Metric::ALL {
            tables.push((
                format!("top_{}_by_{}.tex", entity.as_str(), metric.as_str()),
                top_entities_table(papers, entity, metric, config.report.limit),
            ));
        }
    }
    tables.push((
        "sources_by_year.tex".into(),
        source_year_matrix(papers, config.report.year_range, config.report.source_limit),
    ));
    if let Some(trends) = &analyses.trends {
        tables.push(("trending.tex".into(), trending_table(trends, config.trend.top_k)));
    }
    if let Some(matrix) = &analyses.relevance {
        tables.push(("relevance.tex".into(), relevance_table(matrix)));
    }
    for (name, body) in tables {
        bundle
            .write(&name, ArtifactFormat::Latex, body.as_bytes())
            .map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}
