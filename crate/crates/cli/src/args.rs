use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use scholarlens::centrality::CentralityKind;
use scholarlens::ingest::InputFormat;
use scholarlens::pipeline::{RunConfig, Stage};
use scholarlens::trends::TrendMode;
use scholarlens::TopicVector;

pub const OUTPUT_DIR_ENV: &str = "SCHOLARLENS_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "scholarlens",
    version,
    about = "Systematic-review analytics over bibliographic exports"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Only print errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and clean the inputs into papers.json.
    Clean(RunArgs),
    /// Clean, then build graphs and, when topics are configured, trends
    /// and relevance scores.
    Analyze(RunArgs),
    /// Clean and write the LaTeX tables (plus trend and relevance tables
    /// when topics are configured).
    Report(RunArgs),
    /// Run every stage, or the ones named with --stages.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated subset of clean,graphs,trends,relevance,report.
        #[arg(long, value_delimiter = ',')]
        stages: Vec<Stage>,
    },
    /// Print the effective configuration as TOML.
    Config(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Tagged,
    Csv,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Magnitude,
    Literal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Pagerank,
    Betweenness,
}

impl From<MeasureArg> for CentralityKind {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Pagerank => CentralityKind::PageRank,
            MeasureArg::Betweenness => CentralityKind::Betweenness,
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the matching
/// config-file key.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,

    /// Export file(s) to read; replaces `inputs` from the config.
    #[arg(short, long = "input")]
    pub inputs: Vec<PathBuf>,

    #[arg(long, value_enum)]
    pub input_format: Option<FormatArg>,

    /// Extra CSV column mapping, HEADER=TAG.
    #[arg(long = "csv-column", value_name = "HEADER=TAG")]
    pub csv_columns: Vec<String>,

    /// Replace undecodable bytes instead of reading them as Latin-1.
    #[arg(long)]
    pub no_latin1_fallback: bool,

    /// Topic as NAME=PATTERN[;PATTERN...]; replaces configured topics.
    #[arg(long = "topic", value_name = "NAME=PATTERNS")]
    pub topics: Vec<String>,

    /// Query level as NAME=PATTERN[;PATTERN...]; replaces configured levels.
    #[arg(long = "query-level", value_name = "NAME=PATTERNS")]
    pub query_levels: Vec<String>,

    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Stem tokens before BM25 scoring.
    #[arg(long)]
    pub stem: bool,
    /// Drop English stopwords before BM25 scoring.
    #[arg(long)]
    pub stopwords: bool,

    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Split PageRank in proportion to edge weights.
    #[arg(long)]
    pub pagerank_weighted: bool,

    /// Report raw pair counts instead of normalized betweenness.
    #[arg(long)]
    pub raw_betweenness: bool,
    /// Use 1/weight as edge length for betweenness.
    #[arg(long)]
    pub betweenness_weighted: bool,

    #[arg(long)]
    pub window_years: Option<u32>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long, value_enum)]
    pub trend_mode: Option<ModeArg>,
    /// Window ends at the scored year instead of the year before.
    #[arg(long)]
    pub inclusive_window: bool,
    /// Score with (delta+0.5)/(N+1).
    #[arg(long)]
    pub smoothing: bool,
    /// Count only topical papers in the window size.
    #[arg(long)]
    pub topical_denominator: bool,

    /// Country alias file (`raw = canonical` per line).
    #[arg(long)]
    pub aliases: Option<PathBuf>,

    #[arg(short, long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,

    /// Drop affiliations whose country is not recognized.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub current_year: Option<i32>,
    /// Timestamp written into JSON outputs.
    #[arg(long)]
    pub generated_at: Option<String>,
    #[arg(short = 'j', long)]
    pub threads: Option<usize>,
    /// Validate config and inputs without writing anything.
    #[arg(long)]
    pub dry_run: bool,

    /// Rows per top-entity table.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Rows in the source-by-year table.
    #[arg(long)]
    pub source_limit: Option<usize>,
    /// Year span of the source-by-year table, FROM:TO.
    #[arg(long, value_name = "FROM:TO")]
    pub year_range: Option<String>,
    #[arg(long)]
    pub size_min: Option<f64>,
    #[arg(long)]
    pub size_max: Option<f64>,
    #[arg(long, value_enum)]
    pub size_author: Option<MeasureArg>,
    #[arg(long, value_enum)]
    pub size_institution: Option<MeasureArg>,
    #[arg(long, value_enum)]
    pub size_country: Option<MeasureArg>,
}

fn parse_named_patterns(arg: &str) -> Result<TopicVector> {
    let (name, patterns) = arg
        .split_once('=')
        .ok_or_else(|| anyhow!("expected NAME=PATTERN[;PATTERN...], got {arg:?}"))?;
    let patterns: Vec<&str> = patterns.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
    TopicVector::new(name.trim(), &patterns).with_context(|| format!("bad pattern list {arg:?}"))
}

impl RunArgs {
    /// Loads the config file (if any) and applies the flags on top.
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => RunConfig::default(),
        };
        if !self.inputs.is_empty() {
            c.inputs = self.inputs.clone();
        }
        if let Some(f) = self.input_format {
            c.input_format = match f {
                FormatArg::Tagged => InputFormat::Tagged,
                FormatArg::Csv => InputFormat::Csv,
                FormatArg::Auto => InputFormat::Auto,
            };
        }
        for pair in &self.csv_columns {
            let (header, tag) = pair
                .split_once('=')
                .ok_or_else(|| anyhow!("expected HEADER=TAG, got {pair:?}"))?;
            c.csv_columns.insert(header.trim().to_owned(), tag.trim().to_owned());
        }
        if self.no_latin1_fallback {
            c.latin1_fallback = false;
        }
        if !self.topics.is_empty() {
            c.topics = self
                .topics
                .iter()
                .map(|s| parse_named_patterns(s))
                .collect::<Result<_>>()?;
        }
        if !self.query_levels.is_empty() {
            c.query_levels = self
                .query_levels
                .iter()
                .map(|s| parse_named_patterns(s))
                .collect::<Result<_>>()?;
        }

        if let Some(v) = self.k1 {
            c.bm25.k1 = v;
        }
        if let Some(v) = self.b {
            c.bm25.b = v;
        }
        c.tokens.stem |= self.stem;
        c.tokens.stopwords |= self.stopwords;

        if let Some(v) = self.damping {
            c.pagerank.damping = v;
        }
        if let Some(v) = self.tol {
            c.pagerank.tol = v;
        }
        if let Some(v) = self.max_iter {
            c.pagerank.max_iter = v;
        }
        c.pagerank.weighted |= self.pagerank_weighted;
        if self.raw_betweenness {
            c.betweenness.normalized = false;
        }
        c.betweenness.weighted |= self.betweenness_weighted;

        if let Some(v) = self.window_years {
            c.trend.window_years = v;
        }
        if let Some(v) = self.top_k {
            c.trend.top_k = v;
        }
        if let Some(m) = self.trend_mode {
            c.trend.mode = match m {
                ModeArg::Magnitude => TrendMode::Magnitude,
                ModeArg::Literal => TrendMode::Literal,
            };
        }
        c.trend.inclusive_window |= self.inclusive_window;
        c.trend.smoothing |= self.smoothing;
        c.trend.topical_denominator |= self.topical_denominator;

        if let Some(p) = &self.aliases {
            c.aliases_path = Some(p.clone());
        }
        if let Some(p) = &self.output_dir {
            c.output_dir = p.clone();
        }
        c.strict |= self.strict;
        if let Some(y) = self.current_year {
            c.current_year = Some(y);
        }
        if let Some(t) = &self.generated_at {
            c.generated_at = Some(t.clone());
        }
        if let Some(n) = self.threads {
            c.threads = Some(n);
        }
        c.dry_run |= self.dry_run;

        let r = &mut c.report;
        if let Some(v) = self.limit {
            r.limit = v;
        }
        if let Some(v) = self.source_limit {
            r.source_limit = v;
        }
        if let Some(span) = &self.year_range {
            let (from, to) = span
                .split_once(':')
                .ok_or_else(|| anyhow!("expected FROM:TO, got {span:?}"))?;
            let from: i32 = from.trim().parse().context("year range start")?;
            let to: i32 = to.trim().parse().context("year range end")?;
            if from > to {
                bail!("year range {from}:{to} is empty");
            }
            r.year_range = Some((from, to));
        }
        if let Some(v) = self.size_min {
            r.size_min = v;
        }
        if let Some(v) = self.size_max {
            r.size_max = v;
        }
        if let Some(m) = self.size_author {
            r.size_by.author = m.into();
        }
        if let Some(m) = self.size_institution {
            r.size_by.institution = m.into();
        }
        if let Some(m) = self.size_country {
            r.size_by.country = m.into();
        }
        Ok(c)
    }
}
