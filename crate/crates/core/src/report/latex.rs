//! LaTeX table fragments. Each function returns a complete `table`
//! environment using booktabs rules.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::normalize::PaperRecord;
use crate::relevance::RelevanceMatrix;
use crate::scalar::Scalar;
use crate::trends::TrendTable;

const ORDINALS: [&str; 10] = [
    "First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth",
];

/// Escapes text for use inside a tabular cell.
pub fn escape_latex(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("\\&"),
            '%' => out.push_str("\\%"),
            '$' => out.push_str("\\$"),
            '#' => out.push_str("\\#"),
            '_' => out.push_str("\\_"),
            '{' => out.push_str("\\{"),
            '}' => out.push_str("\\}"),
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            '<' => out.push_str("\\textless{}"),
            '>' => out.push_str("\\textgreater{}"),
            '|' => out.push_str("\\textbar{}"),
            // a cell starting with '[' after \\ would be read as a length
            '[' => out.push_str("{[}"),
            ']' => out.push_str("{]}"),
            '\n' | '\r' | '\t' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableEntity {
    Author,
    Affiliation,
    Source,
}

impl TableEntity {
    pub const ALL: [TableEntity; 3] = [TableEntity::Author, TableEntity::Affiliation, TableEntity::Source];

    pub fn as_str(&self) -> &'static str {
        match self {
            TableEntity::Author => "author",
            TableEntity::Affiliation => "affiliation",
            TableEntity::Source => "source",
        }
    }

    fn heading(&self) -> &'static str {
        match self {
            TableEntity::Author => "Author Name",
            TableEntity::Affiliation => "Affiliation Name",
            TableEntity::Source => "Source Name",
        }
    }

    fn plural(&self) -> &'static str {
        match self {
            TableEntity::Author => "authors",
            TableEntity::Affiliation => "affiliations",
            TableEntity::Source => "sources",
        }
    }

    fn of<'a>(&self, paper: &'a PaperRecord) -> Vec<&'a str> {
        match self {
            TableEntity::Author => {
                let mut seen = Vec::new();
                for a in &paper.authors {
                    if !seen.contains(&a.as_str()) {
                        seen.push(a.as_str());
                    }
                }
                seen
            }
            TableEntity::Affiliation => paper.institutions(),
            TableEntity::Source if paper.source.is_empty() => Vec::new(),
            TableEntity::Source => vec![paper.source.as_str()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Papers,
    Citations,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Papers, Metric::Citations];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Papers => "papers",
            Metric::Citations => "citations",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCount {
    pub name: String,
    pub papers: u64,
    pub citations: u64,
}

impl EntityCount {
    fn value(&self, metric: Metric) -> u64 {
        match metric {
            Metric::Papers => self.papers,
            Metric::Citations => self.citations,
        }
    }
}

/// Every entity of `kind` with its paper and citation totals, sorted by
/// `metric` descending and then by name.
pub fn entity_ranking(records: &[PaperRecord], kind: TableEntity, metric: Metric) -> Vec<EntityCount> {
    let mut totals: HashMap<&str, (u64, u64)> = HashMap::new();
    for paper in records {
        for name in kind.of(paper) {
            let entry = totals.entry(name).or_default();
            entry.0 += 1;
            entry.1 += paper.times_cited;
        }
    }
    let mut out: Vec<EntityCount> = totals
        .into_iter()
        .map(|(name, (papers, citations))| EntityCount {
            name: name.to_owned(),
            papers,
            citations,
        })
        .collect();
    out.sort_by(|a, b| b.value(metric).cmp(&a.value(metric)).then_with(|| a.name.cmp(&b.name)));
    out
}

fn open_table(out: &mut String, caption: &str, label: &str, columns: &str) {
    out.push_str("\\begin{table}[ht]\n\\centering\n");
    let _ = writeln!(out, "\\caption{{{caption}}}");
    let _ = writeln!(out, "\\label{{tab:{label}}}");
    let _ = writeln!(out, "\\begin{{tabular}}{{{columns}}}");
    out.push_str("\\toprule\n");
}

fn close_table(out: &mut String) {
    out.push_str("\\bottomrule\n\\end{tabular}\n\\end{table}\n");
}

fn push_row<S: AsRef<str>>(out: &mut String, cells: &[S]) {
    let mut first = true;
    for cell in cells {
        if !first {
            out.push_str(" & ");
        }
        first = false;
        out.push_str(cell.as_ref());
    }
    out.push_str(" \\\\\n");
}

fn bold(text: &str) -> String {
    format!("\\textbf{{{text}}}")
}

/// Top `limit` entities by `metric`.
pub fn top_entities_table(records: &[PaperRecord], kind: TableEntity, metric: Metric, limit: usize) -> String {
    let ranking = entity_ranking(records, kind, metric);
    let (metric_heading, caption_metric) = match metric {
        Metric::Papers => ("\\#Papers", "number of papers"),
        Metric::Citations => ("\\#Citations", "number of citations"),
    };
    let mut out = String::new();
    open_table(
        &mut out,
        &format!("Top {} by {}", kind.plural(), caption_metric),
        &format!("top_{}_by_{}", kind.as_str(), metric.as_str()),
        "lr",
    );
    push_row(&mut out, &[bold(kind.heading()), bold(metric_heading)]);
    out.push_str("\\midrule\n");
    for entry in ranking.iter().take(limit) {
        push_row(&mut out, &[escape_latex(&entry.name), entry.value(metric).to_string()]);
    }
    close_table(&mut out);
    out
}

/// Papers per source and year for the `limit` most active sources.
///
/// `year_range` defaults to the span of years in `records`. Zero counts
/// print as `-`; the bold last column is the total over the range.
pub fn source_year_matrix(records: &[PaperRecord], year_range: Option<(i32, i32)>, limit: usize) -> String {
    let (from, to) = year_range.unwrap_or_else(|| {
        let lo = records.iter().map(|r| r.year).min();
        let hi = records.iter().map(|r| r.year).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, -1),
        }
    });
    let years: Vec<i32> = (from..=to).collect();

    let mut counts: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for paper in records {
        if paper.source.is_empty() || paper.year < from || paper.year > to {
            continue;
        }
        let row = counts
            .entry(paper.source.as_str())
            .or_insert_with(|| vec![0; years.len()]);
        row[(paper.year - from) as usize] += 1;
    }
    let mut rows: Vec<(&str, Vec<u64>, u64)> = counts
        .into_iter()
        .map(|(name, cells)| {
            let total = cells.iter().sum();
            (name, cells, total)
        })
        .collect();
    rows.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(b.0)));
    rows.truncate(limit);

    let mut out = String::new();
    open_table(
        &mut out,
        "The most active sources",
        "sources_by_year",
        &format!("l{}r", "r".repeat(years.len())),
    );
    let mut header = vec![bold("Source Name")];
    header.extend(years.iter().map(|y| bold(&y.to_string())));
    header.push(bold("Total"));
    push_row(&mut out, &header);
    out.push_str("\\midrule\n");
    for (name, cells, total) in rows {
        let mut line = vec![escape_latex(name)];
        line.extend(
            cells
                .iter()
                .map(|&c| if c == 0 { "-".to_owned() } else { c.to_string() }),
        );
        line.push(bold(&total.to_string()));
        push_row(&mut out, &line);
    }
    close_table(&mut out);
    out
}

/// One row per year, newest first, with the top `top_k` topic names.
/// Empty slots print as `-`.
pub fn trending_table<T: Scalar>(table: &TrendTable<T>, top_k: usize) -> String {
    let mut out = String::new();
    open_table(
        &mut out,
        &format!("The top {top_k} trending topics"),
        "trending",
        &format!("c{}", "c".repeat(top_k)),
    );
    let mut header = vec![bold("Year")];
    for i in 0..top_k {
        let slot = match ORDINALS.get(i) {
            Some(word) => format!("{word} Trending Topic"),
            None => format!("Trending Topic {}", i + 1),
        };
        header.push(bold(&slot));
    }
    push_row(&mut out, &header);
    out.push_str("\\midrule\n");
    for year in table.years.iter().rev() {
        let mut line = vec![bold(&year.year.to_string())];
        for i in 0..top_k {
            line.push(match year.top.get(i) {
                Some(obs) => escape_latex(&obs.topic),
                None => "-".to_owned(),
            });
        }
        push_row(&mut out, &line);
    }
    close_table(&mut out);
    out
}

/// Paper-by-topic scores with two decimals and the per-paper rank in
/// parentheses. Papers are numbered; their ids follow as comments.
pub fn relevance_table<T: Scalar>(matrix: &RelevanceMatrix<T>) -> String {
    let mut out = String::new();
    for (i, row) in matrix.rows.iter().enumerate() {
        let id = row.paper_id.replace(['\n', '\r'], " ");
        let _ = writeln!(out, "% Paper #{}: {}", i + 1, id);
    }
    open_table(
        &mut out,
        "Relevance of papers to topics",
        "relevance",
        &format!("l{}", "c".repeat(matrix.topics.len())),
    );
    let mut header = vec![String::new()];
    header.extend(matrix.topics.iter().map(|t| bold(&escape_latex(t))));
    push_row(&mut out, &header);
    out.push_str("\\midrule\n");
    for (i, row) in matrix.rows.iter().enumerate() {
        let mut line = vec![format!("Paper \\#{}", i + 1)];
        for cell in &row.cells {
            line.push(match cell.rank {
                Some(rank) => format!("{:.2} ({})", cell.score.to_f64().unwrap_or(0.0), rank),
                None => "0".to_owned(),
            });
        }
        push_row(&mut out, &line);
    }
    close_table(&mut out);
    out
}
