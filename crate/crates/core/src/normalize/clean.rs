use std::collections::HashMap;

use chrono::Datelike;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{canonicalize_name, extract_country, Affiliation, AliasMap, NameKind, PaperRecord};
use crate::ingest::{parse_address, split_multi_value, RawRecord, Tag};

/// Settings for [`clean`].
#[derive(Debug, Clone)]
pub struct CleanOptions {
    pub aliases: AliasMap,
    /// Reject affiliations whose country is not recognized.
    pub strict: bool,
    /// Upper bound for publication years is `current_year + 1`.
    pub current_year: i32,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions {
            aliases: AliasMap::default(),
            strict: false,
            current_year: chrono::Utc::now().year(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Duplicate,
    MissingTitle,
    MissingAuthors,
    MissingYear,
    InvalidYear,
    MissingSource,
    ImputedTimesCited,
    InvalidTimesCited,
    EmptyAddress,
    UnrecognizedCountry,
    UnlinkedAuthor,
}

/// A repair applied to, or a rejection of, one input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Position of the record in the input list.
    pub record: usize,
    pub kind: DiagnosticKind,
    /// Whether the whole record was dropped.
    pub rejected: bool,
    pub message: String,
}

impl Diagnostic {
    fn new(record: usize, kind: DiagnosticKind, rejected: bool, message: impl Into<String>) -> Self {
        Diagnostic {
            record,
            kind,
            rejected,
            message: message.into(),
        }
    }
}

/// Validates and normalizes raw records.
///
/// Records are processed independently (in parallel), then deduplicated in
/// input order: a record is a duplicate when its DOI, or its casefolded
/// title together with its year, was already seen. The first occurrence is
/// kept. Nothing here is fatal; every problem becomes a [`Diagnostic`].
pub fn clean(records: &[RawRecord], options: &CleanOptions) -> (Vec<PaperRecord>, Vec<Diagnostic>) {
    let converted: Vec<(Option<PaperRecord>, Vec<Diagnostic>)> = records
        .par_iter()
        .enumerate()
        .map(|(idx, raw)| convert(idx, raw, options))
        .collect();

    let mut papers = Vec::new();
    let mut diagnostics = Vec::new();
    let mut by_doi: HashMap<String, String> = HashMap::new();
    let mut by_title: HashMap<(String, i32), String> = HashMap::new();
    for (idx, (paper, diags)) in converted.into_iter().enumerate() {
        diagnostics.extend(diags);
        let Some(paper) = paper else { continue };
        let title_key = (normalized_title(&paper.title), paper.year);
        let earlier = paper
            .doi
            .as_ref()
            .and_then(|d| by_doi.get(d))
            .or_else(|| by_title.get(&title_key));
        if let Some(earlier) = earlier {
            diagnostics.push(Diagnostic::new(
                idx,
                DiagnosticKind::Duplicate,
                true,
                format!("duplicate of {earlier}"),
            ));
            continue;
        }
        if let Some(doi) = &paper.doi {
            by_doi.insert(doi.clone(), paper.id.clone());
        }
        by_title.insert(title_key, paper.id.clone());
        papers.push(paper);
    }
    (papers, diagnostics)
}

fn normalized_title(title: &str) -> String {
    title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn canonical_doi(doi: &str) -> Option<String> {
    let d = doi.trim();
    let d = ["https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "doi:"]
        .iter()
        .find_map(|p| d.strip_prefix(p))
        .unwrap_or(d)
        .trim();
    (!d.is_empty()).then(|| d.to_lowercase())
}

fn title_hash_id(title: &str, year: i32) -> String {
    let mut h = Sha256::new();
    h.update(normalized_title(title).as_bytes());
    h.update(b"\x1f");
    h.update(year.to_string().as_bytes());
    let digest = h.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("h:{hex}")
}

fn convert(idx: usize, raw: &RawRecord, options: &CleanOptions) -> (Option<PaperRecord>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let reject = |diags: &mut Vec<Diagnostic>, kind, msg: String| {
        diags.push(Diagnostic::new(idx, kind, true, msg));
    };

    let title = raw
        .text(Tag::TI)
        .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" "));
    let Some(title) = title else {
        reject(&mut diags, DiagnosticKind::MissingTitle, "record has no title".into());
        return (None, diags);
    };

    let year = match raw.text(Tag::PY) {
        None => {
            reject(
                &mut diags,
                DiagnosticKind::MissingYear,
                "record has no publication year".into(),
            );
            return (None, diags);
        }
        Some(text) => match text.trim().parse::<i32>() {
            Ok(y) if (1900..=options.current_year + 1).contains(&y) => y,
            _ => {
                reject(
                    &mut diags,
                    DiagnosticKind::InvalidYear,
                    format!("publication year {text:?} outside 1900..={}", options.current_year + 1),
                );
                return (None, diags);
            }
        },
    };

    let author_lines = if raw.get(Tag::AF).is_some() {
        raw.get_all(Tag::AF)
    } else {
        raw.get_all(Tag::AU)
    };
    let mut authors: Vec<String> = Vec::new();
    for line in author_lines {
        for name in split_multi_value(line) {
            let name = canonicalize_name(&name, NameKind::Author);
            if !name.is_empty() && !authors.contains(&name) {
                authors.push(name);
            }
        }
    }
    if authors.is_empty() {
        reject(
            &mut diags,
            DiagnosticKind::MissingAuthors,
            "record has no authors".into(),
        );
        return (None, diags);
    }

    let mut affiliations: Vec<Affiliation> = Vec::new();
    for line in raw.get_all(Tag::C1) {
        let entry = match parse_address(line) {
            Ok(e) => e,
            Err(e) => {
                diags.push(Diagnostic::new(idx, DiagnosticKind::EmptyAddress, false, e.to_string()));
                continue;
            }
        };
        let country = match extract_country(&entry, &options.aliases, options.strict) {
            Ok(c) => c,
            Err(e) => {
                diags.push(Diagnostic::new(
                    idx,
                    DiagnosticKind::UnrecognizedCountry,
                    false,
                    format!("{e}; affiliation dropped"),
                ));
                continue;
            }
        };
        let institution = canonicalize_name(&entry.address_parts[0], NameKind::Institution);
        let mut linked = Vec::new();
        for name in &entry.author_names {
            let name = canonicalize_name(name, NameKind::Author);
            if authors.contains(&name) {
                linked.push(name);
            } else {
                diags.push(Diagnostic::new(
                    idx,
                    DiagnosticKind::UnlinkedAuthor,
                    false,
                    format!("address names {name:?}, who is not among the authors"),
                ));
            }
        }
        match affiliations
            .iter_mut()
            .find(|a| a.institution == institution && a.country == country)
        {
            Some(existing) => {
                for name in linked {
                    if !existing.linked_authors.contains(&name) {
                        existing.linked_authors.push(name);
                    }
                }
            }
            None => affiliations.push(Affiliation {
                institution,
                country,
                linked_authors: linked,
            }),
        }
    }

    let mut keywords: Vec<String> = Vec::new();
    for line in raw.get_all(Tag::DE).into_iter().chain(raw.get_all(Tag::ID)) {
        for kw in split_multi_value(line) {
            let kw = kw.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if !kw.is_empty() && !keywords.contains(&kw) {
                keywords.push(kw);
            }
        }
    }

    let cited_text = raw.text(Tag::TC).or_else(|| raw.text(Tag::Z9));
    let times_cited = match cited_text {
        None => {
            diags.push(Diagnostic::new(
                idx,
                DiagnosticKind::ImputedTimesCited,
                false,
                "missing value imputed: times_cited = 0",
            ));
            0
        }
        Some(t) => t.trim().parse::<u64>().unwrap_or_else(|_| {
            diags.push(Diagnostic::new(
                idx,
                DiagnosticKind::InvalidTimesCited,
                false,
                format!("times cited {t:?} is not a count; imputed 0"),
            ));
            0
        }),
    };

    let source = raw.text(Tag::SO).unwrap_or_else(|| {
        diags.push(Diagnostic::new(
            idx,
            DiagnosticKind::MissingSource,
            false,
            "record has no source title",
        ));
        String::new()
    });

    let doi = raw.text(Tag::DI).and_then(|d| canonical_doi(&d));
    let id = doi.clone().unwrap_or_else(|| title_hash_id(&title, year));

    let paper = PaperRecord {
        id,
        title,
        doi,
        abstract_text: raw.text(Tag::AB),
        year,
        source,
        publisher: raw.text(Tag::PU),
        authors,
        affiliations,
        keywords,
        times_cited,
    };
    (Some(paper), diags)
}

/// Converts a cleaned record back into the raw field layout, so that it can
/// be written as a tagged file or cleaned again.
pub fn to_raw(paper: &PaperRecord) -> RawRecord {
    let mut raw = RawRecord::new();
    let mut put = |tag: Tag, values: Vec<String>| {
        if !values.is_empty() {
            // only TI/PY are singular and each is pushed once
            raw.push(tag, values).expect("fresh record");
        }
    };
    put(Tag::TI, vec![paper.title.clone()]);
    put(Tag::AF, paper.authors.clone());
    put(
        Tag::SO,
        if paper.source.is_empty() {
            vec![]
        } else {
            vec![paper.source.clone()]
        },
    );
    put(Tag::DE, paper.keywords.clone());
    put(Tag::AB, paper.abstract_text.iter().cloned().collect());
    put(
        Tag::C1,
        paper
            .affiliations
            .iter()
            .map(|a| {
                if a.linked_authors.is_empty() {
                    format!("{}, {}", a.institution, a.country)
                } else {
                    format!("[{}] {}, {}", a.linked_authors.join("; "), a.institution, a.country)
                }
            })
            .collect(),
    );
    put(Tag::PU, paper.publisher.iter().cloned().collect());
    put(Tag::TC, vec![paper.times_cited.to_string()]);
    put(Tag::PY, vec![paper.year.to_string()]);
    put(Tag::DI, paper.doi.iter().cloned().collect());
    raw
}
