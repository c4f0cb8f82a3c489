//! Okapi BM25 relevance of papers to topic keyword vectors.
//!
//! A paper is the bag of tokens from its title, keywords and abstract. For a
//! query `q_1..q_n`:
//!
//! ```text
//! score(D, Q) = sum_i IDF(q_i) * f(q_i, D) * (k1 + 1)
//!                              / (f(q_i, D) + k1 * (1 - b + b * |D| / avgdl))
//! IDF(q)      = ln((N - n(q) + 0.5) / (n(q) + 0.5) + 1)
//! ```
//!
//! [`bm25_score`] evaluates one document directly; [`Bm25Index`] scores the
//! whole corpus through postings lists and backs [`relevance_matrix`].

mod index;
mod tokenize;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::PaperRecord;
use crate::scalar::Scalar;
use crate::trends::TopicVector;

pub use index::Bm25Index;
pub use tokenize::{document_tokens, tokenize, TokenFilters};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelevanceError {
    #[error("corpus is empty or has zero average document length")]
    EmptyCorpus,
    #[error("invalid BM25 parameter: {0}")]
    InvalidParameter(String),
}

/// Token bag of one paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocVector {
    pub paper_id: String,
    pub tokens: Vec<String>,
    pub length: usize,
}

impl DocVector {
    pub fn new(paper_id: impl Into<String>, tokens: Vec<String>) -> Self {
        let length = tokens.len();
        DocVector {
            paper_id: paper_id.into(),
            tokens,
            length,
        }
    }

    pub fn from_record(record: &PaperRecord, filters: &TokenFilters) -> Self {
        DocVector::new(record.id.clone(), filters.apply(document_tokens(record)))
    }

    pub fn term_frequency(&self, term: &str) -> usize {
        self.tokens.iter().filter(|t| *t == term).count()
    }
}

/// Collection statistics used by BM25.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats<T> {
    pub doc_count: usize,
    pub avgdl: T,
    pub doc_freq: HashMap<String, usize>,
}

impl<T: Scalar> CorpusStats<T> {
    pub fn build(docs: &[DocVector]) -> Self {
        let doc_freq = docs
            .par_iter()
            .map(|d| d.tokens.iter().map(String::as_str).collect::<BTreeSet<&str>>())
            .fold(HashMap::<String, usize>::new, |mut acc, terms| {
                for t in terms {
                    *acc.entry(t.to_owned()).or_default() += 1;
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (t, c) in b {
                    *a.entry(t).or_default() += c;
                }
                a
            });
        let total: usize = docs.iter().map(|d| d.length).sum();
        let avgdl = if docs.is_empty() {
            T::zero()
        } else {
            T::from_count(total) / T::from_count(docs.len())
        };
        CorpusStats {
            doc_count: docs.len(),
            avgdl,
            doc_freq,
        }
    }

    pub fn idf(&self, term: &str) -> T {
        let n = T::from_count(self.doc_count);
        let nq = T::from_count(self.doc_freq.get(term).copied().unwrap_or(0));
        let half = T::lit(0.5);
        ((n - nq + half) / (nq + half) + T::one()).ln()
    }

    fn check(&self) -> Result<(), RelevanceError> {
        if self.doc_count == 0 || self.avgdl <= T::zero() {
            Err(RelevanceError::EmptyCorpus)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Params<T> {
    pub k1: T,
    pub b: T,
}

impl<T: Scalar> Default for Bm25Params<T> {
    fn default() -> Self {
        Bm25Params {
            k1: T::lit(1.2),
            b: T::lit(0.75),
        }
    }
}

impl<T: Scalar> Bm25Params<T> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    pub fn validate(&self) -> Result<(), RelevanceError> {
        if !(self.k1 > T::zero()) {
            return Err(RelevanceError::InvalidParameter(format!(
                "k1 must be positive, got {}",
                self.k1
            )));
        }
        if !(self.b >= T::zero() && self.b <= T::one()) {
            return Err(RelevanceError::InvalidParameter(format!(
                "b must lie in [0, 1], got {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// BM25 score of one document, computed directly from its tokens.
///
/// Query terms absent from the document add nothing; a term repeated in
/// the query is counted once per occurrence.
pub fn bm25_score<T: Scalar>(
    doc: &DocVector,
    query_terms: &[String],
    stats: &CorpusStats<T>,
    params: &Bm25Params<T>,
) -> Result<T, RelevanceError> {
    stats.check()?;
    params.validate()?;
    let norm = params.k1 * (T::one() - params.b + params.b * T::from_count(doc.length) / stats.avgdl);
    let mut score = T::zero();
    for q in query_terms {
        let f = doc.term_frequency(q);
        if f == 0 {
            continue;
        }
        let f = T::from_count(f);
        score += stats.idf(q) * f * (params.k1 + T::one()) / (f + norm);
    }
    Ok(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCell<T> {
    pub score: T,
    /// Dense rank of this topic within the paper's row; `None` for zero.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceRow<T> {
    pub paper_id: String,
    pub cells: Vec<RelevanceCell<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceMatrix<T> {
    pub topics: Vec<String>,
    /// Expanded query terms of each topic, in scoring order.
    pub queries: Vec<Vec<String>>,
    pub rows: Vec<RelevanceRow<T>>,
}

/// Query terms of a topic: every pattern token in order, with wildcard
/// tokens replaced by the matching terms of `vocabulary` (sorted).
pub fn expand_query(topic: &TopicVector, vocabulary: &BTreeSet<&str>, filters: &TokenFilters) -> Vec<String> {
    let mut query = Vec::new();
    for pattern in &topic.patterns {
        for token in &pattern.tokens {
            if filters.is_stopword(&token.text) {
                continue;
            }
            let text = filters.stem(&token.text);
            if token.wildcard {
                query.extend(
                    vocabulary
                        .range(text.as_ref()..)
                        .take_while(|v| v.starts_with(text.as_ref()))
                        .map(|v| v.to_string()),
                );
            } else {
                query.push(text.into_owned());
            }
        }
    }
    query
}

fn dense_ranks<T: Scalar>(scores: &[T]) -> Vec<Option<usize>> {
    let mut distinct: Vec<T> = scores.iter().copied().filter(|s| *s > T::zero()).collect();
    distinct.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    distinct.dedup();
    scores
        .iter()
        .map(|s| (*s > T::zero()).then(|| distinct.iter().position(|d| d == s).expect("score listed") + 1))
        .collect()
}

/// Scores every record against every topic.
pub fn relevance_matrix<T: Scalar>(
    records: &[PaperRecord],
    topics: &[TopicVector],
    params: &Bm25Params<T>,
    filters: &TokenFilters,
) -> Result<RelevanceMatrix<T>, RelevanceError> {
    params.validate()?;
    let docs: Vec<DocVector> = records.par_iter().map(|r| DocVector::from_record(r, filters)).collect();
    let index = Bm25Index::build(&docs, *params)?;
    let vocabulary = index.vocabulary();
    let queries: Vec<Vec<String>> = topics.iter().map(|t| expand_query(t, &vocabulary, filters)).collect();
    let columns: Vec<Vec<T>> = queries.par_iter().map(|q| index.score_all(q)).collect();

    let rows = docs
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let scores: Vec<T> = columns.iter().map(|c| c[d]).collect();
            let ranks = dense_ranks(&scores);
            RelevanceRow {
                paper_id: doc.paper_id.clone(),
                cells: scores
                    .into_iter()
                    .zip(ranks)
                    .map(|(score, rank)| RelevanceCell { score, rank })
                    .collect(),
            }
        })
        .collect();
    Ok(RelevanceMatrix {
        topics: topics.iter().map(|t| t.name.clone()).collect(),
        queries,
        rows,
    })
}
