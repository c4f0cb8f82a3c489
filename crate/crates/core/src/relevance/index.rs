use std::collections::{BTreeSet, HashMap};

use super::{Bm25Params, CorpusStats, DocVector, RelevanceError};
use crate::scalar::Scalar;

/// Inverted index over a fixed corpus for repeated BM25 queries.
#[derive(Debug, Clone)]
pub struct Bm25Index<T> {
    stats: CorpusStats<T>,
    params: Bm25Params<T>,
    /// term -> (document, term frequency), documents ascending
    postings: HashMap<String, Vec<(usize, usize)>>,
    /// `k1 * (1 - b + b * |D| / avgdl)` per document
    length_norm: Vec<T>,
}

impl<T: Scalar> Bm25Index<T> {
    pub fn build(docs: &[DocVector], params: Bm25Params<T>) -> Result<Self, RelevanceError> {
        params.validate()?;
        let stats = CorpusStats::build(docs);
        stats.check()?;
        let mut postings: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
        for (d, doc) in docs.iter().enumerate() {
            let mut tf: HashMap<&str, usize> = HashMap::new();
            for t in &doc.tokens {
                *tf.entry(t).or_default() += 1;
            }
            for (t, f) in tf {
                postings.entry(t.to_owned()).or_default().push((d, f));
            }
        }
        let length_norm = docs
            .iter()
            .map(|doc| params.k1 * (T::one() - params.b + params.b * T::from_count(doc.length) / stats.avgdl))
            .collect();
        Ok(Bm25Index {
            stats,
            params,
            postings,
            length_norm,
        })
    }

    pub fn stats(&self) -> &CorpusStats<T> {
        &self.stats
    }

    pub fn doc_count(&self) -> usize {
        self.length_norm.len()
    }

    /// Every indexed term, sorted.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.postings.keys().map(String::as_str).collect()
    }

    /// Scores of all documents for `query`, by document index.
    pub fn score_all(&self, query: &[String]) -> Vec<T> {
        let mut scores = vec![T::zero(); self.doc_count()];
        let k1p1 = self.params.k1 + T::one();
        for q in query {
            let Some(list) = self.postings.get(q) else { continue };
            let idf = self.stats.idf(q);
            for &(d, f) in list {
                let f = T::from_count(f);
                scores[d] += idf * f * k1p1 / (f + self.length_norm[d]);
            }
        }
        scores
    }

    pub fn score(&self, doc: usize, query: &[String]) -> T {
        let k1p1 = self.params.k1 + T::one();
        let mut score = T::zero();
        for q in query {
            let Some(list) = self.postings.get(q) else { continue };
            if let Ok(pos) = list.binary_search_by_key(&doc, |&(d, _)| d) {
                let f = T::from_count(list[pos].1);
                score += self.stats.idf(q) * f * k1p1 / (f + self.length_norm[doc]);
            }
        }
        score
    }
}
