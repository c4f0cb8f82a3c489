use std::borrow::Cow;
use std::collections::HashSet;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::normalize::PaperRecord;

/// Lower-cases `text` and splits it on every non-alphanumeric character.
/// Digits are kept, so `"5G"` yields `"5g"`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Tokens of a record's title, then each keyword, then its abstract.
pub fn document_tokens(record: &PaperRecord) -> Vec<String> {
    let mut tokens = tokenize(&record.title);
    for kw in &record.keywords {
        tokens.extend(tokenize(kw));
    }
    if let Some(a) = &record.abstract_text {
        tokens.extend(tokenize(a));
    }
    tokens
}

/// Optional token filters for relevance scoring. Both are off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenFilters {
    pub stem: bool,
    pub stopwords: bool,
}

const STOPWORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "me",
    "more",
    "most",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "would",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.iter().copied().collect())
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

impl TokenFilters {
    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords && stopwords().contains(token)
    }

    pub fn stem<'a>(&self, token: &'a str) -> Cow<'a, str> {
        if self.stem {
            stemmer().stem(token)
        } else {
            Cow::Borrowed(token)
        }
    }

    /// Drops stopwords and stems what is left.
    pub fn apply(&self, tokens: Vec<String>) -> Vec<String> {
        if !self.stem && !self.stopwords {
            return tokens;
        }
        tokens
            .into_iter()
            .filter(|t| !self.is_stopword(t))
            .map(|t| self.stem(&t).into_owned())
            .collect()
    }
}
