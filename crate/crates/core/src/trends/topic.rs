use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::TrendError;
use crate::normalize::PaperRecord;
use crate::relevance::{document_tokens, tokenize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternToken {
    pub text: String,
    /// Trailing `*`: matches any token starting with `text`.
    pub wildcard: bool,
}

impl PatternToken {
    pub fn matches(&self, token: &str) -> bool {
        if self.wildcard {
            token.starts_with(&self.text)
        } else {
            token == self.text
        }
    }
}

/// A keyword phrase such as `"Convolution* Net*"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub source: String,
    pub tokens: Vec<PatternToken>,
}

impl Pattern {
    pub fn parse(source: &str) -> Result<Pattern, TrendError> {
        let mut tokens = Vec::new();
        for chunk in source.split_whitespace() {
            let wildcard = chunk.ends_with('*');
            let mut parts = tokenize(chunk);
            if let Some(last) = parts.pop() {
                tokens.extend(parts.into_iter().map(|text| PatternToken { text, wildcard: false }));
                tokens.push(PatternToken { text: last, wildcard });
            }
        }
        if tokens.is_empty() {
            return Err(TrendError::EmptyPattern(source.to_owned()));
        }
        Ok(Pattern {
            source: source.to_owned(),
            tokens,
        })
    }

    /// Whether the phrase occurs as a contiguous run of `doc`.
    pub fn occurs_in(&self, doc: &[String]) -> bool {
        let k = self.tokens.len();
        doc.len() >= k
            && doc
                .windows(k)
                .any(|w| w.iter().zip(&self.tokens).all(|(t, p)| p.matches(t)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TopicSpec {
    name: String,
    patterns: Vec<String>,
}

/// A named research topic defined by keyword patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopicSpec", into = "TopicSpec")]
pub struct TopicVector {
    pub name: String,
    pub patterns: Vec<Pattern>,
}

impl TryFrom<TopicSpec> for TopicVector {
    type Error = TrendError;
    fn try_from(raw: TopicSpec) -> Result<Self, Self::Error> {
        TopicVector::new(raw.name, &raw.patterns)
    }
}

impl From<TopicVector> for TopicSpec {
    fn from(t: TopicVector) -> Self {
        TopicSpec {
            name: t.name,
            patterns: t.patterns.into_iter().map(|p| p.source).collect(),
        }
    }
}

impl TopicVector {
    pub fn new<S: AsRef<str>>(name: impl Into<String>, patterns: &[S]) -> Result<Self, TrendError> {
        let name = name.into();
        if patterns.is_empty() {
            return Err(TrendError::NoPatterns(name));
        }
        let patterns = patterns
            .iter()
            .map(|p| Pattern::parse(p.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TopicVector { name, patterns })
    }

    pub fn matches_tokens(&self, doc: &[String]) -> bool {
        self.patterns.iter().any(|p| p.occurs_in(doc))
    }
}

/// Checks that topic names are unique.
pub fn validate_topics(topics: &[TopicVector]) -> Result<(), TrendError> {
    let mut seen = HashSet::new();
    for t in topics {
        if !seen.insert(t.name.as_str()) {
            return Err(TrendError::DuplicateTopic(t.name.clone()));
        }
    }
    Ok(())
}

/// Whether any pattern of `topic` occurs in the record's title, keywords
/// and abstract (casefolded, tokenized, in that order).
pub fn match_topic(record: &PaperRecord, topic: &TopicVector) -> bool {
    topic.matches_tokens(&document_tokens(record))
}
