//! Topic assignment and per-year trendiness.
//!
//! For a topic in year `y`, `rho` counts matching papers in `y`, `delta`
//! counts matching papers in the look-back window and `n_window` counts all
//! papers in that window. The score is `rho / log2(delta / n_window)`,
//! either as printed ([`TrendMode::Literal`], never positive) or by
//! magnitude ([`TrendMode::Magnitude`], the default), where a topic that was
//! already common in the window ranks higher.

mod topic;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::normalize::PaperRecord;
use crate::relevance::document_tokens;
use crate::scalar::Scalar;

pub use topic::{match_topic, validate_topics, Pattern, PatternToken, TopicVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrendError {
    #[error("delta {delta} exceeds window size {n_window}")]
    DomainError { delta: u64, n_window: u64 },
    #[error("window holds no papers")]
    EmptyWindow,
    #[error("pattern {0:?} has no tokens")]
    EmptyPattern(String),
    #[error("topic {0:?} has no patterns")]
    NoPatterns(String),
    #[error("topic name {0:?} used twice")]
    DuplicateTopic(String),
    #[error("invalid trend option: {0}")]
    InvalidOption(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendMode {
    #[default]
    Magnitude,
    Literal,
}

/// Trendiness of one topic-year.
///
/// `rho = 0` scores 0. Without smoothing, `delta = 0` scores 0 (an emergent
/// topic) and `delta = n_window` scores `+inf`. With `smoothing` the ratio
/// becomes `(delta + 0.5) / (n_window + 1)`, which is finite everywhere.
pub fn trendiness_with<T: Scalar>(
    rho: u64,
    delta: u64,
    n_window: u64,
    mode: TrendMode,
    smoothing: bool,
) -> Result<T, TrendError> {
    if n_window == 0 {
        return Err(TrendError::EmptyWindow);
    }
    if delta > n_window {
        return Err(TrendError::DomainError { delta, n_window });
    }
    if rho == 0 {
        return Ok(T::zero());
    }
    let ratio = if smoothing {
        (T::lit(delta as f64) + T::lit(0.5)) / (T::lit(n_window as f64) + T::one())
    } else {
        if delta == 0 {
            return Ok(T::zero());
        }
        if delta == n_window {
            return Ok(T::infinity());
        }
        T::lit(delta as f64) / T::lit(n_window as f64)
    };
    let log = ratio.log2();
    let rho = T::lit(rho as f64);
    Ok(match mode {
        TrendMode::Literal => rho / log,
        TrendMode::Magnitude => rho / log.abs(),
    })
}

/// [`trendiness_with`] without smoothing.
pub fn trendiness<T: Scalar>(rho: u64, delta: u64, n_window: u64, mode: TrendMode) -> Result<T, TrendError> {
    trendiness_with(rho, delta, n_window, mode, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrendOptions {
    pub window_years: u32,
    pub top_k: usize,
    pub mode: TrendMode,
    /// Window `[y - w + 1, y]` instead of `[y - w, y - 1]`.
    pub inclusive_window: bool,
    pub smoothing: bool,
    /// Count only papers matching at least one topic in `n_window`.
    pub topical_denominator: bool,
}

impl Default for TrendOptions {
    fn default() -> Self {
        TrendOptions {
            window_years: 3,
            top_k: 4,
            mode: TrendMode::Magnitude,
            inclusive_window: false,
            smoothing: false,
            topical_denominator: false,
        }
    }
}

impl TrendOptions {
    pub fn validate(&self) -> Result<(), TrendError> {
        if self.window_years == 0 {
            return Err(TrendError::InvalidOption("window_years must be positive".into()));
        }
        if self.top_k == 0 {
            return Err(TrendError::InvalidOption("top_k must be positive".into()));
        }
        Ok(())
    }

    fn window(&self, year: i32) -> (i32, i32) {
        let w = self.window_years as i32;
        if self.inclusive_window {
            (year - w + 1, year)
        } else {
            (year - w, year - 1)
        }
    }
}

/// Counts and score for one topic in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TrendObservation<T> {
    pub topic: String,
    pub year: i32,
    pub rho: u64,
    pub delta: u64,
    pub n_window: u64,
    /// `None` when the window is empty; `+inf` is written as `"+inf"`.
    #[serde(serialize_with = "ser_score", deserialize_with = "de_score")]
    pub trendiness: Option<T>,
    pub emergent: bool,
    pub insufficient_history: bool,
}

impl<T: Scalar> TrendObservation<T> {
    /// Eligible for a top-k slot: scored, nonzero, with papers this year.
    pub fn is_trending(&self) -> bool {
        self.rho > 0 && self.trendiness.is_some_and(|s| !s.is_zero())
    }
}

fn ser_score<T: Scalar, S: Serializer>(score: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match score {
        None => s.serialize_none(),
        Some(v) if v.is_infinite() && v.is_sign_positive() => s.serialize_str("+inf"),
        Some(v) => v.serialize(s),
    }
}

fn de_score<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<T> {
        Num(T),
        Text(String),
    }
    match Option::<Repr<T>>::deserialize(d)? {
        None => Ok(None),
        Some(Repr::Num(v)) => Ok(Some(v)),
        Some(Repr::Text(t)) if t == "+inf" => Ok(Some(T::infinity())),
        Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("bad score {t:?}"))),
    }
}

/// All topics of one year, best first, plus the retained top entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct YearTrends<T> {
    pub year: i32,
    pub n_window: u64,
    pub insufficient_history: bool,
    pub ranked: Vec<TrendObservation<T>>,
    pub top: Vec<TrendObservation<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TrendTable<T> {
    pub options: TrendOptions,
    /// Ascending by year.
    pub years: Vec<YearTrends<T>>,
}

/// Descending score (`None` last), then descending `rho`, then name.
fn rank_order<T: Scalar>(a: &TrendObservation<T>, b: &TrendObservation<T>) -> Ordering {
    let by_score = match (a.trendiness, b.trendiness) {
        (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_score
        .then_with(|| b.rho.cmp(&a.rho))
        .then_with(|| a.topic.cmp(&b.topic))
}

/// Per-year trend rankings for every year present in `records`.
///
/// Years whose window holds no papers are marked `insufficient_history`
/// and carry no scores. The top list keeps at most `top_k` entries that
/// satisfy [`TrendObservation::is_trending`].
pub fn trend_table<T: Scalar>(
    records: &[PaperRecord],
    topics: &[TopicVector],
    options: &TrendOptions,
) -> Result<TrendTable<T>, TrendError> {
    options.validate()?;
    validate_topics(topics)?;

    let matches: Vec<Vec<bool>> = records
        .par_iter()
        .map(|r| {
            let tokens = document_tokens(r);
            topics.iter().map(|t| t.matches_tokens(&tokens)).collect()
        })
        .collect();

    // year -> (all papers, papers matching any topic, per-topic matches)
    let mut per_year: BTreeMap<i32, (u64, u64, Vec<u64>)> = BTreeMap::new();
    for (record, hits) in records.iter().zip(&matches) {
        let entry = per_year
            .entry(record.year)
            .or_insert_with(|| (0, 0, vec![0; topics.len()]));
        entry.0 += 1;
        if hits.iter().any(|&h| h) {
            entry.1 += 1;
        }
        for (count, &hit) in entry.2.iter_mut().zip(hits) {
            if hit {
                *count += 1;
            }
        }
    }

    let mut years = Vec::with_capacity(per_year.len());
    for (&year, (_, _, rho)) in &per_year {
        let (from, to) = options.window(year);
        let mut n_window = 0;
        let mut delta = vec![0u64; topics.len()];
        for (_, (all, topical, counts)) in per_year.range(from..=to) {
            n_window += if options.topical_denominator { *topical } else { *all };
            for (d, c) in delta.iter_mut().zip(counts) {
                *d += c;
            }
        }
        let insufficient = n_window == 0;
        let mut ranked = Vec::with_capacity(topics.len());
        for (i, topic) in topics.iter().enumerate() {
            let trendiness = if insufficient {
                None
            } else {
                Some(trendiness_with(
                    rho[i],
                    delta[i],
                    n_window,
                    options.mode,
                    options.smoothing,
                )?)
            };
            ranked.push(TrendObservation {
                topic: topic.name.clone(),
                year,
                rho: rho[i],
                delta: delta[i],
                n_window,
                trendiness,
                emergent: delta[i] == 0,
                insufficient_history: insufficient,
            });
        }
        ranked.sort_by(rank_order);
        let top = ranked
            .iter()
            .filter(|o| o.is_trending())
            .take(options.top_k)
            .cloned()
            .collect();
        years.push(YearTrends {
            year,
            n_window,
            insufficient_history: insufficient,
            ranked,
            top,
        });
    }
    Ok(TrendTable {
        options: *options,
        years,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        assert_eq!(trendiness::<f64>(5, 4, 16, TrendMode::Magnitude).unwrap(), 2.5);
        assert_eq!(trendiness::<f64>(5, 4, 16, TrendMode::Literal).unwrap(), -2.5);
    }

    #[test]
    fn edge_rules() {
        assert_eq!(trendiness::<f64>(0, 3, 10, TrendMode::Magnitude).unwrap(), 0.0);
        assert_eq!(trendiness::<f64>(0, 10, 10, TrendMode::Literal).unwrap(), 0.0);
        assert_eq!(trendiness::<f64>(3, 0, 10, TrendMode::Magnitude).unwrap(), 0.0);
        assert_eq!(
            trendiness::<f64>(3, 10, 10, TrendMode::Magnitude).unwrap(),
            f64::INFINITY
        );
        assert_eq!(trendiness::<f64>(3, 10, 10, TrendMode::Literal).unwrap(), f64::INFINITY);
        assert_eq!(
            trendiness::<f64>(1, 11, 10, TrendMode::Magnitude),
            Err(TrendError::DomainError {
                delta: 11,
                n_window: 10
            })
        );
        assert_eq!(
            trendiness::<f64>(1, 0, 0, TrendMode::Magnitude),
            Err(TrendError::EmptyWindow)
        );
    }

    #[test]
    fn smoothing_is_finite() {
        let a = trendiness_with::<f64>(3, 10, 10, TrendMode::Magnitude, true).unwrap();
        let b = trendiness_with::<f64>(3, 0, 10, TrendMode::Magnitude, true).unwrap();
        assert!(a.is_finite() && b.is_finite() && a > b && b > 0.0);
        let expected = 3.0 / ((10.5f64 / 11.0).ln() / 2f64.ln()).abs();
        assert!((a - expected).abs() < 1e-12);
    }

    #[test]
    fn score_serialization() {
        let obs = TrendObservation::<f64> {
            topic: "t".into(),
            year: 2020,
            rho: 1,
            delta: 2,
            n_window: 2,
            trendiness: Some(f64::INFINITY),
            emergent: false,
            insufficient_history: false,
        };
        let text = serde_json::to_string(&obs).unwrap();
        assert!(text.contains(r#""trendiness":"+inf""#));
        let back: TrendObservation<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, obs);
    }
}
