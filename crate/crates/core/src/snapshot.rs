//! Immutable count snapshots: the only input the distance functions see.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::TermMultiset;

/// Average number of search terms per indexed page, used to scale a
/// page-total estimate `M` into the normalizer `N = α·M`.
pub const DEFAULT_TERMS_PER_PAGE: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapshotError {
    #[error("cannot derive a normalizer: no N, no page total and no singleton counts")]
    NoNormalizer,
    #[error("normalizer must be positive (got {0})")]
    ZeroNormalizer(u64),
    #[error("terms-per-page factor must be positive and finite (got {0})")]
    InvalidAlpha(f64),
}

/// One stored count, as it appears in serialized snapshots and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub query: TermMultiset,
    pub count: u64,
}

/// Counts for canonical multisets plus the normalizer `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SnapshotRepr", into = "SnapshotRepr")]
pub struct FrequencySnapshot {
    source_id: String,
    counts: BTreeMap<TermMultiset, u64>,
    normalizer_n: u64,
    page_total_m: Option<u64>,
    terms_per_page_alpha: Option<f64>,
}

impl FrequencySnapshot {
    pub fn builder(source_id: impl Into<String>) -> SnapshotBuilder {
        SnapshotBuilder {
            source_id: source_id.into(),
            counts: BTreeMap::new(),
            normalizer_n: None,
            page_total_m: None,
            terms_per_page_alpha: None,
        }
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn normalizer(&self) -> u64 {
        self.normalizer_n
    }

    pub fn page_total(&self) -> Option<u64> {
        self.page_total_m
    }

    pub fn terms_per_page(&self) -> Option<f64> {
        self.terms_per_page_alpha
    }

    pub fn count(&self, query: &TermMultiset) -> Option<u64> {
        self.counts.get(query).copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = CountEntry> + '_ {
        self.counts.iter().map(|(q, &c)| CountEntry {
            query: q.clone(),
            count: c,
        })
    }

    /// Same counts with a different normalizer.
    pub fn with_normalizer(&self, n: u64) -> Result<Self, SnapshotError> {
        if n == 0 {
            return Err(SnapshotError::ZeroNormalizer(n));
        }
        Ok(FrequencySnapshot {
            normalizer_n: n,
            ..self.clone()
        })
    }

    /// Restriction to the given queries (those present are kept).
    pub fn restricted<'a, I>(&self, queries: I) -> Self
    where
        I: IntoIterator<Item = &'a TermMultiset>,
    {
        let counts = queries
            .into_iter()
            .filter_map(|q| self.counts.get(q).map(|&c| (q.clone(), c)))
            .collect();
        FrequencySnapshot {
            counts,
            ..self.clone()
        }
    }
}

pub struct SnapshotBuilder {
    source_id: String,
    counts: BTreeMap<TermMultiset, u64>,
    normalizer_n: Option<u64>,
    page_total_m: Option<u64>,
    terms_per_page_alpha: Option<f64>,
}

impl SnapshotBuilder {
    pub fn count(mut self, query: TermMultiset, count: u64) -> Self {
        self.counts.insert(query, count);
        self
    }

    pub fn counts<I: IntoIterator<Item = (TermMultiset, u64)>>(mut self, counts: I) -> Self {
        self.counts.extend(counts);
        self
    }

    pub fn insert(&mut self, query: TermMultiset, count: u64) {
        self.counts.insert(query, count);
    }

    pub fn contains(&self, query: &TermMultiset) -> bool {
        self.counts.contains_key(query)
    }

    pub fn normalizer(mut self, n: u64) -> Self {
        self.normalizer_n = Some(n);
        self
    }

    pub fn maybe_normalizer(mut self, n: Option<u64>) -> Self {
        if n.is_some() {
            self.normalizer_n = n;
        }
        self
    }

    pub fn page_total(mut self, m: Option<u64>) -> Self {
        self.page_total_m = m;
        self
    }

    pub fn terms_per_page(mut self, alpha: Option<f64>) -> Self {
        self.terms_per_page_alpha = alpha;
        self
    }

    /// Resolves `N`: an explicit normalizer wins; otherwise `α·M` when a
    /// page total is known; otherwise `α` times the largest singleton count.
    /// `α` defaults to [`DEFAULT_TERMS_PER_PAGE`].
    pub fn build(self) -> Result<FrequencySnapshot, SnapshotError> {
        let alpha = self.terms_per_page_alpha.unwrap_or(DEFAULT_TERMS_PER_PAGE);
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SnapshotError::InvalidAlpha(alpha));
        }
        let n = match (self.normalizer_n, self.page_total_m) {
            (Some(n), _) => n,
            (None, Some(m)) => (alpha * m as f64).round() as u64,
            (None, None) => {
                let max_single = self
                    .counts
                    .iter()
                    .filter(|(q, _)| q.len() == 1)
                    .map(|(_, &c)| c)
                    .max()
                    .ok_or(SnapshotError::NoNormalizer)?;
                (alpha * max_single as f64).round() as u64
            }
        };
        if n == 0 {
            return Err(SnapshotError::ZeroNormalizer(n));
        }
        Ok(FrequencySnapshot {
            source_id: self.source_id,
            counts: self.counts,
            normalizer_n: n,
            page_total_m: self.page_total_m,
            terms_per_page_alpha: self.terms_per_page_alpha,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotRepr {
    source_id: String,
    normalizer_n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    page_total_m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms_per_page_alpha: Option<f64>,
    counts: Vec<CountEntry>,
}

impl TryFrom<SnapshotRepr> for FrequencySnapshot {
    type Error = SnapshotError;

    fn try_from(r: SnapshotRepr) -> Result<Self, Self::Error> {
        FrequencySnapshot::builder(r.source_id)
            .counts(r.counts.into_iter().map(|e| (e.query, e.count)))
            .normalizer(r.normalizer_n)
            .page_total(r.page_total_m)
            .terms_per_page(r.terms_per_page_alpha)
            .build()
    }
}

impl From<FrequencySnapshot> for SnapshotRepr {
    fn from(s: FrequencySnapshot) -> Self {
        let counts = s.entries().collect();
        SnapshotRepr {
            source_id: s.source_id,
            normalizer_n: s.normalizer_n,
            page_total_m: s.page_total_m,
            terms_per_page_alpha: s.terms_per_page_alpha,
            counts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> TermMultiset {
        TermMultiset::parse_query(s).unwrap()
    }

    #[test]
    fn normalizer_resolution_order() {
        let base = || {
            FrequencySnapshot::builder("t")
                .count(q("shakespeare"), 130_000_000)
                .count(q("macbeth"), 26_000_000)
        };
        assert_eq!(base().normalizer(7).build().unwrap().normalizer(), 7);
        let from_m = base().page_total(Some(25_270_000_000)).build().unwrap();
        assert_eq!(from_m.normalizer(), 25_270_000_000_000);
        let from_m_alpha = base()
            .page_total(Some(100))
            .terms_per_page(Some(2.5))
            .build()
            .unwrap();
        assert_eq!(from_m_alpha.normalizer(), 250);
        assert_eq!(base().build().unwrap().normalizer(), 130_000_000_000);
    }

    #[test]
    fn normalizer_errors() {
        assert_eq!(
            FrequencySnapshot::builder("t").build().unwrap_err(),
            SnapshotError::NoNormalizer
        );
        assert_eq!(
            FrequencySnapshot::builder("t")
                .normalizer(0)
                .build()
                .unwrap_err(),
            SnapshotError::ZeroNormalizer(0)
        );
        assert!(matches!(
            FrequencySnapshot::builder("t")
                .normalizer(5)
                .terms_per_page(Some(-1.0))
                .build(),
            Err(SnapshotError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = FrequencySnapshot::builder("g")
            .count(q("red AND red AND red"), 5_510_000_000)
            .count(q("red"), 4_260_000_000)
            .normalizer(25_270_000_000_000)
            .page_total(Some(25_270_000_000))
            .build()
            .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"query\":\"red AND red AND red\""));
        let back: FrequencySnapshot = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
