//! Frequency providers: everything that turns queries into counts.
//!
//! * [`search`]: live search-engine hit counts (JSON API or result page),
//!   rate limited, budgeted and backed by the [`cache`].
//! * [`corpus`]: a deterministic inverted index over local documents.
//! * [`ngram`]: streaming extraction from Google Books n-gram files.
//! * [`cache`]: the append-only on-disk query cache.

pub mod cache;
pub mod corpus;
pub mod ngram;
pub mod search;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snapshot::{FrequencySnapshot, SnapshotError};
use crate::term::TermMultiset;

pub use cache::{CacheRecord, QueryCache};
pub use corpus::{ingest_corpus, read_corpus, CorpusIndex, Tokenizer};
pub use ngram::{ngram_counts, NgramCounts};
pub use search::{SearchProvider, Transport, TransportError, UreqTransport};

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("daily query budget exhausted ({used} of {budget} used)")]
    BudgetExhausted { used: u32, budget: u32 },
    #[error("transport failure after {attempts} attempt(s): {message}")]
    TransportFailure { attempts: u32, message: String },
    #[error("response has no recognizable result count: {0}")]
    ParseFailure(String),
    #[error("no cached count for \"{query}\" from source \"{source_id}\"")]
    NotCached {
        source_id: String,
        query: TermMultiset,
    },
    #[error("duplicate document id \"{0}\"")]
    DuplicateDocId(String),
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}:{line}: {reason}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("provider configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

impl ProviderError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            ProviderError::MissingFile(path)
        } else {
            ProviderError::Io { path, source }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    SearchApi,
    SearchScrape,
    LocalCorpus,
    NgramFiles,
    #[default]
    CacheOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateLimit {
    pub max_queries: u32,
    pub window_ms: u64,
}

impl Default for RateLimit {
    fn default() -> Self {
        RateLimit {
            max_queries: 1,
            window_ms: 1000,
        }
    }
}

/// Where counts come from and how the provider may be used.
///
/// The API key itself is never stored here, only the name of the
/// environment variable holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub source_id: Option<String>,
    /// URL template for search providers; `{query}` and `{key}` are substituted.
    pub endpoint: Option<String>,
    /// JSON pointer to the result count in API responses.
    pub count_pointer: String,
    pub paths: Vec<PathBuf>,
    pub api_key_env: Option<String>,
    pub rate_limit: RateLimit,
    pub daily_budget: Option<u32>,
    pub max_retries: u32,
    pub retry_base_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::CacheOnly,
            source_id: None,
            endpoint: None,
            count_pointer: "/searchInformation/totalResults".to_string(),
            paths: Vec::new(),
            api_key_env: None,
            rate_limit: RateLimit::default(),
            daily_budget: None,
            max_retries: 3,
            retry_base_ms: 500,
        }
    }
}

/// Anything that can answer "how many pages contain all of these terms".
pub trait CountProvider {
    fn source_id(&self) -> &str;

    fn count(&self, query: &TermMultiset) -> Result<u64, ProviderError>;

    /// A normalizer the provider defines itself (e.g. a local corpus).
    fn normalizer(&self) -> Option<u64> {
        None
    }

    /// Page-total estimate `M`, when the provider knows it.
    fn page_total(&self) -> Option<u64> {
        None
    }
}

impl CountProvider for FrequencySnapshot {
    fn source_id(&self) -> &str {
        FrequencySnapshot::source_id(self)
    }

    fn count(&self, query: &TermMultiset) -> Result<u64, ProviderError> {
        FrequencySnapshot::count(self, query).ok_or_else(|| ProviderError::NotCached {
            source_id: self.source_id().to_string(),
            query: query.clone(),
        })
    }

    fn normalizer(&self) -> Option<u64> {
        Some(FrequencySnapshot::normalizer(self))
    }

    fn page_total(&self) -> Option<u64> {
        FrequencySnapshot::page_total(self)
    }
}

/// How the normalizer of a collected snapshot is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizerSettings {
    pub normalizer_n: Option<u64>,
    pub page_total_m: Option<u64>,
    pub terms_per_page_alpha: Option<f64>,
}

/// Queries `provider` for every query (in the given order, once each) and
/// freezes the answers into a snapshot.
pub fn collect_snapshot<'a, P, I>(
    provider: &P,
    queries: I,
    settings: NormalizerSettings,
) -> Result<FrequencySnapshot, ProviderError>
where
    P: CountProvider + ?Sized,
    I: IntoIterator<Item = &'a TermMultiset>,
{
    let mut builder = FrequencySnapshot::builder(provider.source_id());
    for q in queries {
        if builder.contains(q) {
            continue;
        }
        let c = provider.count(q)?;
        builder.insert(q.clone(), c);
    }
    let builder = builder
        .maybe_normalizer(provider.normalizer())
        .maybe_normalizer(settings.normalizer_n)
        .page_total(settings.page_total_m.or(provider.page_total()))
        .terms_per_page(settings.terms_per_page_alpha);
    Ok(builder.build()?)
}
