//! Live search-engine hit counts.
//!
//! Both the JSON API client and the result-page scraper go through
//! [`SearchProvider`]; they differ only in how the count is extracted from
//! the response body. Every network query is rate limited, checked against
//! the daily budget first, retried with exponential backoff on transport
//! failures, and appended to the [`QueryCache`].

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use chrono::Utc;
use regex::Regex;
use thiserror::Error;

use super::cache::{CacheRecord, QueryCache};
use super::{CountProvider, ProviderConfig, ProviderError, ProviderKind, RateLimit};
use crate::term::TermMultiset;

#[derive(Debug, Clone, Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String, TransportError>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        UreqTransport { agent }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        let mut resp = self
            .agent
            .get(url)
            .call()
            .map_err(|e| TransportError(e.to_string()))?;
        resp.body_mut()
            .read_to_string()
            .map_err(|e| TransportError(e.to_string()))
    }
}

/// Sliding-window limiter: at most `max_queries` starts per window.
pub struct RateLimiter {
    limit: RateLimit,
    recent: VecDeque<Instant>,
}

impl RateLimiter {
    pub fn new(limit: RateLimit) -> Self {
        RateLimiter {
            limit,
            recent: VecDeque::new(),
        }
    }

    /// Blocks until another query may start, then records it.
    pub fn acquire(&mut self) {
        let window = Duration::from_millis(self.limit.window_ms);
        let max = self.limit.max_queries.max(1) as usize;
        loop {
            let now = Instant::now();
            while let Some(&front) = self.recent.front() {
                if now.duration_since(front) >= window {
                    self.recent.pop_front();
                } else {
                    break;
                }
            }
            if self.recent.len() < max {
                self.recent.push_back(now);
                return;
            }
            let wait = window - now.duration_since(self.recent[0]);
            std::thread::sleep(wait);
        }
    }
}

/// Renders the conjunctive query sent to an engine: terms in canonical
/// order joined by ` AND `, multi-word terms quoted.
pub fn engine_query(x: &TermMultiset) -> String {
    x.items()
        .iter()
        .map(|t| {
            if t.as_str().contains(' ') {
                format!("\"{}\"", t.as_str())
            } else {
                t.as_str().to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(crate::term::QUERY_SEPARATOR)
}

/// Reads the count at `pointer` in a JSON body; numbers and numeric strings
/// are accepted.
pub fn extract_api_count(body: &str, pointer: &str) -> Result<u64, ProviderError> {
    let v: serde_json::Value = serde_json::from_str(body)
        .map_err(|e| ProviderError::ParseFailure(format!("invalid JSON: {e}")))?;
    let found = v
        .pointer(pointer)
        .ok_or_else(|| ProviderError::ParseFailure(format!("no value at {pointer}")))?;
    match found {
        serde_json::Value::Number(n) => n.as_u64(),
        serde_json::Value::String(s) => parse_grouped_number(s),
        _ => None,
    }
    .ok_or_else(|| {
        ProviderError::ParseFailure(format!("value at {pointer} is not a count: {found}"))
    })
}

fn parse_grouped_number(s: &str) -> Option<u64> {
    let digits: String = s.chars().filter(char::is_ascii_digit).collect();
    let rest_ok = s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, ',' | '.' | ' ' | '\u{a0}' | '\u{202f}'));
    if digits.is_empty() || !rest_ok {
        return None;
    }
    digits.parse().ok()
}

/// Extracts the hit count from a result page ("About 130,000,000 results",
/// "20.800.000 results"). Pages announcing no matches give 0.
pub fn extract_html_count(body: &str) -> Result<u64, ProviderError> {
    static COUNT: OnceLock<Regex> = OnceLock::new();
    static NONE: OnceLock<Regex> = OnceLock::new();
    let count = COUNT.get_or_init(|| {
        Regex::new(r"(?i)(\d{1,3}(?:[,.\u{a0}\u{202f} ]\d{3})+|\d+)\s+results?\b").unwrap()
    });
    let none = NONE.get_or_init(|| {
        Regex::new(r"(?i)did not match any documents|no results found for").unwrap()
    });
    if let Some(c) = count.captures(body) {
        return parse_grouped_number(&c[1])
            .ok_or_else(|| ProviderError::ParseFailure(format!("unreadable count {:?}", &c[1])));
    }
    if none.is_match(body) {
        return Ok(0);
    }
    Err(ProviderError::ParseFailure(
        "no result count on page".into(),
    ))
}

pub struct SearchProvider {
    config: ProviderConfig,
    source_id: String,
    api_key: Option<String>,
    transport: Box<dyn Transport>,
    limiter: Mutex<RateLimiter>,
    cache: Arc<QueryCache>,
    issued: AtomicU64,
}

impl SearchProvider {
    pub fn new(config: ProviderConfig, cache: Arc<QueryCache>) -> Result<Self, ProviderError> {
        Self::with_transport(config, cache, Box::new(UreqTransport::default()))
    }

    pub fn with_transport(
        config: ProviderConfig,
        cache: Arc<QueryCache>,
        transport: Box<dyn Transport>,
    ) -> Result<Self, ProviderError> {
        if !matches!(
            config.kind,
            ProviderKind::SearchApi | ProviderKind::SearchScrape
        ) {
            return Err(ProviderError::Config(format!(
                "{:?} is not a search provider",
                config.kind
            )));
        }
        let endpoint = config
            .endpoint
            .as_deref()
            .ok_or_else(|| ProviderError::Config("search provider needs an endpoint".into()))?;
        if !endpoint.contains("{query}") {
            return Err(ProviderError::Config(
                "endpoint has no {query} placeholder".into(),
            ));
        }
        let api_key = match &config.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                ProviderError::Config(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        if endpoint.contains("{key}") && api_key.is_none() {
            return Err(ProviderError::Config(
                "endpoint needs {key} but no api_key_env is configured".into(),
            ));
        }
        let source_id = config
            .source_id
            .clone()
            .unwrap_or_else(|| match config.kind {
                ProviderKind::SearchApi => "search-api".to_string(),
                _ => "search-scrape".to_string(),
            });
        Ok(SearchProvider {
            limiter: Mutex::new(RateLimiter::new(config.rate_limit)),
            config,
            source_id,
            api_key,
            transport,
            cache,
            issued: AtomicU64::new(0),
        })
    }

    /// Network queries issued by this provider so far.
    pub fn queries_issued(&self) -> u64 {
        self.issued.load(Ordering::SeqCst)
    }

    fn url_for(&self, x: &TermMultiset) -> String {
        let endpoint = self.config.endpoint.as_deref().expect("validated");
        let encode =
            |s: &str| url::form_urlencoded::byte_serialize(s.as_bytes()).collect::<String>();
        let mut url = endpoint.replace("{query}", &encode(&engine_query(x)));
        if let Some(key) = &self.api_key {
            url = url.replace("{key}", &encode(key));
        }
        url
    }

    /// Returns the cached count for `x`, or performs one network query,
    /// appends the answer to the cache and returns it.
    pub fn fetch_count(&self, x: &TermMultiset) -> Result<u64, ProviderError> {
        if let Some(c) = self.cache.lookup(&self.source_id, x) {
            return Ok(c);
        }
        if let Some(budget) = self.config.daily_budget {
            let used = self
                .cache
                .records_on(&self.source_id, Utc::now().date_naive());
            if used >= budget {
                return Err(ProviderError::BudgetExhausted { used, budget });
            }
        }
        let url = self.url_for(x);
        let mut attempt = 0;
        let body = loop {
            attempt += 1;
            self.limiter.lock().expect("limiter poisoned").acquire();
            self.issued.fetch_add(1, Ordering::SeqCst);
            match self.transport.get(&url) {
                Ok(body) => break body,
                Err(e) if attempt > self.config.max_retries => {
                    return Err(ProviderError::TransportFailure {
                        attempts: attempt,
                        message: e.0,
                    })
                }
                Err(_) => {
                    let backoff = self
                        .config
                        .retry_base_ms
                        .saturating_mul(1 << (attempt - 1).min(16));
                    std::thread::sleep(Duration::from_millis(backoff));
                }
            }
        };
        let count = match self.config.kind {
            ProviderKind::SearchApi => extract_api_count(&body, &self.config.count_pointer)?,
            _ => extract_html_count(&body)?,
        };
        self.cache.append(&CacheRecord {
            timestamp: Utc::now(),
            source_id: self.source_id.clone(),
            query: x.clone(),
            count,
        })?;
        Ok(count)
    }
}

impl CountProvider for SearchProvider {
    fn source_id(&self) -> &str {
        &self.source_id
    }

    fn count(&self, query: &TermMultiset) -> Result<u64, ProviderError> {
        self.fetch_count(query)
    }
}
