//! Turning a [`RunConfig`] into counts.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use ngd_core::providers::{
    collect_snapshot, ingest_corpus, read_corpus, CorpusIndex, CountProvider, NormalizerSettings,
    ProviderError, ProviderKind, QueryCache, SearchProvider, Tokenizer,
};
use ngd_core::{ngd_queries, FrequencySnapshot, NgdOptions, Term, TermMultiset};

use crate::config::RunConfig;
use crate::error::CliError;

/// Counts answered from the cache alone; a miss is an error, never a
/// network request.
pub struct CachedSource {
    cache: Arc<QueryCache>,
    source_id: String,
}

impl CountProvider for CachedSource {
    fn source_id(&self) -> &str {
        &self.source_id
    }

    fn count(&self, query: &TermMultiset) -> Result<u64, ProviderError> {
        self.cache
            .lookup(&self.source_id, query)
            .ok_or_else(|| ProviderError::NotCached {
                source_id: self.source_id.clone(),
                query: query.clone(),
            })
    }
}

fn open_cache(cfg: &RunConfig) -> Result<Arc<QueryCache>, CliError> {
    Ok(Arc::new(match &cfg.cache {
        Some(path) => QueryCache::open(path)?,
        None => QueryCache::in_memory(),
    }))
}

fn cached_source(cfg: &RunConfig) -> Result<CachedSource, CliError> {
    match &cfg.cache {
        None => return Err(CliError::Usage("the cache provider needs --cache".into())),
        Some(p) if !p.exists() => return Err(ProviderError::MissingFile(p.clone()).into()),
        Some(_) => {}
    }
    let cache = open_cache(cfg)?;
    let source_id = match &cfg.provider.source_id {
        Some(s) => s.clone(),
        None => {
            let sources = cache.sources();
            match sources.len() {
                1 => sources.into_iter().next().expect("one source"),
                0 => return Err(CliError::Data("cache holds no records".into())),
                _ => {
                    return Err(CliError::Usage(format!(
                        "cache holds several sources ({}); pick one with --source",
                        sources.into_iter().collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
    };
    Ok(CachedSource { cache, source_id })
}

/// Reads and indexes every configured corpus path, in order.
pub fn corpus_index(cfg: &RunConfig) -> Result<CorpusIndex, CliError> {
    if cfg.provider.paths.is_empty() {
        return Err(CliError::Usage("the corpus provider needs --corpus".into()));
    }
    let mut docs = Vec::new();
    for p in &cfg.provider.paths {
        docs.extend(read_corpus(p)?);
    }
    let index = ingest_corpus(docs, Tokenizer::default())?;
    Ok(match &cfg.provider.source_id {
        Some(s) => index.with_source_id(s.clone()),
        None => index,
    })
}

/// Adds whatever [`ngd`](ngd_core::ngd) reads beyond `queries` under `opts`.
pub fn expand<'a, I>(queries: I, opts: NgdOptions) -> BTreeSet<TermMultiset>
where
    I: IntoIterator<Item = &'a TermMultiset>,
{
    let mut out = BTreeSet::new();
    for q in queries {
        out.insert(q.clone());
        if q.len() >= 2 {
            out.extend(ngd_queries(q, opts));
        }
    }
    out
}

fn settings(cfg: &RunConfig, page_total: Option<u64>) -> NormalizerSettings {
    NormalizerSettings {
        normalizer_n: cfg.normalizer_n,
        page_total_m: cfg.page_total_m.or(page_total),
        terms_per_page_alpha: cfg.terms_per_page_alpha,
    }
}

/// Count of the probe term, taken from the cache only.
fn probe_count(
    cfg: &RunConfig,
    cache: &QueryCache,
    source_id: &str,
) -> Result<Option<u64>, CliError> {
    if cfg.page_total_m.is_some() || cfg.normalizer_n.is_some() {
        return Ok(None);
    }
    if cfg.page_total_probe.trim().is_empty() {
        return Ok(None);
    }
    let probe = TermMultiset::singleton(Term::new(&cfg.page_total_probe)?);
    Ok(cache.lookup(source_id, &probe))
}

/// Collects a snapshot holding exactly `queries` from the configured provider.
pub fn collect(
    cfg: &RunConfig,
    queries: &BTreeSet<TermMultiset>,
) -> Result<FrequencySnapshot, CliError> {
    match cfg.provider.kind {
        ProviderKind::CacheOnly => {
            let source = cached_source(cfg)?;
            let m = probe_count(cfg, &source.cache, &source.source_id)?;
            Ok(collect_snapshot(&source, queries, settings(cfg, m))?)
        }
        ProviderKind::SearchApi | ProviderKind::SearchScrape => {
            let cache = open_cache(cfg)?;
            let provider = SearchProvider::new(cfg.provider.clone(), cache.clone())?;
            let m = probe_count(cfg, &cache, provider.source_id())?;
            Ok(collect_snapshot(&provider, queries, settings(cfg, m))?)
        }
        ProviderKind::LocalCorpus => {
            let index = corpus_index(cfg)?;
            Ok(collect_snapshot(&index, queries, settings(cfg, None))?)
        }
        ProviderKind::NgramFiles => {
            let terms: BTreeSet<Term> = queries
                .iter()
                .flat_map(|q| q.items().iter().cloned())
                .collect();
            let terms: Vec<Term> = terms.into_iter().collect();
            let (snap, _) = ngram_snapshot(cfg, &cfg.provider.paths, &terms)?;
            let missing = queries.iter().find(|q| snap.count(q).is_none());
            if let Some(q) = missing {
                return Err(ProviderError::NotCached {
                    source_id: snap.source_id().to_string(),
                    query: q.clone(),
                }
                .into());
            }
            Ok(snap.restricted(queries))
        }
    }
}

/// One scanned n-gram file.
pub struct ScannedFile {
    pub path: PathBuf,
    pub order: usize,
}

pub struct NgramScan {
    pub files: Vec<ScannedFile>,
    pub counts: ngd_core::providers::NgramCounts,
}

/// Scans `paths`, telling 1-gram from 5-gram files by their first valid line.
pub fn ngram_snapshot(
    cfg: &RunConfig,
    paths: &[PathBuf],
    terms: &[Term],
) -> Result<(FrequencySnapshot, NgramScan), CliError> {
    use ngd_core::providers::ngram::{detect_order, ngram_counts};
    let mut ones = Vec::new();
    let mut fives = Vec::new();
    let mut files = Vec::new();
    for p in paths {
        let order = match detect_order(p)? {
            Some(1) => {
                ones.push(p.clone());
                1
            }
            Some(5) => {
                fives.push(p.clone());
                5
            }
            Some(k) => {
                return Err(CliError::Data(format!(
                    "{}: {k}-gram files are not supported",
                    p.display()
                )))
            }
            None => {
                return Err(CliError::Data(format!(
                    "{}: no valid n-gram line",
                    p.display()
                )))
            }
        };
        files.push(ScannedFile {
            path: p.clone(),
            order,
        });
    }
    if ones.is_empty() || fives.is_empty() {
        return Err(CliError::Usage(
            "need at least one 1-gram and one 5-gram file".into(),
        ));
    }
    let counts = ngram_counts(&ones, &fives, terms)?;
    let source_id = cfg
        .provider
        .source_id
        .clone()
        .unwrap_or_else(|| "ngram".to_string());
    let snap = counts.to_snapshot(&source_id, cfg.normalizer_n, cfg.terms_per_page_alpha)?;
    Ok((snap, NgramScan { files, counts }))
}
