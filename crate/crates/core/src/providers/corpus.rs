//! Deterministic local-corpus provider: an inverted index over documents.
//!
//! `f(X)` is the number of documents containing every distinct term of `X`;
//! a document counts once no matter how often a term repeats in it. The
//! normalizer is the sum of all posting-list lengths, i.e. every document
//! counted once per distinct term it contains.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{CountProvider, ProviderError};
use crate::term::{Term, TermMultiset};

/// Splits text into lowercase alphanumeric tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tokenizer {
    pub min_token_len: usize,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer { min_token_len: 1 }
    }
}

impl Tokenizer {
    pub fn tokens<'a>(&self, text: &'a str) -> impl Iterator<Item = String> + 'a {
        let min = self.min_token_len.max(1);
        text.split(|c: char| !c.is_alphanumeric())
            .filter(move |w| w.chars().count() >= min)
            .map(str::to_lowercase)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusIndex {
    source_id: String,
    doc_ids: Vec<String>,
    postings: BTreeMap<Term, Vec<u32>>,
    doc_total: u64,
    normalizer: u64,
}

/// Builds the index. Documents without any token are ingested but are not
/// counted as indexed pages.
pub fn ingest_corpus<I>(docs: I, tokenizer: Tokenizer) -> Result<CorpusIndex, ProviderError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut seen = HashSet::new();
    let mut doc_ids = Vec::new();
    let mut postings: BTreeMap<Term, Vec<u32>> = BTreeMap::new();
    let mut doc_total = 0u64;
    for (id, text) in docs {
        if !seen.insert(id.clone()) {
            return Err(ProviderError::DuplicateDocId(id));
        }
        let doc = doc_ids.len() as u32;
        doc_ids.push(id);
        let words: BTreeSet<String> = tokenizer.tokens(&text).collect();
        if !words.is_empty() {
            doc_total += 1;
        }
        for w in words {
            let term = Term::new(&w).expect("tokens are nonempty");
            postings.entry(term).or_default().push(doc);
        }
    }
    if doc_ids.is_empty() {
        return Err(ProviderError::EmptyCorpus);
    }
    let normalizer = postings.values().map(|p| p.len() as u64).sum();
    Ok(CorpusIndex {
        source_id: "corpus".to_string(),
        doc_ids,
        postings,
        doc_total,
        normalizer,
    })
}

impl CorpusIndex {
    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    /// Number of ingested documents.
    pub fn documents(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    /// Documents holding at least one token (the page total `M`).
    pub fn doc_total(&self) -> u64 {
        self.doc_total
    }

    /// `N = Σ_x |postings(x)|`.
    pub fn normalizer(&self) -> u64 {
        self.normalizer
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = (&Term, u64)> {
        self.postings.iter().map(|(t, p)| (t, p.len() as u64))
    }

    pub fn postings(&self, term: &Term) -> &[u32] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Size of the intersection of the posting lists of the distinct terms of
    /// `x`. Unknown terms (including multi-word phrases) give 0.
    pub fn corpus_count(&self, x: &TermMultiset) -> u64 {
        let mut lists: Vec<&[u32]> = x.distinct().map(|t| self.postings(t)).collect();
        lists.sort_by_key(|l| l.len());
        let (first, rest) = lists.split_first().expect("multisets are nonempty");
        first
            .iter()
            .filter(|d| rest.iter().all(|l| l.binary_search(d).is_ok()))
            .count() as u64
    }
}

impl CountProvider for CorpusIndex {
    fn source_id(&self) -> &str {
        &self.source_id
    }

    fn count(&self, query: &TermMultiset) -> Result<u64, ProviderError> {
        Ok(self.corpus_count(query))
    }

    fn normalizer(&self) -> Option<u64> {
        Some(self.normalizer)
    }

    fn page_total(&self) -> Option<u64> {
        Some(self.doc_total)
    }
}

#[derive(Deserialize)]
struct JsonDoc {
    id: String,
    text: String,
}

/// Reads a corpus: either a directory of plain-text files (id = file name,
/// visited in sorted order, recursing into subdirectories) or a JSON-lines
/// file of `{"id": ..., "text": ...}` records.
pub fn read_corpus(path: &Path) -> Result<Vec<(String, String)>, ProviderError> {
    let meta = fs::metadata(path).map_err(|e| ProviderError::io(path, e))?;
    if meta.is_dir() {
        let mut files = Vec::new();
        collect_files(path, path, &mut files)?;
        files.sort();
        files
            .into_iter()
            .map(|rel| {
                let full = path.join(&rel);
                let text = fs::read_to_string(&full).map_err(|e| ProviderError::io(&full, e))?;
                Ok((rel, text))
            })
            .collect()
    } else {
        let text = fs::read_to_string(path).map_err(|e| ProviderError::io(path, e))?;
        let mut docs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: JsonDoc = serde_json::from_str(line).map_err(|e| ProviderError::Format {
                path: path.to_path_buf(),
                line: i + 1,
                reason: e.to_string(),
            })?;
            docs.push((doc.id, doc.text));
        }
        Ok(docs)
    }
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), ProviderError> {
    for entry in fs::read_dir(dir).map_err(|e| ProviderError::io(dir, e))? {
        let entry = entry.map_err(|e| ProviderError::io(dir, e))?;
        let p = entry.path();
        if p.is_dir() {
            collect_files(root, &p, out)?;
        } else if p.is_file() {
            let rel = p.strip_prefix(root).unwrap_or(&p);
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> TermMultiset {
        TermMultiset::parse_query(s).unwrap()
    }

    fn two_docs() -> CorpusIndex {
        ingest_corpus(
            vec![
                ("d1".to_string(), "red fox".to_string()),
                ("d2".to_string(), "red sea".to_string()),
            ],
            Tokenizer::default(),
        )
        .unwrap()
    }

    #[test]
    fn two_document_counts() {
        let idx = two_docs();
        assert_eq!(idx.corpus_count(&q("red")), 2);
        assert_eq!(idx.corpus_count(&q("fox")), 1);
        assert_eq!(idx.corpus_count(&q("fox AND red")), 1);
        assert_eq!(idx.corpus_count(&q("fox AND red AND sea")), 0);
        assert_eq!(idx.corpus_count(&q("fox AND fox")), 1);
        assert_eq!(idx.corpus_count(&q("wolf")), 0);
        assert_eq!(idx.normalizer(), 4);
        assert_eq!(idx.doc_total(), 2);
    }

    #[test]
    fn repeated_words_count_once() {
        let idx = ingest_corpus(
            vec![("d".to_string(), "Red red RED fox".to_string())],
            Tokenizer::default(),
        )
        .unwrap();
        assert_eq!(idx.corpus_count(&q("red")), 1);
        assert_eq!(idx.normalizer(), 2);
    }

    #[test]
    fn ingest_errors() {
        assert!(matches!(
            ingest_corpus(Vec::new(), Tokenizer::default()),
            Err(ProviderError::EmptyCorpus)
        ));
        let dup = vec![
            ("a".to_string(), "x".to_string()),
            ("a".to_string(), "y".to_string()),
        ];
        assert!(matches!(
            ingest_corpus(dup, Tokenizer::default()),
            Err(ProviderError::DuplicateDocId(id)) if id == "a"
        ));
    }

    #[test]
    fn empty_documents_are_not_pages() {
        let idx = ingest_corpus(
            vec![
                ("a".to_string(), "...".to_string()),
                ("b".to_string(), "cat".to_string()),
            ],
            Tokenizer::default(),
        )
        .unwrap();
        assert_eq!(idx.documents(), 2);
        assert_eq!(idx.doc_total(), 1);
        assert!(idx.normalizer() >= idx.doc_total());
    }

    #[test]
    fn tokenizer_min_length() {
        let tok = Tokenizer { min_token_len: 3 };
        let words: Vec<_> = tok.tokens("a cat, an Owl; ox-bow").collect();
        assert_eq!(words, vec!["cat", "owl", "bow"]);
    }

    #[test]
    fn reads_directory_and_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        std::fs::write(dir.path().join("b.txt"), "red sea").unwrap();
        std::fs::write(dir.path().join("sub/a.txt"), "red fox").unwrap();
        let docs = read_corpus(dir.path()).unwrap();
        assert_eq!(docs[0].0, "b.txt");
        assert_eq!(docs[1].0, "sub/a.txt");

        let jsonl = dir.path().join("c.jsonl");
        std::fs::write(
            &jsonl,
            "{\"id\":\"1\",\"text\":\"red fox\"}\n\n{\"id\":\"2\",\"text\":\"red sea\"}\n",
        )
        .unwrap();
        let docs = read_corpus(&jsonl).unwrap();
        assert_eq!(docs.len(), 2);
        std::fs::write(&jsonl, "{\"id\":1}\n").unwrap();
        assert!(matches!(
            read_corpus(&jsonl),
            Err(ProviderError::Format { line: 1, .. })
        ));
        assert!(matches!(
            read_corpus(&dir.path().join("nope")),
            Err(ProviderError::MissingFile(_))
        ));
    }
}
