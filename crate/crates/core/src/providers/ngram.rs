//! Count extraction from Google Books n-gram files.
//!
//! Input lines are `ngram TAB year TAB match_count [TAB volume_count]`.
//! Occurrence counts come from 1-gram files (summed over years);
//! co-occurrence counts come from 5-gram files, where a pair of terms
//! co-occurs in a line when both appear among its five tokens, in any order
//! and position. A line contributes its `match_count` once per pair no
//! matter how often either term repeats within it. Every file is read once,
//! streaming.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ProviderError;
use crate::snapshot::{FrequencySnapshot, SnapshotError};
use crate::term::{Term, TermMultiset};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedLine {
    pub path: PathBuf,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramCounts {
    terms: Vec<Term>,
    singles: Vec<u64>,
    /// Keyed by `(i, j)` with `i < j` into `terms`.
    pairs: BTreeMap<(usize, usize), u64>,
    pub lines_read: u64,
    pub malformed: Vec<MalformedLine>,
}

struct Record<'a> {
    ngram: &'a str,
    match_count: u64,
}

fn parse_record(line: &str) -> Result<Record<'_>, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if !(3..=4).contains(&fields.len()) {
        return Err(format!(
            "expected 3 or 4 tab-separated fields, found {}",
            fields.len()
        ));
    }
    fields[1]
        .parse::<i32>()
        .map_err(|_| format!("bad year {:?}", fields[1]))?;
    let match_count = fields[2]
        .parse::<u64>()
        .map_err(|_| format!("bad match_count {:?}", fields[2]))?;
    if let Some(v) = fields.get(3) {
        v.parse::<u64>()
            .map_err(|_| format!("bad volume_count {v:?}"))?;
    }
    Ok(Record {
        ngram: fields[0],
        match_count,
    })
}

impl NgramCounts {
    pub fn new(terms: &[Term]) -> Self {
        let mut terms = terms.to_vec();
        terms.sort();
        terms.dedup();
        NgramCounts {
            singles: vec![0; terms.len()],
            terms,
            pairs: BTreeMap::new(),
            lines_read: 0,
            malformed: Vec::new(),
        }
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect()
    }

    fn each_line<R: BufRead>(
        &mut self,
        mut reader: R,
        path: &Path,
        mut on_record: impl FnMut(&mut Self, usize, &str, u64) -> Result<(), String>,
    ) -> Result<(), ProviderError> {
        let mut buf = Vec::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| ProviderError::io(path, e))?;
            if n == 0 {
                break;
            }
            line_no += 1;
            self.lines_read += 1;
            let outcome = std::str::from_utf8(&buf)
                .map_err(|_| "line is not valid UTF-8".to_string())
                .map(|s| s.trim_end_matches(['\n', '\r']))
                .and_then(|s| {
                    if s.is_empty() {
                        return Err("empty line".to_string());
                    }
                    let r = parse_record(s)?;
                    on_record(self, line_no, r.ngram, r.match_count)
                });
            if let Err(reason) = outcome {
                self.malformed.push(MalformedLine {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason,
                });
            }
        }
        Ok(())
    }

    /// Adds the occurrence counts of one 1-gram stream.
    pub fn scan_onegrams<R: BufRead>(
        &mut self,
        reader: R,
        path: &Path,
    ) -> Result<(), ProviderError> {
        let index: HashMap<String, usize> = self
            .index()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        self.each_line(reader, path, |me, _, ngram, count| {
            let mut tokens = ngram.split_whitespace();
            let (Some(word), None) = (tokens.next(), tokens.next()) else {
                return Err(format!("1-gram field {ngram:?} is not a single token"));
            };
            if let Some(&i) = index.get(&word.to_lowercase()) {
                me.singles[i] += count;
            }
            Ok(())
        })
    }

    /// Adds the co-occurrence counts of one 5-gram stream.
    pub fn scan_fivegrams<R: BufRead>(
        &mut self,
        reader: R,
        path: &Path,
    ) -> Result<(), ProviderError> {
        let index: HashMap<String, usize> = self
            .index()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        self.each_line(reader, path, |me, _, ngram, count| {
            let tokens: Vec<String> = ngram.split_whitespace().map(str::to_lowercase).collect();
            if tokens.len() != 5 {
                return Err(format!("5-gram field has {} tokens", tokens.len()));
            }
            let mut present: Vec<usize> = tokens
                .iter()
                .filter_map(|t| index.get(t).copied())
                .collect();
            present.sort_unstable();
            present.dedup();
            for (a, &i) in present.iter().enumerate() {
                for &j in &present[a + 1..] {
                    *me.pairs.entry((i, j)).or_default() += count;
                }
            }
            Ok(())
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn single(&self, term: &Term) -> Option<u64> {
        let i = self.terms.binary_search(term).ok()?;
        Some(self.singles[i])
    }

    pub fn pair(&self, a: &Term, b: &Term) -> Option<u64> {
        let i = self.terms.binary_search(a).ok()?;
        let j = self.terms.binary_search(b).ok()?;
        if i == j {
            return None;
        }
        Some(self.pairs.get(&(i.min(j), i.max(j))).copied().unwrap_or(0))
    }

    /// A snapshot holding every singleton and every unordered pair of
    /// distinct terms (zero when the pair never co-occurs).
    pub fn to_snapshot(
        &self,
        source_id: &str,
        normalizer_n: Option<u64>,
        terms_per_page_alpha: Option<f64>,
    ) -> Result<FrequencySnapshot, SnapshotError> {
        let mut builder = FrequencySnapshot::builder(source_id)
            .maybe_normalizer(normalizer_n)
            .terms_per_page(terms_per_page_alpha);
        for (i, t) in self.terms.iter().enumerate() {
            builder.insert(TermMultiset::singleton(t.clone()), self.singles[i]);
            for (j, u) in self.terms.iter().enumerate().skip(i + 1) {
                let c = self.pairs.get(&(i, j)).copied().unwrap_or(0);
                builder.insert(TermMultiset::pair(t.clone(), u.clone()), c);
            }
        }
        builder.build()
    }
}

fn open(path: &Path) -> Result<BufReader<File>, ProviderError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| ProviderError::io(path, e))
}

/// Scans all files once each. Malformed lines are skipped and listed in
/// [`NgramCounts::malformed`]; a missing file is an error.
pub fn ngram_counts<P: AsRef<Path>>(
    onegram_paths: &[P],
    fivegram_paths: &[P],
    terms: &[Term],
) -> Result<NgramCounts, ProviderError> {
    for p in onegram_paths.iter().chain(fivegram_paths) {
        if !p.as_ref().exists() {
            return Err(ProviderError::MissingFile(p.as_ref().to_path_buf()));
        }
    }
    let mut counts = NgramCounts::new(terms);
    for p in onegram_paths {
        counts.scan_onegrams(open(p.as_ref())?, p.as_ref())?;
    }
    for p in fivegram_paths {
        counts.scan_fivegrams(open(p.as_ref())?, p.as_ref())?;
    }
    Ok(counts)
}

/// Number of whitespace-separated tokens in the n-gram field of the first
/// well-formed line, used to tell 1-gram files from 5-gram files.
pub fn detect_order(path: &Path) -> Result<Option<usize>, ProviderError> {
    let reader = open(path)?;
    for line in reader.lines() {
        let Ok(line) = line else { continue };
        if let Ok(r) = parse_record(&line) {
            return Ok(Some(r.ngram.split_whitespace().count()));
        }
    }
    Ok(None)
}
