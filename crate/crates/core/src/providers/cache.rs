//! Append-only query cache.
//!
//! One record per line, tab separated:
//!
//! ```text
//! 2013-04-09T00:00:00Z<TAB>g<TAB>macbeth AND shakespeare<TAB>20800000
//! ```
//!
//! The latest record for a `(source_id, query)` pair wins. Blank lines and
//! lines starting with `#` are ignored on load.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};

use super::ProviderError;
use crate::snapshot::FrequencySnapshot;
use crate::snapshot::SnapshotBuilder;
use crate::term::TermMultiset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheRecord {
    pub timestamp: DateTime<Utc>,
    pub source_id: String,
    pub query: TermMultiset,
    pub count: u64,
}

impl CacheRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\n",
            self.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
            self.source_id,
            self.query.query_string(),
            self.count
        )
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [ts, source, query, count] = fields[..] else {
            return Err(format!(
                "expected 4 tab-separated fields, found {}",
                fields.len()
            ));
        };
        let timestamp = DateTime::parse_from_rfc3339(ts)
            .map_err(|e| format!("bad timestamp {ts:?}: {e}"))?
            .with_timezone(&Utc);
        if source.is_empty() {
            return Err("empty source id".into());
        }
        let query = TermMultiset::parse_query(query).map_err(|e| format!("bad query: {e}"))?;
        let count = count
            .trim_end_matches('\r')
            .parse()
            .map_err(|e| format!("bad count {count:?}: {e}"))?;
        Ok(CacheRecord {
            timestamp,
            source_id: source.to_string(),
            query,
            count,
        })
    }
}

#[derive(Default)]
struct CacheState {
    latest: HashMap<(String, TermMultiset), u64>,
    per_day: HashMap<(String, NaiveDate), u32>,
}

impl CacheState {
    fn apply(&mut self, r: &CacheRecord) {
        self.latest
            .insert((r.source_id.clone(), r.query.clone()), r.count);
        *self
            .per_day
            .entry((r.source_id.clone(), r.timestamp.date_naive()))
            .or_default() += 1;
    }
}

/// In-memory view of a cache file plus a serialized appender.
pub struct QueryCache {
    path: Option<PathBuf>,
    state: RwLock<CacheState>,
    writer: Mutex<()>,
}

impl QueryCache {
    /// A cache with no backing file.
    pub fn in_memory() -> Self {
        QueryCache {
            path: None,
            state: RwLock::new(CacheState::default()),
            writer: Mutex::new(()),
        }
    }

    /// Loads `path` if it exists; a missing file is an empty cache that will
    /// be created on the first append.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ProviderError> {
        let path = path.as_ref().to_path_buf();
        let mut state = CacheState::default();
        match File::open(&path) {
            Ok(f) => {
                for r in read_records(BufReader::new(f), &path)? {
                    state.apply(&r);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(ProviderError::io(&path, e)),
        }
        Ok(QueryCache {
            path: Some(path),
            state: RwLock::new(state),
            writer: Mutex::new(()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn lookup(&self, source_id: &str, query: &TermMultiset) -> Option<u64> {
        let state = self.state.read().expect("cache lock poisoned");
        state
            .latest
            .get(&(source_id.to_string(), query.clone()))
            .copied()
    }

    /// Number of records for `source_id` stamped on `day` (UTC).
    pub fn records_on(&self, source_id: &str, day: NaiveDate) -> u32 {
        let state = self.state.read().expect("cache lock poisoned");
        state
            .per_day
            .get(&(source_id.to_string(), day))
            .copied()
            .unwrap_or(0)
    }

    pub fn sources(&self) -> BTreeSet<String> {
        let state = self.state.read().expect("cache lock poisoned");
        state.latest.keys().map(|(s, _)| s.clone()).collect()
    }

    /// Appends one record (a single write of a whole line) and makes it
    /// visible to subsequent lookups.
    pub fn append(&self, record: &CacheRecord) -> Result<(), ProviderError> {
        if record.source_id.is_empty() || record.source_id.contains(['\t', '\n', '\r']) {
            return Err(ProviderError::Config(format!(
                "source id {:?} cannot be stored in a cache file",
                record.source_id
            )));
        }
        let _guard = self.writer.lock().expect("cache writer poisoned");
        if let Some(path) = &self.path {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| ProviderError::io(path, e))?;
            f.write_all(record.to_line().as_bytes())
                .and_then(|_| f.flush())
                .map_err(|e| ProviderError::io(path, e))?;
        }
        self.state
            .write()
            .expect("cache lock poisoned")
            .apply(record);
        Ok(())
    }

    /// All counts recorded for `source_id`, ready for a normalizer.
    pub fn snapshot_builder(&self, source_id: &str) -> SnapshotBuilder {
        let state = self.state.read().expect("cache lock poisoned");
        let counts: Vec<_> = state
            .latest
            .iter()
            .filter(|((s, _), _)| s == source_id)
            .map(|((_, q), &c)| (q.clone(), c))
            .collect();
        FrequencySnapshot::builder(source_id).counts(counts)
    }
}

/// Parses every record of a cache stream in file order.
pub fn read_records<R: BufRead>(reader: R, path: &Path) -> Result<Vec<CacheRecord>, ProviderError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ProviderError::io(path, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let record = CacheRecord::parse_line(&line).map_err(|reason| ProviderError::Format {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        })?;
        out.push(record);
    }
    Ok(out)
}
