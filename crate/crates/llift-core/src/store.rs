//! Persistence: append-only verdict log, transcript files, response cache,
//! and batch statistics.
//!
//! Layout under the store directory:
//!
//! ```text
//! verdicts.jsonl                     one record per line
//! transcripts/<case>/<convo>-<run>.txt
//! cache/<digest>                     cached completion bodies
//! ```
//!
//! Records are diff-able and greppable on purpose; nothing here mutates an
//! existing line.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{Conversation, ResponseCache};
use crate::orchestrator::{CaseVerdict, Decision, MayInitEntry};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verdict for case `{case}` in batch `{batch}` already stored")]
    Duplicate { case: String, batch: String },
    #[error("no records for batch `{0}`")]
    UnknownBatch(String),
    #[error("corrupt verdict record at line {line}: {msg}")]
    Corrupt { line: usize, msg: String },
}

/// One flattened verdict, as stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub batch: String,
    pub case_id: String,
    pub decision: Decision,
    pub votes: Vec<Decision>,
    pub suspicious: Vec<String>,
    pub must_init: Vec<String>,
    pub may_init: Vec<MayInitEntry>,
    pub unreachable_use: bool,
    pub merged_initializers: bool,
    pub validation_warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inconclusive_reason: Option<String>,
    pub transcripts: Vec<String>,
    pub turns_total: u32,
    pub tokens_total: u64,
    pub backend: String,
    pub model: String,
    pub pack_name: String,
    pub pack_version: String,
    /// Absent for deterministic (replay) batches so reruns are
    /// byte-identical.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp_unix_ms: Option<u64>,
}

impl VerdictRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn from_verdict(
        verdict: &CaseVerdict,
        batch: &str,
        backend: &str,
        model: &str,
        pack_name: &str,
        pack_version: &str,
        transcripts: Vec<String>,
        timestamp_unix_ms: Option<u64>,
    ) -> VerdictRecord {
        VerdictRecord {
            batch: batch.to_string(),
            case_id: verdict.case_id.clone(),
            decision: verdict.decision,
            votes: verdict.votes.clone(),
            suspicious: verdict.suspicious.clone(),
            must_init: verdict.must_init.clone(),
            may_init: verdict.may_init.clone(),
            unreachable_use: verdict.unreachable_use,
            merged_initializers: verdict.merged_initializers,
            validation_warnings: verdict.validation_warnings.clone(),
            inconclusive_reason: verdict.inconclusive_reason.clone(),
            transcripts,
            turns_total: verdict.turns_total,
            tokens_total: verdict.tokens_total,
            backend: backend.to_string(),
            model: model.to_string(),
            pack_name: pack_name.to_string(),
            pack_version: pack_version.to_string(),
            timestamp_unix_ms,
        }
    }
}

struct StoreInner {
    file: std::fs::File,
    seen: BTreeSet<(String, String)>,
    appended: u64,
}

/// Single-writer verdict store for one batch; appends are serialized,
/// concurrent readers are free to tail the file.
pub struct VerdictStore {
    dir: PathBuf,
    batch: String,
    inner: Mutex<StoreInner>,
}

impl VerdictStore {
    /// Open (creating if needed) a store directory for appending records of
    /// `batch`. Existing records are scanned to enforce one record per
    /// (case, batch).
    pub fn open(dir: &Path, batch: &str) -> Result<VerdictStore, StoreError> {
        std::fs::create_dir_all(dir)?;
        std::fs::create_dir_all(dir.join("transcripts"))?;
        std::fs::create_dir_all(dir.join("cache"))?;
        let path = dir.join("verdicts.jsonl");
        let mut seen = BTreeSet::new();
        if path.exists() {
            for (record, _) in read_records(&path)? {
                seen.insert((record.case_id, record.batch));
            }
        }
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)?;
        Ok(VerdictStore {
            dir: dir.to_path_buf(),
            batch: batch.to_string(),
            inner: Mutex::new(StoreInner {
                file,
                seen,
                appended: 0,
            }),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn batch(&self) -> &str {
        &self.batch
    }

    /// Durable append; returns the 0-based position of the record within
    /// this writer's appends.
    pub fn append_verdict(&self, record: &VerdictRecord) -> Result<u64, StoreError> {
        let mut inner = self.inner.lock().expect("store lock");
        let key = (record.case_id.clone(), record.batch.clone());
        if inner.seen.contains(&key) {
            return Err(StoreError::Duplicate {
                case: key.0,
                batch: key.1,
            });
        }
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');
        inner.file.write_all(line.as_bytes())?;
        inner.file.flush()?;
        inner.seen.insert(key);
        let position = inner.appended;
        inner.appended += 1;
        Ok(position)
    }

    /// Write one transcript file; returns its store-relative path.
    pub fn write_transcript(&self, conversation: &Conversation) -> Result<String, StoreError> {
        let case_dir = self.dir.join("transcripts").join(sanitize(&conversation.id.case));
        std::fs::create_dir_all(&case_dir)?;
        let name = format!("{}-{}.txt", conversation.id.label, conversation.id.run);
        std::fs::write(case_dir.join(&name), conversation.render_text())?;
        Ok(format!(
            "transcripts/{}/{name}",
            sanitize(&conversation.id.case)
        ))
    }

    /// File-backed response cache rooted in this store.
    pub fn response_cache(&self) -> FileResponseCache {
        FileResponseCache {
            dir: self.dir.join("cache"),
        }
    }
}

fn sanitize(part: &str) -> String {
    part.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn read_records(path: &Path) -> Result<Vec<(VerdictRecord, usize)>, StoreError> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: VerdictRecord = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        records.push((record, idx + 1));
    }
    Ok(records)
}

/// Summary statistics for one batch; exact arithmetic over stored records,
/// population variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStats {
    pub batch: String,
    pub cases: usize,
    pub decisions: BTreeMap<String, usize>,
    pub turn_mean: f64,
    pub turn_max: u32,
    pub turn_variance: f64,
    pub token_total: u64,
}

pub fn batch_stats(dir: &Path, batch: &str) -> Result<BatchStats, StoreError> {
    let path = dir.join("verdicts.jsonl");
    if !path.exists() {
        return Err(StoreError::UnknownBatch(batch.to_string()));
    }
    let all = read_records(&path)?;
    let empty_store = all.is_empty();
    let records: Vec<VerdictRecord> = all
        .into_iter()
        .map(|(r, _)| r)
        .filter(|r| r.batch == batch)
        .collect();
    if records.is_empty() {
        // An empty store legitimately has zero of everything; a store that
        // holds other batches does not know this one.
        if empty_store {
            return Ok(BatchStats {
                batch: batch.to_string(),
                cases: 0,
                decisions: BTreeMap::new(),
                turn_mean: 0.0,
                turn_max: 0,
                turn_variance: 0.0,
                token_total: 0,
            });
        }
        return Err(StoreError::UnknownBatch(batch.to_string()));
    }
    let mut decisions: BTreeMap<String, usize> = BTreeMap::new();
    for record in &records {
        *decisions.entry(record.decision.to_string()).or_insert(0) += 1;
    }
    let turns: Vec<f64> = records.iter().map(|r| f64::from(r.turns_total)).collect();
    let n = turns.len() as f64;
    let mean = turns.iter().sum::<f64>() / n;
    let variance = turns.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    Ok(BatchStats {
        batch: batch.to_string(),
        cases: records.len(),
        decisions,
        turn_mean: mean,
        turn_max: records.iter().map(|r| r.turns_total).max().unwrap_or(0),
        turn_variance: variance,
        token_total: records.iter().map(|r| r.tokens_total).sum(),
    })
}

/// Cache entries are whole completion bodies keyed by the request's
/// (model, history) digest; a put never overwrites.
pub struct FileResponseCache {
    dir: PathBuf,
}

impl FileResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> FileResponseCache {
        FileResponseCache { dir: dir.into() }
    }
}

impl ResponseCache for FileResponseCache {
    fn get(&self, key: &str) -> Option<String> {
        std::fs::read_to_string(self.dir.join(sanitize(key))).ok()
    }

    fn put(&self, key: &str, response: &str) {
        // Best effort: a failed cache write only costs a future call.
        let _ = std::fs::create_dir_all(&self.dir);
        let path = self.dir.join(sanitize(key));
        if !path.exists() {
            let _ = std::fs::write(path, response);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(case: &str, batch: &str, decision: Decision, turns: u32, tokens: u64) -> VerdictRecord {
        VerdictRecord {
            batch: batch.into(),
            case_id: case.into(),
            decision,
            votes: vec![decision],
            suspicious: vec!["v".into()],
            must_init: Vec::new(),
            may_init: Vec::new(),
            unreachable_use: false,
            merged_initializers: false,
            validation_warnings: Vec::new(),
            inconclusive_reason: None,
            transcripts: Vec::new(),
            turns_total: turns,
            tokens_total: tokens,
            backend: "scripted".into(),
            model: "test".into(),
            pack_name: "default".into(),
            pack_version: "1".into(),
            timestamp_unix_ms: None,
        }
    }

    #[test]
    fn append_then_read_back_identical() {
        let dir = tempfile::TempDir::new().unwrap();
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        let r = record("c1", "b1", Decision::Bug, 5, 100);
        store.append_verdict(&r).unwrap();
        let read = read_records(&dir.path().join("verdicts.jsonl")).unwrap();
        assert_eq!(read.len(), 1);
        assert_eq!(read[0].0, r);
    }

    #[test]
    fn duplicate_case_batch_rejected() {
        let dir = tempfile::TempDir::new().unwrap();
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        store.append_verdict(&record("c1", "b1", Decision::Bug, 1, 1)).unwrap();
        assert!(matches!(
            store.append_verdict(&record("c1", "b1", Decision::NonBug, 1, 1)),
            Err(StoreError::Duplicate { .. })
        ));
        // Same case in a different batch is fine.
        store.append_verdict(&record("c1", "b2", Decision::NonBug, 1, 1)).unwrap();
        // Uniqueness survives reopening the store.
        drop(store);
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        assert!(store.append_verdict(&record("c1", "b1", Decision::Bug, 1, 1)).is_err());
    }

    #[test]
    fn stats_arithmetic() {
        let dir = tempfile::TempDir::new().unwrap();
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        store.append_verdict(&record("c1", "b1", Decision::NonBug, 3, 10)).unwrap();
        store.append_verdict(&record("c2", "b1", Decision::NonBug, 3, 20)).unwrap();
        store.append_verdict(&record("c3", "b1", Decision::Bug, 2, 30)).unwrap();
        let stats = batch_stats(dir.path(), "b1").unwrap();
        assert_eq!(stats.cases, 3);
        assert_eq!(stats.decisions.get("non_bug"), Some(&2));
        assert_eq!(stats.decisions.get("bug"), Some(&1));
        assert!((stats.turn_mean - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(stats.turn_max, 3);
        // Population variance of [3, 3, 2].
        let mean = 8.0 / 3.0;
        let expected = ((3.0 - mean) * (3.0 - mean) * 2.0 + (2.0 - mean) * (2.0 - mean)) / 3.0;
        assert!((stats.turn_variance - expected).abs() < 1e-12);
        assert_eq!(stats.token_total, 60);
    }

    #[test]
    fn unknown_batch_errors() {
        let dir = tempfile::TempDir::new().unwrap();
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        store.append_verdict(&record("c1", "b1", Decision::Bug, 1, 1)).unwrap();
        assert!(matches!(
            batch_stats(dir.path(), "nope"),
            Err(StoreError::UnknownBatch(_))
        ));
        assert!(matches!(
            batch_stats(&dir.path().join("missing"), "b1"),
            Err(StoreError::UnknownBatch(_))
        ));
    }

    #[test]
    fn empty_store_stats_are_zero() {
        let dir = tempfile::TempDir::new().unwrap();
        let _store = VerdictStore::open(dir.path(), "b1").unwrap();
        let stats = batch_stats(dir.path(), "b1").unwrap();
        assert_eq!(stats.cases, 0);
        assert!(stats.decisions.is_empty());
        assert_eq!(stats.token_total, 0);
        assert_eq!(stats.turn_max, 0);
    }

    #[test]
    fn transcript_files_land_in_layout() {
        use crate::gateway::{ConversationId, ConvoLabel};
        let dir = tempfile::TempDir::new().unwrap();
        let store = VerdictStore::open(dir.path(), "b1").unwrap();
        let conv = Conversation {
            id: ConversationId::new("case/odd", ConvoLabel::CONVO2, 1),
            system_prompt: "sys".into(),
            turns: Vec::new(),
        };
        let rel = store.write_transcript(&conv).unwrap();
        assert_eq!(rel, "transcripts/case_odd/convo2-1.txt");
        assert!(dir.path().join(rel).exists());
    }

    #[test]
    fn file_cache_round_trip() {
        let dir = tempfile::TempDir::new().unwrap();
        let cache = FileResponseCache::new(dir.path().join("cache"));
        assert_eq!(cache.get("k1"), None);
        cache.put("k1", "value");
        assert_eq!(cache.get("k1").as_deref(), Some("value"));
        cache.put("k1", "other");
        assert_eq!(cache.get("k1").as_deref(), Some("value"), "puts never overwrite");
    }
}
