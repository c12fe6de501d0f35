//! Date-partitioned newline-delimited JSON store.
//!
//! Layout: `<data_dir>/<dataset>/<partition_key>.jsonl`, one record per line.
//! Partition files are replaced atomically (temp file + rename) and never
//! appended in place, so a reader sees either the old or the new file.
//!
//! Presence checks for summaries go through two tiers: a local index built from
//! the `summaries` partitions, then an optional [`RemoteLookup`].

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::datamodel::{
    DailyTrendReport, LifecycleSnapshot, MonthlyTrendReport, PaperRecord, StructuredSummary,
    Validate, ValidationReport,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dataset {
    Papers,
    Summaries,
    DailyTrending,
    MonthlyTrending,
    Lifecycle,
    DeadLetter,
}

impl Dataset {
    pub fn dir_name(self) -> &'static str {
        match self {
            Dataset::Papers => "papers",
            Dataset::Summaries => "summaries",
            Dataset::DailyTrending => "daily_trending",
            Dataset::MonthlyTrending => "monthly_trending",
            Dataset::Lifecycle => "lifecycle",
            Dataset::DeadLetter => "deadletter",
        }
    }
}

/// A record's primary key within its partition.
pub trait Keyed {
    fn primary_key(&self) -> String;
}

impl Keyed for PaperRecord {
    fn primary_key(&self) -> String {
        self.paper_id.clone()
    }
}

impl Keyed for StructuredSummary {
    fn primary_key(&self) -> String {
        self.paper_id.clone()
    }
}

impl Keyed for DailyTrendReport {
    fn primary_key(&self) -> String {
        self.date.to_string()
    }
}

impl Keyed for MonthlyTrendReport {
    fn primary_key(&self) -> String {
        self.month.to_string()
    }
}

impl Keyed for LifecycleSnapshot {
    fn primary_key(&self) -> String {
        self.snapshot_id.clone()
    }
}

/// A paper whose summarization failed after every retry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeadLetter {
    pub paper_id: String,
    pub published_at: NaiveDate,
    pub attempts: u32,
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_response: Option<String>,
}

impl Keyed for DeadLetter {
    fn primary_key(&self) -> String {
        self.paper_id.clone()
    }
}

impl Validate for DeadLetter {
    fn validate(&self) -> ValidationReport {
        ValidationReport::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitReceipt {
    pub path: PathBuf,
    pub records: usize,
    /// False when the file already held exactly these bytes.
    pub changed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    CachedLocal,
    CachedRemote,
    Absent,
}

impl CacheStatus {
    pub fn is_cached(self) -> bool {
        self != CacheStatus::Absent
    }
}

/// Second-tier presence check for already-summarized papers.
pub trait RemoteLookup: Send + Sync {
    fn contains(&self, paper_id: &str) -> Result<bool>;

    fn name(&self) -> &str;
}

/// Never finds anything.
#[derive(Debug, Default)]
pub struct NoRemote;

impl RemoteLookup for NoRemote {
    fn contains(&self, _paper_id: &str) -> Result<bool> {
        Ok(false)
    }

    fn name(&self) -> &str {
        "none"
    }
}

/// Treats a second data directory (same layout) as the remote mirror.
/// Its summary ids are indexed once, on first lookup.
#[derive(Debug)]
pub struct DirRemote {
    root: PathBuf,
    ids: OnceLock<std::result::Result<std::collections::HashSet<String>, String>>,
}

impl DirRemote {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            ids: OnceLock::new(),
        }
    }
}

impl RemoteLookup for DirRemote {
    fn contains(&self, paper_id: &str) -> Result<bool> {
        let ids = self.ids.get_or_init(|| {
            let dir = self.root.join(Dataset::Summaries.dir_name());
            if !dir.is_dir() {
                return Err(format!("remote mirror {} is not reachable", dir.display()));
            }
            let mut ids = std::collections::HashSet::new();
            for (_, path) in list_partitions(&dir).map_err(|e| e.to_string())? {
                for s in read_jsonl::<StructuredSummary>(&path).map_err(|e| e.to_string())? {
                    ids.insert(s.paper_id);
                }
            }
            Ok(ids)
        });
        match ids {
            Ok(ids) => Ok(ids.contains(paper_id)),
            Err(msg) => Err(Error::Transport(msg.clone())),
        }
    }

    fn name(&self) -> &str {
        "dir"
    }
}

/// Writes `bytes` to `path` via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Invalid(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{file_name}.tmp-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

fn encode_jsonl<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.push(b'\n');
    }
    Ok(out)
}

/// `(partition_key, path)` pairs sorted by key. Missing dir reads as empty.
fn list_partitions(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    let mut parts = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            if !stem.starts_with('.') {
                parts.push((stem.to_string(), path.clone()));
            }
        }
    }
    parts.sort();
    Ok(parts)
}

fn check_partition_key(key: &str) -> Result<()> {
    let ok = !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("invalid partition key {key:?}")))
    }
}

fn duplicate_keys<T: Keyed>(records: &[T]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut dups: Vec<String> = records
        .iter()
        .map(Keyed::primary_key)
        .filter(|k| !seen.insert(k.clone()))
        .collect();
    dups.sort();
    dups.dedup();
    dups
}

pub struct Store {
    root: PathBuf,
    remote: Box<dyn RemoteLookup>,
    locks: Mutex<HashMap<PathBuf, Arc<Mutex<()>>>>,
    /// summary paper_id -> partition key
    summary_index: RwLock<Option<HashMap<String, String>>>,
    /// paper_id -> publication date, from the `papers` dataset
    paper_dates: RwLock<Option<HashMap<String, NaiveDate>>>,
    warnings: Mutex<Vec<String>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("root", &self.root)
            .field("remote", &self.remote.name())
            .finish()
    }
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Self::with_remote(root, Box::new(NoRemote))
    }

    pub fn with_remote(root: impl Into<PathBuf>, remote: Box<dyn RemoteLookup>) -> Self {
        Self {
            root: root.into(),
            remote,
            locks: Mutex::new(HashMap::new()),
            summary_index: RwLock::new(None),
            paper_dates: RwLock::new(None),
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn partition_path(&self, dataset: Dataset, key: &str) -> PathBuf {
        self.root.join(dataset.dir_name()).join(format!("{key}.jsonl"))
    }

    /// Warnings recorded so far (remote outages and the like).
    pub fn warnings(&self) -> Vec<String> {
        self.warnings.lock().unwrap().clone()
    }

    fn warn(&self, msg: String) {
        tracing::warn!("{msg}");
        self.warnings.lock().unwrap().push(msg);
    }

    fn partition_lock(&self, path: &Path) -> Arc<Mutex<()>> {
        self.locks
            .lock()
            .unwrap()
            .entry(path.to_path_buf())
            .or_default()
            .clone()
    }

    /// Replaces a partition with `records`, in the given order.
    pub fn write_partition<T>(&self, dataset: Dataset, key: &str, records: &[T]) -> Result<CommitReceipt>
    where
        T: Serialize + Keyed + Validate,
    {
        check_partition_key(key)?;
        let dups = duplicate_keys(records);
        if !dups.is_empty() {
            return Err(Error::DuplicateKeys(dups));
        }
        for r in records {
            let report = r.validate();
            if !report.is_ok() {
                return Err(Error::Validation(format!(
                    "{}: {}",
                    r.primary_key(),
                    report.describe_hard()
                )));
            }
        }
        let path = self.partition_path(dataset, key);
        let lock = self.partition_lock(&path);
        let _guard = lock.lock().unwrap();
        let receipt = self.write_unlocked(&path, records)?;
        match dataset {
            Dataset::Summaries => self.invalidate_summary_index(),
            Dataset::Papers => self.invalidate_paper_dates(),
            _ => {}
        }
        Ok(receipt)
    }

    fn write_unlocked<T: Serialize>(&self, path: &Path, records: &[T]) -> Result<CommitReceipt> {
        let bytes = encode_jsonl(records)?;
        let unchanged = fs::read(path).map(|old| old == bytes).unwrap_or(false);
        if !unchanged {
            write_atomic(path, &bytes)?;
        }
        Ok(CommitReceipt {
            path: path.to_path_buf(),
            records: records.len(),
            changed: !unchanged,
        })
    }

    pub fn read_partition<T: DeserializeOwned>(&self, dataset: Dataset, key: &str) -> Result<Vec<T>> {
        check_partition_key(key)?;
        read_jsonl(&self.partition_path(dataset, key))
    }

    /// All records in partitions whose key lies in `[from_key, to_key]`,
    /// partitions ascending. Missing partitions are skipped.
    pub fn read_range<T: DeserializeOwned>(
        &self,
        dataset: Dataset,
        from_key: &str,
        to_key: &str,
    ) -> Result<Vec<T>> {
        if from_key > to_key {
            return Err(Error::Precondition(format!(
                "inverted range: {from_key} > {to_key}"
            )));
        }
        let mut out = Vec::new();
        for (key, path) in list_partitions(&self.root.join(dataset.dir_name()))? {
            if key.as_str() >= from_key && key.as_str() <= to_key {
                out.extend(read_jsonl(&path)?);
            }
        }
        Ok(out)
    }

    /// Every record of a dataset, partitions ascending.
    pub fn read_all<T: DeserializeOwned>(&self, dataset: Dataset) -> Result<Vec<T>> {
        let mut out = Vec::new();
        for (_, path) in list_partitions(&self.root.join(dataset.dir_name()))? {
            out.extend(read_jsonl(&path)?);
        }
        Ok(out)
    }

    pub fn partition_keys(&self, dataset: Dataset) -> Result<Vec<String>> {
        Ok(list_partitions(&self.root.join(dataset.dir_name()))?
            .into_iter()
            .map(|(k, _)| k)
            .collect())
    }

    /// Read-modify-write of one partition under its writer lock. `edit` receives
    /// the current records; the result is validated, checked for duplicate keys
    /// and sorted by primary key before it is written.
    pub fn modify_partition<T, F>(&self, dataset: Dataset, key: &str, edit: F) -> Result<CommitReceipt>
    where
        T: Serialize + DeserializeOwned + Keyed + Validate,
        F: FnOnce(&mut Vec<T>),
    {
        check_partition_key(key)?;
        let path = self.partition_path(dataset, key);
        let lock = self.partition_lock(&path);
        let _guard = lock.lock().unwrap();
        let mut records: Vec<T> = read_jsonl(&path)?;
        let existed = path.exists();
        edit(&mut records);
        records.sort_by_key(Keyed::primary_key);
        let dups = duplicate_keys(&records);
        if !dups.is_empty() {
            return Err(Error::DuplicateKeys(dups));
        }
        if let Some(bad) = records.iter().find(|r| !r.validate().is_ok()) {
            return Err(Error::Validation(format!(
                "{}: {}",
                bad.primary_key(),
                bad.validate().describe_hard()
            )));
        }
        if records.is_empty() && !existed {
            return Ok(CommitReceipt {
                path,
                records: 0,
                changed: false,
            });
        }
        let receipt = self.write_unlocked(&path, &records)?;
        if dataset == Dataset::Papers {
            let mut dates = self.paper_dates.write().unwrap();
            if let Some(map) = dates.as_mut() {
                if let Ok(date) = key.parse::<NaiveDate>() {
                    for r in &records {
                        map.insert(r.primary_key(), date);
                    }
                }
            }
        }
        Ok(receipt)
    }

    fn invalidate_summary_index(&self) {
        *self.summary_index.write().unwrap() = None;
    }

    fn invalidate_paper_dates(&self) {
        *self.paper_dates.write().unwrap() = None;
    }

    fn ensure_summary_index(&self) -> Result<()> {
        if self.summary_index.read().unwrap().is_some() {
            return Ok(());
        }
        let mut index = HashMap::new();
        for (key, path) in list_partitions(&self.root.join(Dataset::Summaries.dir_name()))? {
            for s in read_jsonl::<StructuredSummary>(&path)? {
                index.insert(s.paper_id, key.clone());
            }
        }
        let mut slot = self.summary_index.write().unwrap();
        if slot.is_none() {
            *slot = Some(index);
        }
        Ok(())
    }

    fn ensure_paper_dates(&self) -> Result<()> {
        if self.paper_dates.read().unwrap().is_some() {
            return Ok(());
        }
        let mut dates = HashMap::new();
        for (key, path) in list_partitions(&self.root.join(Dataset::Papers.dir_name()))? {
            let Ok(date) = key.parse::<NaiveDate>() else { continue };
            for p in read_jsonl::<PaperRecord>(&path)? {
                dates.insert(p.paper_id, date);
            }
        }
        let mut slot = self.paper_dates.write().unwrap();
        if slot.is_none() {
            *slot = Some(dates);
        }
        Ok(())
    }

    /// Publication date recorded for an ingested paper.
    pub fn paper_date(&self, paper_id: &str) -> Result<Option<NaiveDate>> {
        self.ensure_paper_dates()?;
        Ok(self
            .paper_dates
            .read()
            .unwrap()
            .as_ref()
            .and_then(|m| m.get(paper_id).copied()))
    }

    /// Local index first, then the remote tier. A remote failure degrades to the
    /// local answer and records a warning.
    pub fn has_summary(&self, paper_id: &str) -> Result<CacheStatus> {
        self.ensure_summary_index()?;
        let local = self
            .summary_index
            .read()
            .unwrap()
            .as_ref()
            .is_some_and(|m| m.contains_key(paper_id));
        if local {
            return Ok(CacheStatus::CachedLocal);
        }
        match self.remote.contains(paper_id) {
            Ok(true) => Ok(CacheStatus::CachedRemote),
            Ok(false) => Ok(CacheStatus::Absent),
            Err(e) => {
                self.warn(format!(
                    "remote lookup ({}) failed for {paper_id}, using local answer: {e}",
                    self.remote.name()
                ));
                Ok(CacheStatus::Absent)
            }
        }
    }

    /// Inserts or replaces a summary in its paper's publication-date partition.
    pub fn upsert_summary(&self, summary: &StructuredSummary) -> Result<CommitReceipt> {
        let report = summary.validate();
        if !report.is_ok() {
            return Err(Error::Validation(report.describe_hard()));
        }
        let date = self
            .paper_date(&summary.paper_id)?
            .ok_or_else(|| Error::UnknownPaper(summary.paper_id.clone()))?;
        let key = date.to_string();
        self.ensure_summary_index()?;
        let path = self.partition_path(Dataset::Summaries, &key);
        let lock = self.partition_lock(&path);
        let _guard = lock.lock().unwrap();
        let mut records: Vec<StructuredSummary> = read_jsonl(&path)?;
        match records.iter_mut().find(|r| r.paper_id == summary.paper_id) {
            Some(slot) => *slot = summary.clone(),
            None => records.push(summary.clone()),
        }
        records.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
        let receipt = self.write_unlocked(&path, &records)?;
        if let Some(index) = self.summary_index.write().unwrap().as_mut() {
            index.insert(summary.paper_id.clone(), key);
        }
        Ok(receipt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;

    fn paper(id: &str, date: &str) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            version: None,
            title: format!("Paper {id}"),
            authors: vec![],
            abstract_text: "abstract".into(),
            upvotes: 1,
            published_at: date.parse().unwrap(),
            pdf_ref: None,
        }
    }

    fn summary(id: &str, text: &str) -> StructuredSummary {
        StructuredSummary {
            paper_id: id.into(),
            concise_summary: text.into(),
            detailed_analysis: "d".into(),
            topics: vec!["A".into(), "B".into()],
            keywords: vec!["k1".into(), "k2".into(), "k3".into(), "k4".into()],
            concise_summary_zh: text.into(),
            detailed_analysis_zh: "d".into(),
            topics_zh: vec!["A".into(), "B".into()],
            keywords_zh: vec!["k1".into(), "k2".into(), "k3".into(), "k4".into()],
            provider_id: "test".into(),
            extracted_at: DateTime::from_timestamp(0, 0).unwrap(),
        }
    }

    fn seeded(dir: &Path) -> Store {
        let store = Store::open(dir);
        store
            .write_partition(
                Dataset::Papers,
                "2026-03-01",
                &[paper("2603.00001", "2026-03-01"), paper("2603.00002", "2026-03-01"), paper("2603.00003", "2026-03-01")],
            )
            .unwrap();
        store
    }

    #[test]
    fn write_partition_counts_and_idempotency() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        let recs = [summary("2603.00001", "a"), summary("2603.00002", "b"), summary("2603.00003", "c")];
        let r1 = store.write_partition(Dataset::Summaries, "2026-03-01", &recs).unwrap();
        let path = dir.path().join("summaries/2026-03-01.jsonl");
        assert_eq!(r1.path, path);
        let first = fs::read(&path).unwrap();
        assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 3);
        let r2 = store.write_partition(Dataset::Summaries, "2026-03-01", &recs).unwrap();
        assert!(!r2.changed);
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn duplicate_keys_rejected_before_write() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        let recs = [summary("2603.00001", "a"), summary("2603.00001", "b")];
        let err = store.write_partition(Dataset::Summaries, "2026-03-01", &recs).unwrap_err();
        assert!(matches!(err, Error::DuplicateKeys(ref k) if k == &["2603.00001"]));
        assert!(!dir.path().join("summaries").exists());
    }

    #[test]
    fn read_range_skips_missing_and_rejects_inverted() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.write_partition(Dataset::Papers, "2026-03-01", &[paper("2603.00001", "2026-03-01")]).unwrap();
        store.write_partition(Dataset::Papers, "2026-03-03", &[paper("2603.00003", "2026-03-03")]).unwrap();
        let got: Vec<PaperRecord> = store.read_range(Dataset::Papers, "2026-03-01", "2026-03-03").unwrap();
        let ids: Vec<_> = got.iter().map(|p| p.paper_id.as_str()).collect();
        assert_eq!(ids, ["2603.00001", "2603.00003"]);

        let point: Vec<PaperRecord> = store.read_range(Dataset::Papers, "2026-03-03", "2026-03-03").unwrap();
        assert_eq!(point.len(), 1);

        let err = store.read_range::<PaperRecord>(Dataset::Papers, "2026-03-03", "2026-03-01");
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn upsert_inserts_replaces_and_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let store = seeded(dir.path());
        store.upsert_summary(&summary("2603.00002", "first")).unwrap();
        store.upsert_summary(&summary("2603.00001", "other")).unwrap();
        let path = dir.path().join("summaries/2026-03-01.jsonl");
        let before = fs::read(&path).unwrap();

        store.upsert_summary(&summary("2603.00002", "changed")).unwrap();
        let recs: Vec<StructuredSummary> = store.read_partition(Dataset::Summaries, "2026-03-01").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].concise_summary, "changed");

        store.upsert_summary(&summary("2603.00002", "first")).unwrap();
        assert_eq!(fs::read(&path).unwrap(), before);
    }

    #[test]
    fn upsert_unknown_paper_faults() {
        let dir = tempfile::tempdir().unwrap();
        let store = seeded(dir.path());
        let err = store.upsert_summary(&summary("2699.99999", "x")).unwrap_err();
        assert!(matches!(err, Error::UnknownPaper(_)));
    }

    struct CountingRemote {
        ids: Vec<String>,
        calls: std::sync::atomic::AtomicUsize,
        fail: bool,
    }

    impl RemoteLookup for CountingRemote {
        fn contains(&self, paper_id: &str) -> Result<bool> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if self.fail {
                return Err(Error::Transport("down".into()));
            }
            Ok(self.ids.iter().any(|i| i == paper_id))
        }
        fn name(&self) -> &str {
            "counting"
        }
    }

    #[test]
    fn two_tier_presence() {
        let dir = tempfile::tempdir().unwrap();
        let remote = Arc::new(CountingRemote {
            ids: vec!["2603.00002".into()],
            calls: Default::default(),
            fail: false,
        });
        struct Shared(Arc<CountingRemote>);
        impl RemoteLookup for Shared {
            fn contains(&self, id: &str) -> Result<bool> {
                self.0.contains(id)
            }
            fn name(&self) -> &str {
                "shared"
            }
        }
        let store = Store::with_remote(dir.path(), Box::new(Shared(remote.clone())));
        store
            .write_partition(Dataset::Papers, "2026-03-01", &[paper("2603.00001", "2026-03-01")])
            .unwrap();
        store.upsert_summary(&summary("2603.00001", "a")).unwrap();

        assert_eq!(store.has_summary("2603.00001").unwrap(), CacheStatus::CachedLocal);
        assert_eq!(remote.calls.load(Ordering::SeqCst), 0);
        assert_eq!(store.has_summary("2603.00002").unwrap(), CacheStatus::CachedRemote);
        assert_eq!(store.has_summary("2603.00009").unwrap(), CacheStatus::Absent);
    }

    #[test]
    fn remote_outage_degrades_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::with_remote(
            dir.path(),
            Box::new(CountingRemote { ids: vec![], calls: Default::default(), fail: true }),
        );
        assert_eq!(store.has_summary("2603.00001").unwrap(), CacheStatus::Absent);
        assert_eq!(store.warnings().len(), 1);
    }

    #[test]
    fn dir_remote_reads_mirror_tree() {
        let mirror = tempfile::tempdir().unwrap();
        let m = seeded(mirror.path());
        m.upsert_summary(&summary("2603.00003", "x")).unwrap();

        let local = tempfile::tempdir().unwrap();
        let store = Store::with_remote(local.path(), Box::new(DirRemote::new(mirror.path())));
        assert_eq!(store.has_summary("2603.00003").unwrap(), CacheStatus::CachedRemote);
        assert_eq!(store.has_summary("2603.00001").unwrap(), CacheStatus::Absent);

        let missing = Store::with_remote(local.path(), Box::new(DirRemote::new(local.path().join("nope"))));
        assert_eq!(missing.has_summary("2603.00003").unwrap(), CacheStatus::Absent);
        assert_eq!(missing.warnings().len(), 1);
    }

    #[test]
    fn no_temp_files_left_behind() {
        let dir = tempfile::tempdir().unwrap();
        let store = seeded(dir.path());
        store.upsert_summary(&summary("2603.00001", "a")).unwrap();
        let leftovers: Vec<_> = fs::read_dir(dir.path().join("summaries"))
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
            .collect();
        assert!(leftovers.is_empty());
    }
}
