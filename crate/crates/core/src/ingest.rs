//! Trending-feed ingestion: fetch a day's entries, normalize them into
//! [`PaperRecord`]s and merge them into the `papers` dataset.
//!
//! The feed payload is a JSON array. Both the flat shape
//! (`{"id", "title", "authors": [..], "summary", "upvotes", "publishedAt"}`) and
//! the nested daily-papers shape (`{"paper": {...}, "publishedAt": ..}`) are read.
//! A malformed entry is skipped with a warning; it never fails the batch.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Duration;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::datamodel::{is_arxiv_id, PaperRecord};
use crate::error::{Error, Result};
use crate::par::{bounded_map, RateLimiter};
use crate::store::{Dataset, Store};
use crate::text::collapse_whitespace;

pub const DEFAULT_FEED_URL: &str = "https://huggingface.co/api/daily_papers";

/// One raw entry as listed by the feed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedEntry {
    pub id: String,
    pub title: Option<String>,
    pub authors: Vec<String>,
    pub summary: Option<String>,
    pub upvotes: Option<i64>,
    pub published_at: Option<String>,
    pub pdf_url: Option<String>,
}

impl FeedEntry {
    /// Calendar date prefix of `published_at` (`2026-03-02T10:00:00Z` -> 2026-03-02).
    pub fn listed_date(&self) -> Option<NaiveDate> {
        let ts = self.published_at.as_deref()?;
        ts.get(..10)?.parse().ok()
    }
}

fn str_field<'a>(objs: &[&'a Value], keys: &[&str]) -> Option<&'a str> {
    objs.iter()
        .flat_map(|o| keys.iter().map(move |k| o.get(k)))
        .flatten()
        .find_map(Value::as_str)
}

fn entry_from_value(v: &Value) -> std::result::Result<FeedEntry, String> {
    if !v.is_object() {
        return Err("entry is not an object".into());
    }
    let paper = v.get("paper").filter(|p| p.is_object());
    // Nested fields win for paper metadata; the listing's own timestamp wins for the date.
    let meta: Vec<&Value> = paper.into_iter().chain(std::iter::once(v)).collect();
    let listing: Vec<&Value> = std::iter::once(v).chain(paper).collect();

    let id = str_field(&meta, &["id", "arxiv_id", "paper_id"])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or("missing id")?
        .to_string();

    let authors = meta
        .iter()
        .find_map(|o| o.get("authors").and_then(Value::as_array))
        .map(|list| {
            list.iter()
                .filter_map(|a| a.as_str().or_else(|| a.get("name").and_then(Value::as_str)))
                .map(collapse_whitespace)
                .filter(|a| !a.is_empty())
                .collect()
        })
        .unwrap_or_default();

    let upvotes = match meta.iter().find_map(|o| o.get("upvotes")) {
        None | Some(Value::Null) => None,
        Some(n) => Some(n.as_i64().ok_or_else(|| format!("{id}: upvotes is not an integer"))?),
    };

    Ok(FeedEntry {
        title: str_field(&meta, &["title"]).map(str::to_string),
        summary: str_field(&meta, &["summary", "abstract"]).map(str::to_string),
        published_at: str_field(&listing, &["publishedAt", "published_at", "date"]).map(str::to_string),
        pdf_url: str_field(&meta, &["pdf_url", "pdfUrl"]).map(str::to_string),
        authors,
        upvotes,
        id,
    })
}

/// Parses a feed payload for `date`. Entries that fail to parse, or that are
/// listed under a different day, are dropped with a warning. Undated entries
/// inherit `date`.
pub fn parse_feed(payload: &str, date: NaiveDate) -> (Vec<FeedEntry>, Vec<String>) {
    let mut warnings = Vec::new();
    let values = match serde_json::from_str::<Value>(payload) {
        Ok(Value::Array(items)) => items,
        Ok(_) => {
            warnings.push(format!("{date}: feed payload is not a JSON array"));
            return (Vec::new(), warnings);
        }
        Err(e) => {
            warnings.push(format!("{date}: unparseable feed payload: {e}"));
            return (Vec::new(), warnings);
        }
    };
    let mut entries = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        match entry_from_value(v) {
            Ok(mut e) => match e.listed_date() {
                Some(d) if d != date => {
                    warnings.push(format!("{date}: entry {} is dated {d}, skipped", e.id));
                }
                Some(_) => entries.push(e),
                None => {
                    e.published_at = Some(date.to_string());
                    entries.push(e);
                }
            },
            Err(msg) => warnings.push(format!("{date}: entry #{i} skipped: {msg}")),
        }
    }
    (entries, warnings)
}

/// Splits `"2403.01234v2"` into `("2403.01234", Some(2))`. Strips an `arXiv:`
/// prefix and a trailing `.pdf`. Returns `None` if the result is not an arXiv id.
pub fn canonical_arxiv_id(raw: &str) -> Option<(String, Option<u32>)> {
    let mut id = raw.trim();
    for prefix in ["arXiv:", "arxiv:"] {
        id = id.strip_prefix(prefix).unwrap_or(id);
    }
    id = id.strip_suffix(".pdf").unwrap_or(id);
    if !is_arxiv_id(id) {
        return None;
    }
    match id.rfind('v') {
        Some(pos) if pos > 0 && id[pos + 1..].chars().all(|c| c.is_ascii_digit()) && pos + 1 < id.len() => {
            let version = id[pos + 1..].parse().ok()?;
            Some((id[..pos].to_string(), Some(version)))
        }
        _ => Some((id.to_string(), None)),
    }
}

/// Turns a feed entry into a [`PaperRecord`]. Missing upvotes default to 0;
/// title and abstract whitespace is collapsed. The error string is the warning
/// to record for the rejected entry.
pub fn normalize(entry: &FeedEntry) -> std::result::Result<PaperRecord, String> {
    let (paper_id, version) =
        canonical_arxiv_id(&entry.id).ok_or_else(|| format!("unparseable arXiv id {:?}", entry.id))?;
    let title = collapse_whitespace(entry.title.as_deref().unwrap_or_default());
    if title.is_empty() {
        return Err(format!("{paper_id}: missing title"));
    }
    let abstract_text = collapse_whitespace(entry.summary.as_deref().unwrap_or_default());
    if abstract_text.is_empty() {
        return Err(format!("{paper_id}: missing abstract"));
    }
    let published_at = entry
        .listed_date()
        .ok_or_else(|| format!("{paper_id}: missing or invalid publication date"))?;
    let upvotes = entry.upvotes.unwrap_or(0);
    if upvotes < 0 {
        return Err(format!("{paper_id}: negative upvote count {upvotes}"));
    }
    Ok(PaperRecord {
        paper_id,
        version,
        title,
        authors: entry.authors.iter().map(|a| collapse_whitespace(a)).collect(),
        abstract_text,
        upvotes,
        published_at,
        pdf_ref: entry.pdf_url.clone().filter(|u| !u.trim().is_empty()),
    })
}

/// Re-wraps a normalized record as a feed entry (used to check normalize is idempotent).
pub fn to_entry(record: &PaperRecord) -> FeedEntry {
    let id = match record.version {
        Some(v) => format!("{}v{v}", record.paper_id),
        None => record.paper_id.clone(),
    };
    FeedEntry {
        id,
        title: Some(record.title.clone()),
        authors: record.authors.clone(),
        summary: Some(record.abstract_text.clone()),
        upvotes: Some(record.upvotes),
        published_at: Some(record.published_at.to_string()),
        pdf_url: record.pdf_ref.clone(),
    }
}

/// True when `candidate` should replace `current` for the same paper:
/// more upvotes, or equal upvotes and an earlier date.
fn supersedes(candidate: &PaperRecord, current: &PaperRecord) -> bool {
    candidate.upvotes > current.upvotes
        || (candidate.upvotes == current.upvotes && candidate.published_at < current.published_at)
}

/// One record per paper_id. Among duplicates the highest upvote count wins,
/// ties going to the earliest date. Output follows first-occurrence order.
pub fn dedupe_month(records: &[PaperRecord]) -> Vec<PaperRecord> {
    let mut slot: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<PaperRecord> = Vec::new();
    for r in records {
        match slot.get(r.paper_id.as_str()) {
            Some(&i) => {
                if supersedes(r, &out[i]) {
                    out[i] = r.clone();
                }
            }
            None => {
                slot.insert(&r.paper_id, out.len());
                out.push(r.clone());
            }
        }
    }
    out
}

/// Retryable vs. terminal fetch failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchError {
    Transient(String),
    Fatal(String),
}

/// Where feed payloads come from.
pub trait FeedSource: Send + Sync {
    /// Raw payload for `date`, or `None` when the feed has nothing for that day.
    fn fetch(&self, date: NaiveDate) -> std::result::Result<Option<String>, FetchError>;

    /// Whether calls should go through the request-rate cap.
    fn is_remote(&self) -> bool {
        false
    }
}

/// Reads `<fixtures_dir>/feed/<date>.json`.
#[derive(Debug, Clone)]
pub struct FixtureFeed {
    dir: PathBuf,
}

impl FixtureFeed {
    pub fn new(fixtures_dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: fixtures_dir.into(),
        }
    }
}

impl FeedSource for FixtureFeed {
    fn fetch(&self, date: NaiveDate) -> std::result::Result<Option<String>, FetchError> {
        let path = self.dir.join("feed").join(format!("{date}.json"));
        match std::fs::read_to_string(&path) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(FetchError::Fatal(format!("{}: {e}", path.display()))),
        }
    }
}

/// `GET <url>?date=YYYY-MM-DD`, optional bearer token.
#[derive(Debug)]
pub struct HttpFeed {
    url: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpFeed {
    pub fn new(url: impl Into<String>, token: Option<String>) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .user_agent(concat!("paperbrew/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(Self {
            url: url.into(),
            token,
            client,
        })
    }
}

impl FeedSource for HttpFeed {
    fn fetch(&self, date: NaiveDate) -> std::result::Result<Option<String>, FetchError> {
        let mut req = self.client.get(&self.url).query(&[("date", date.to_string())]);
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| FetchError::Transient(e.to_string()))?;
        let status = resp.status();
        if status == reqwest::StatusCode::NOT_FOUND {
            return Ok(None);
        }
        if status.is_server_error() || status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            return Err(FetchError::Transient(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(FetchError::Fatal(format!("HTTP {status}")));
        }
        resp.text().map(Some).map_err(|e| FetchError::Transient(e.to_string()))
    }

    fn is_remote(&self) -> bool {
        true
    }
}

/// Exponential backoff: wait `base * factor^(k-1)` after the k-th failure.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub base: Duration,
    pub factor: u32,
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            base: Duration::from_secs(1),
            factor: 2,
            max_attempts: 5,
        }
    }
}

impl RetryPolicy {
    pub fn delay_after(&self, failures: u32) -> Duration {
        self.base * self.factor.saturating_pow(failures.saturating_sub(1))
    }
}

/// Looks up an abstract when the feed omitted it.
pub trait AbstractSource: Send + Sync {
    fn abstract_for(&self, paper_id: &str) -> Option<String>;
}

/// Reads `<dir>/<paper_id>.txt` (slashes in legacy ids become `_`).
#[derive(Debug, Clone)]
pub struct FixtureAbstracts {
    dir: PathBuf,
}

impl FixtureAbstracts {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl AbstractSource for FixtureAbstracts {
    fn abstract_for(&self, paper_id: &str) -> Option<String> {
        let name = format!("{}.txt", paper_id.replace('/', "_"));
        std::fs::read_to_string(self.dir.join(name)).ok()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DailyFetch {
    pub date: NaiveDate,
    pub entries: Vec<FeedEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub days: usize,
    pub entries: usize,
    pub stored: usize,
    pub rejected: usize,
    pub warnings: Vec<String>,
}

pub struct Ingestor {
    source: Box<dyn FeedSource>,
    retry: RetryPolicy,
    limiter: RateLimiter,
    concurrency: usize,
    today: NaiveDate,
    enricher: Option<Box<dyn AbstractSource>>,
    enriched: Mutex<HashMap<String, Option<String>>>,
}

impl Ingestor {
    pub fn new(source: Box<dyn FeedSource>) -> Self {
        Self {
            source,
            retry: RetryPolicy::default(),
            limiter: RateLimiter::per_second(2.0),
            concurrency: 4,
            today: chrono::Utc::now().date_naive(),
            enricher: None,
            enriched: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate_limit(mut self, per_second: f64) -> Self {
        self.limiter = RateLimiter::per_second(per_second);
        self
    }

    pub fn with_concurrency(mut self, n: usize) -> Self {
        self.concurrency = n.max(1);
        self
    }

    /// Overrides "today" for the future-date check.
    pub fn with_today(mut self, today: NaiveDate) -> Self {
        self.today = today;
        self
    }

    pub fn with_abstract_source(mut self, source: Box<dyn AbstractSource>) -> Self {
        self.enricher = Some(source);
        self
    }

    fn fetch_payload(&self, date: NaiveDate) -> Result<Option<String>> {
        let mut failures = 0;
        loop {
            if self.source.is_remote() {
                self.limiter.acquire();
            }
            match self.source.fetch(date) {
                Ok(p) => return Ok(p),
                Err(FetchError::Fatal(msg)) => return Err(Error::Transport(msg)),
                Err(FetchError::Transient(msg)) => {
                    failures += 1;
                    if failures >= self.retry.max_attempts {
                        return Err(Error::Transport(format!(
                            "{date}: giving up after {failures} attempts: {msg}"
                        )));
                    }
                    let delay = self.retry.delay_after(failures);
                    tracing::warn!("{date}: fetch failed ({msg}), retrying in {delay:?}");
                    std::thread::sleep(delay);
                }
            }
        }
    }

    /// All entries the feed lists for `date`.
    pub fn fetch_daily(&self, date: NaiveDate) -> Result<DailyFetch> {
        if date > self.today {
            return Err(Error::Precondition(format!("{date} is in the future")));
        }
        let Some(payload) = self.fetch_payload(date)? else {
            return Ok(DailyFetch {
                date,
                ..Default::default()
            });
        };
        let (entries, warnings) = parse_feed(&payload, date);
        for w in &warnings {
            tracing::warn!("{w}");
        }
        Ok(DailyFetch {
            date,
            entries,
            warnings,
        })
    }

    fn enrich(&self, entry: &mut FeedEntry) {
        let Some(source) = &self.enricher else { return };
        if entry.summary.as_deref().is_some_and(|s| !s.trim().is_empty()) {
            return;
        }
        let Some((id, _)) = canonical_arxiv_id(&entry.id) else { return };
        let mut cache = self.enriched.lock().unwrap();
        let found = cache.entry(id.clone()).or_insert_with(|| source.abstract_for(&id));
        entry.summary = found.clone();
    }

    /// Fetches, normalizes and merges `[from, to]` into the `papers` dataset.
    /// Existing records are kept or replaced by the dedupe rule, so re-running
    /// a range picks up upvote changes without duplicating papers.
    pub fn ingest_range(&self, store: &Store, from: NaiveDate, to: NaiveDate) -> Result<IngestReport> {
        if from > to {
            return Err(Error::Precondition(format!("inverted range: {from} > {to}")));
        }
        let dates: Vec<NaiveDate> = from.iter_days().take_while(|d| *d <= to).collect();
        let fetched = bounded_map(&dates, self.concurrency, |d| self.fetch_daily(*d));

        let mut report = IngestReport {
            days: dates.len(),
            ..Default::default()
        };
        for day in fetched {
            let mut day = day?;
            report.entries += day.entries.len();
            report.warnings.append(&mut day.warnings);
            let mut records = Vec::new();
            for entry in &mut day.entries {
                self.enrich(entry);
                match normalize(entry) {
                    Ok(r) => records.push(r),
                    Err(w) => {
                        tracing::warn!("{w}");
                        report.rejected += 1;
                        report.warnings.push(w);
                    }
                }
            }
            let records = dedupe_month(&records);
            if records.is_empty() {
                continue;
            }
            report.stored += records.len();
            store.modify_partition(Dataset::Papers, &day.date.to_string(), |existing: &mut Vec<PaperRecord>| {
                let mut all = std::mem::take(existing);
                all.extend(records);
                *existing = dedupe_month(&all);
            })?;
        }
        Ok(report)
    }
}

/// Distinct dates present in `records`; used by callers summarizing ranges.
pub fn dates_of(records: &[PaperRecord]) -> Vec<NaiveDate> {
    let mut seen = HashSet::new();
    let mut out: Vec<_> = records
        .iter()
        .map(|r| r.published_at)
        .filter(|d| seen.insert(*d))
        .collect();
    out.sort();
    out
}
