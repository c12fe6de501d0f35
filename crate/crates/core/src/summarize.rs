//! Paper -> [`StructuredSummary`] extraction with strict parsing, repair
//! retries and a cache gate so batches can be re-run safely.

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::datamodel::{
    PaperRecord, StructuredSummary, Validate, KEYWORDS_TARGET, TOPICS_TARGET,
};
use crate::error::{Error, Result};
use crate::par::bounded_map;
use crate::provider::{
    Provider, ProviderRequest, ProviderResponse, RequestKind, ResponseSchema, SchemaField, ValueKind,
};
use crate::store::{Dataset, DeadLetter, Store};
use crate::text::collapse_whitespace;

pub const DEFAULT_PDF_BYTE_CAP: usize = 20 * 1024 * 1024;

const SUMMARY_INSTRUCTION: &str = "You are a research analyst. Read the paper and return one JSON object \
with a 2-4 sentence TL;DR (concise_summary), a pros/cons analysis (detailed_analysis), 2-3 open-vocabulary \
topic labels (topics) and 4-6 canonical technical terms (keywords). In the same response provide Simplified \
Chinese translations of every field under the same name with a _zh suffix. Return JSON only.";

const REPAIR_INSTRUCTION: &str = "Your previous reply could not be used. Return only valid JSON matching the \
schema, with every English field and its _zh counterpart, and nothing else.";

/// The eight bilingual output fields, with target arities for the lists.
pub fn summary_schema() -> ResponseSchema {
    let text = |name: &str| SchemaField {
        name: name.into(),
        kind: ValueKind::Text,
        arity: None,
    };
    let list = |name: &str, arity| SchemaField {
        name: name.into(),
        kind: ValueKind::TextList,
        arity: Some(arity),
    };
    ResponseSchema {
        fields: vec![
            text("concise_summary"),
            text("detailed_analysis"),
            list("topics", TOPICS_TARGET),
            list("keywords", KEYWORDS_TARGET),
            text("concise_summary_zh"),
            text("detailed_analysis_zh"),
            list("topics_zh", TOPICS_TARGET),
            list("keywords_zh", KEYWORDS_TARGET),
        ],
    }
}

/// Resolves a record's `pdf_ref` to bytes.
pub trait DocumentLoader: Send + Sync {
    fn load(&self, pdf_ref: &str) -> Result<Vec<u8>>;
}

/// Local paths (`/x/y.pdf` or `file:///x/y.pdf`), optionally relative to a base dir.
#[derive(Debug, Clone, Default)]
pub struct FsDocuments {
    base: Option<PathBuf>,
}

impl FsDocuments {
    pub fn new(base: Option<PathBuf>) -> Self {
        Self { base }
    }
}

impl DocumentLoader for FsDocuments {
    fn load(&self, pdf_ref: &str) -> Result<Vec<u8>> {
        let raw = pdf_ref.strip_prefix("file://").unwrap_or(pdf_ref);
        let path = match &self.base {
            Some(base) if !raw.starts_with('/') => base.join(raw),
            _ => PathBuf::from(raw),
        };
        std::fs::read(&path).map_err(|e| Error::io(path, e))
    }
}

/// Fetches `http(s)` locators.
#[derive(Debug)]
pub struct HttpDocuments {
    client: reqwest::blocking::Client,
}

impl HttpDocuments {
    pub fn new() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(Self { client })
    }
}

impl DocumentLoader for HttpDocuments {
    fn load(&self, pdf_ref: &str) -> Result<Vec<u8>> {
        let resp = self
            .client
            .get(pdf_ref)
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(resp.bytes().map_err(|e| Error::Transport(e.to_string()))?.to_vec())
    }
}

pub struct DocumentPolicy {
    pub loader: Box<dyn DocumentLoader>,
    pub max_bytes: usize,
}

impl DocumentPolicy {
    /// Uses the default 20 MB cap.
    pub fn new(loader: Box<dyn DocumentLoader>) -> Self {
        Self {
            loader,
            max_bytes: DEFAULT_PDF_BYTE_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltRequest {
    pub request: ProviderRequest,
    pub warnings: Vec<String>,
}

/// Builds the single extraction request for a paper. Title and abstract always
/// go in; document bytes only when `include_pdf` is set, the record has a
/// `pdf_ref`, and it loads within the byte cap. Any document problem degrades
/// to a text-only request with a warning.
pub fn build_request(
    record: &PaperRecord,
    include_pdf: bool,
    documents: Option<&DocumentPolicy>,
) -> BuiltRequest {
    let mut warnings = Vec::new();
    let mut document = None;
    if include_pdf {
        match (&record.pdf_ref, documents) {
            (Some(pdf_ref), Some(policy)) => match policy.loader.load(pdf_ref) {
                Ok(bytes) if bytes.len() > policy.max_bytes => warnings.push(format!(
                    "{}: document is {} bytes, over the {} byte cap; sending text only",
                    record.paper_id,
                    bytes.len(),
                    policy.max_bytes
                )),
                Ok(bytes) => document = Some(bytes),
                Err(e) => warnings.push(format!("{}: document fetch failed ({e}); sending text only", record.paper_id)),
            },
            (Some(_), None) => warnings.push(format!(
                "{}: no document loader configured; sending text only",
                record.paper_id
            )),
            (None, _) => {}
        }
    }
    BuiltRequest {
        request: ProviderRequest {
            kind: RequestKind::Summarize,
            subject: record.paper_id.clone(),
            instruction: SUMMARY_INSTRUCTION.to_string(),
            title: record.title.clone(),
            abstract_text: record.abstract_text.clone(),
            context: None,
            document,
            schema: summary_schema(),
        },
        warnings,
    }
}

fn repair_request(base: &ProviderRequest, failure: &ParseFailure) -> ProviderRequest {
    ProviderRequest {
        kind: RequestKind::Repair,
        instruction: format!("{SUMMARY_INSTRUCTION}\n\n{REPAIR_INSTRUCTION}"),
        context: Some(format!(
            "Problem: {}\nPrevious reply:\n{}",
            failure.reason, failure.raw_text
        )),
        document: None,
        ..base.clone()
    }
}

/// The response could not be turned into a valid summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseFailure {
    pub reason: String,
    pub raw_text: String,
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)
    }
}

/// First complete JSON object in `text`, ignoring prose and code fences around it.
pub fn extract_json_object(text: &str) -> Option<Map<String, Value>> {
    text.match_indices('{').find_map(|(i, _)| {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(map))) => Some(map),
            _ => None,
        }
    })
}

fn take_text(obj: &Map<String, Value>, key: &str) -> std::result::Result<String, String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.trim().to_string()),
        Some(_) => Err(format!("field {key} is not a string")),
        None => Err(format!("missing field {key}")),
    }
}

fn take_list(obj: &Map<String, Value>, key: &str) -> std::result::Result<Vec<String>, String> {
    match obj.get(key) {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(collapse_whitespace)
                    .ok_or_else(|| format!("field {key} has a non-string entry"))
            })
            .collect(),
        Some(_) => Err(format!("field {key} is not an array")),
        None => Err(format!("missing field {key}")),
    }
}

/// Drops empty and repeated labels from `primary`, and the entries at the same
/// positions from `paired` when the two lists line up.
fn dedupe_paired(primary: Vec<String>, paired: Vec<String>) -> (Vec<String>, Vec<String>) {
    let aligned = primary.len() == paired.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut out_paired = Vec::new();
    for (i, label) in primary.into_iter().enumerate() {
        if label.is_empty() || !seen.insert(label.clone()) {
            continue;
        }
        if aligned {
            out_paired.push(paired[i].clone());
        }
        out.push(label);
    }
    if !aligned {
        out_paired = paired;
    }
    (out, out_paired)
}

/// Parses a provider response into a validated summary. Topic and keyword
/// strings are whitespace-normalized and de-duplicated; nothing else is changed
/// or invented. Missing fields and hard-bound violations are failures.
pub fn parse_summary(
    response: &ProviderResponse,
    paper_id: &str,
    extracted_at: DateTime<Utc>,
) -> std::result::Result<StructuredSummary, ParseFailure> {
    let fail = |reason: String| ParseFailure {
        reason,
        raw_text: response.raw_text.clone(),
    };
    let obj = extract_json_object(&response.raw_text)
        .ok_or_else(|| fail("no JSON object found in response".into()))?;

    let (topics, topics_zh) = dedupe_paired(
        take_list(&obj, "topics").map_err(fail)?,
        take_list(&obj, "topics_zh").map_err(fail)?,
    );
    let (keywords, keywords_zh) = dedupe_paired(
        take_list(&obj, "keywords").map_err(fail)?,
        take_list(&obj, "keywords_zh").map_err(fail)?,
    );
    let summary = StructuredSummary {
        paper_id: paper_id.to_string(),
        concise_summary: take_text(&obj, "concise_summary").map_err(fail)?,
        detailed_analysis: take_text(&obj, "detailed_analysis").map_err(fail)?,
        topics,
        keywords,
        concise_summary_zh: take_text(&obj, "concise_summary_zh").map_err(fail)?,
        detailed_analysis_zh: take_text(&obj, "detailed_analysis_zh").map_err(fail)?,
        topics_zh,
        keywords_zh,
        provider_id: response.provider_id.clone(),
        extracted_at,
    };
    let report = summary.validate();
    if !report.is_ok() {
        return Err(fail(report.describe_hard()));
    }
    for w in report.warnings() {
        tracing::debug!("{paper_id}: {}: {}", w.field, w.message);
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummarizeFailure {
    pub paper_id: String,
    pub attempts: u32,
    pub error: String,
    pub last_response: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummarizeOutcome {
    pub summary: StructuredSummary,
    pub attempts: u32,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BatchReport {
    pub succeeded: usize,
    pub skipped_cached: usize,
    pub failed: usize,
    pub failures: Vec<SummarizeFailure>,
    pub warnings: Vec<String>,
}

impl BatchReport {
    pub fn total(&self) -> usize {
        self.succeeded + self.skipped_cached + self.failed
    }
}

#[derive(Debug, Clone)]
pub struct SummarizeOptions {
    pub max_attempts: u32,
    pub concurrency: usize,
    pub include_pdf: bool,
}

impl Default for SummarizeOptions {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            concurrency: 4,
            include_pdf: false,
        }
    }
}

type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub struct Summarizer<'a> {
    store: &'a Store,
    provider: &'a dyn Provider,
    options: SummarizeOptions,
    documents: Option<DocumentPolicy>,
    clock: Clock,
}

impl<'a> Summarizer<'a> {
    pub fn new(store: &'a Store, provider: &'a dyn Provider) -> Self {
        Self {
            store,
            provider,
            options: SummarizeOptions::default(),
            documents: None,
            clock: Arc::new(Utc::now),
        }
    }

    pub fn with_options(mut self, options: SummarizeOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_documents(mut self, documents: DocumentPolicy) -> Self {
        self.documents = Some(documents);
        self
    }

    /// Source of `extracted_at` timestamps.
    pub fn with_clock(mut self, clock: impl Fn() -> DateTime<Utc> + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    /// Calls the provider and parses, re-prompting with a repair instruction
    /// until `max_attempts` calls have been spent. Success is upserted into the
    /// store; exhaustion is written to the dead-letter list.
    pub fn summarize_one(&self, record: &PaperRecord) -> std::result::Result<SummarizeOutcome, SummarizeFailure> {
        let max_attempts = self.options.max_attempts.max(1);
        let built = build_request(record, self.options.include_pdf, self.documents.as_ref());
        let mut warnings = built.warnings;
        let mut request = built.request;
        let mut last_error = String::new();
        let mut last_response = None;

        for attempt in 1..=max_attempts {
            match self.provider.complete(&request) {
                Ok(resp) => match parse_summary(&resp, &record.paper_id, (self.clock)()) {
                    Ok(summary) => {
                        if let Err(e) = self.store.upsert_summary(&summary) {
                            let failure = SummarizeFailure {
                                paper_id: record.paper_id.clone(),
                                attempts: attempt,
                                error: format!("store: {e}"),
                                last_response: Some(resp.raw_text),
                            };
                            self.dead_letter(record, &failure);
                            return Err(failure);
                        }
                        self.clear_dead_letter(record);
                        return Ok(SummarizeOutcome {
                            summary,
                            attempts: attempt,
                            warnings,
                        });
                    }
                    Err(failure) => {
                        warnings.push(format!("{}: attempt {attempt}: {}", record.paper_id, failure.reason));
                        last_error = failure.reason.clone();
                        last_response = Some(failure.raw_text.clone());
                        request = repair_request(&request, &failure);
                    }
                },
                Err(e) => {
                    warnings.push(format!("{}: attempt {attempt}: {e}", record.paper_id));
                    last_error = e.to_string();
                }
            }
        }
        let failure = SummarizeFailure {
            paper_id: record.paper_id.clone(),
            attempts: max_attempts,
            error: last_error,
            last_response,
        };
        self.dead_letter(record, &failure);
        Err(failure)
    }

    fn dead_letter(&self, record: &PaperRecord, failure: &SummarizeFailure) {
        let letter = DeadLetter {
            paper_id: failure.paper_id.clone(),
            published_at: record.published_at,
            attempts: failure.attempts,
            error: failure.error.clone(),
            last_response: failure.last_response.clone(),
        };
        let key = record.published_at.to_string();
        let result = self.store.modify_partition(Dataset::DeadLetter, &key, |letters: &mut Vec<DeadLetter>| {
            letters.retain(|l| l.paper_id != letter.paper_id);
            letters.push(letter);
        });
        if let Err(e) = result {
            tracing::error!("could not record dead letter for {}: {e}", record.paper_id);
        }
    }

    fn clear_dead_letter(&self, record: &PaperRecord) {
        let key = record.published_at.to_string();
        if !self.store.partition_path(Dataset::DeadLetter, &key).exists() {
            return;
        }
        let _ = self.store.modify_partition(Dataset::DeadLetter, &key, |letters: &mut Vec<DeadLetter>| {
            letters.retain(|l| l.paper_id != record.paper_id);
        });
    }

    /// Skips papers any cache tier already has, then summarizes the rest with
    /// bounded parallelism. Repeated ids in `records` count as cached.
    pub fn summarize_batch(&self, records: &[PaperRecord]) -> Result<BatchReport> {
        let mut report = BatchReport::default();
        let mut seen = HashSet::new();
        let mut todo = Vec::new();
        for r in records {
            if !seen.insert(r.paper_id.as_str()) || self.store.has_summary(&r.paper_id)?.is_cached() {
                report.skipped_cached += 1;
            } else {
                todo.push(r);
            }
        }
        let results = bounded_map(&todo, self.options.concurrency, |r| self.summarize_one(r));
        for result in results {
            match result {
                Ok(mut outcome) => {
                    report.succeeded += 1;
                    report.warnings.append(&mut outcome.warnings);
                }
                Err(failure) => {
                    report.failed += 1;
                    report.failures.push(failure);
                }
            }
        }
        report.warnings.extend(self.store.warnings());
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::{MockProvider, ScriptedProvider};
    use chrono::NaiveDate;

    fn record(id: &str, pdf: Option<&str>) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            version: None,
            title: "Efficient video diffusion transformers".into(),
            authors: vec![],
            abstract_text: "We train video diffusion transformers. Video diffusion is costly.".into(),
            upvotes: 5,
            published_at: NaiveDate::from_ymd_opt(2026, 3, 2).unwrap(),
            pdf_ref: pdf.map(str::to_string),
        }
    }

    fn response(raw: &str) -> ProviderResponse {
        ProviderResponse {
            raw_text: raw.into(),
            provider_id: "test".into(),
            latency: Duration::ZERO,
        }
    }

    const VALID: &str = r#"{"concise_summary":"s","detailed_analysis":"d",
        "topics":["Video Generation","Diffusion  Models","Efficient Inference"],
        "keywords":["DiT","flow matching","VAE","distillation","caching"],
        "concise_summary_zh":"s","detailed_analysis_zh":"d",
        "topics_zh":["a","b","c"],"keywords_zh":["1","2","3","4","5"]}"#;

    fn epoch() -> DateTime<Utc> {
        DateTime::from_timestamp(0, 0).unwrap()
    }

    struct FailingLoader;
    impl DocumentLoader for FailingLoader {
        fn load(&self, _: &str) -> Result<Vec<u8>> {
            Err(Error::Transport("404".into()))
        }
    }

    struct BytesLoader(usize);
    impl DocumentLoader for BytesLoader {
        fn load(&self, _: &str) -> Result<Vec<u8>> {
            Ok(vec![0; self.0])
        }
    }

    #[test]
    fn request_text_only_without_pdf_ref() {
        let policy = DocumentPolicy { loader: Box::new(BytesLoader(10)), max_bytes: 100 };
        let built = build_request(&record("2603.00001", None), true, Some(&policy));
        assert!(built.request.document.is_none());
        assert!(built.warnings.is_empty());
        assert!(built.request.abstract_text.contains("costly"));
    }

    #[test]
    fn request_flag_off_ignores_pdf() {
        let policy = DocumentPolicy { loader: Box::new(BytesLoader(10)), max_bytes: 100 };
        let built = build_request(&record("2603.00001", Some("x.pdf")), false, Some(&policy));
        assert!(built.request.document.is_none());
        let built = build_request(&record("2603.00001", Some("x.pdf")), true, Some(&policy));
        assert_eq!(built.request.document.as_ref().map(Vec::len), Some(10));
    }

    #[test]
    fn request_degrades_on_fetch_failure_and_cap() {
        let failing = DocumentPolicy { loader: Box::new(FailingLoader), max_bytes: 100 };
        let built = build_request(&record("2603.00001", Some("x.pdf")), true, Some(&failing));
        assert!(built.request.document.is_none());
        assert_eq!(built.warnings.len(), 1);

        let big = DocumentPolicy { loader: Box::new(BytesLoader(101)), max_bytes: 100 };
        let built = build_request(&record("2603.00001", Some("x.pdf")), true, Some(&big));
        assert!(built.request.document.is_none());
        assert!(built.warnings[0].contains("cap"));
    }

    #[test]
    fn schema_has_eight_bilingual_fields_and_target_arities() {
        let schema = summary_schema();
        assert_eq!(
            schema.field_names(),
            [
                "concise_summary", "detailed_analysis", "topics", "keywords",
                "concise_summary_zh", "detailed_analysis_zh", "topics_zh", "keywords_zh"
            ]
        );
        assert_eq!(schema.get("topics").unwrap().arity, Some((2, 3)));
        assert_eq!(schema.get("keywords").unwrap().arity, Some((4, 6)));
        let req = build_request(&record("2603.00001", None), false, None).request;
        assert!(req.instruction.contains("Chinese") && req.instruction.contains("_zh"));
    }

    #[test]
    fn parses_clean_json() {
        let s = parse_summary(&response(VALID), "2603.00001", epoch()).unwrap();
        assert_eq!(s.topics, ["Video Generation", "Diffusion Models", "Efficient Inference"]);
        assert_eq!(s.keywords.len(), 5);
        assert_eq!(s.provider_id, "test");
    }

    #[test]
    fn parses_fenced_json_with_prose() {
        let raw = format!("Sure! Here it is:\n```json\n{VALID}\n```\nLet me know {{if}} needed.");
        assert!(parse_summary(&response(&raw), "2603.00001", epoch()).is_ok());
    }

    #[test]
    fn zero_topics_is_failure() {
        let raw = VALID
            .replace(r#"["Video Generation","Diffusion  Models","Efficient Inference"]"#, "[]")
            .replace(r#"["a","b","c"]"#, "[]");
        let err = parse_summary(&response(&raw), "2603.00001", epoch()).unwrap_err();
        assert!(err.reason.contains("topics"));
        assert_eq!(err.raw_text, raw);
    }

    #[test]
    fn missing_field_and_garbage_fail() {
        let raw = VALID.replace(r#""detailed_analysis":"d","#, "");
        assert!(parse_summary(&response(&raw), "x", epoch()).unwrap_err().reason.contains("detailed_analysis"));
        assert!(parse_summary(&response("no json here"), "x", epoch()).is_err());
    }

    #[test]
    fn duplicate_topics_collapse_with_their_translation() {
        let raw = VALID.replace("\"Efficient Inference\"", "\" Video   Generation\"");
        let s = parse_summary(&response(&raw), "x", epoch()).unwrap();
        assert_eq!(s.topics, ["Video Generation", "Diffusion Models"]);
        assert_eq!(s.topics_zh, ["a", "b"]);
    }

    fn store_with(records: &[PaperRecord]) -> (tempfile::TempDir, Store) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        for r in records {
            store
                .modify_partition(Dataset::Papers, &r.published_at.to_string(), |v: &mut Vec<PaperRecord>| {
                    v.push(r.clone())
                })
                .unwrap();
        }
        (dir, store)
    }

    #[test]
    fn first_valid_response_is_one_call() {
        let rec = record("2603.00001", None);
        let (_dir, store) = store_with(std::slice::from_ref(&rec));
        let provider = ScriptedProvider::new([VALID]);
        let out = Summarizer::new(&store, &provider).summarize_one(&rec).unwrap();
        assert_eq!(out.attempts, 1);
        assert_eq!(provider.calls(), 1);
        assert!(store.has_summary("2603.00001").unwrap().is_cached());
    }

    #[test]
    fn retry_after_one_failure() {
        let rec = record("2603.00001", None);
        let (_dir, store) = store_with(std::slice::from_ref(&rec));
        let provider = ScriptedProvider::new(["not json", VALID]);
        let out = Summarizer::new(&store, &provider).summarize_one(&rec).unwrap();
        assert_eq!(out.attempts, 2);
        assert_eq!(provider.calls(), 2);
        let second = &provider.requests()[1];
        assert_eq!(second.kind, RequestKind::Repair);
        assert!(second.instruction.contains("only valid JSON"));
        assert!(second.context.as_deref().unwrap().contains("not json"));
    }

    #[test]
    fn exhaustion_dead_letters() {
        let rec = record("2603.00001", None);
        let (dir, store) = store_with(std::slice::from_ref(&rec));
        let provider = ScriptedProvider::new(["{}"]);
        let opts = SummarizeOptions { max_attempts: 3, ..Default::default() };
        let failure = Summarizer::new(&store, &provider).with_options(opts).summarize_one(&rec).unwrap_err();
        assert_eq!(provider.calls(), 3);
        assert_eq!(failure.attempts, 3);
        let letters: Vec<DeadLetter> = store.read_partition(Dataset::DeadLetter, "2026-03-02").unwrap();
        assert_eq!(letters.len(), 1);
        assert!(dir.path().join("deadletter/2026-03-02.jsonl").exists());

        // a later success clears the entry
        let ok = ScriptedProvider::new([VALID]);
        Summarizer::new(&store, &ok).summarize_one(&rec).unwrap();
        let letters: Vec<DeadLetter> = store.read_partition(Dataset::DeadLetter, "2026-03-02").unwrap();
        assert!(letters.is_empty());
    }

    #[test]
    fn batch_skips_cached_and_counts_sum() {
        let records: Vec<PaperRecord> = (1..=10).map(|i| record(&format!("2603.{i:05}"), None)).collect();
        let (_dir, store) = store_with(&records);
        let mock = MockProvider::new();
        let summarizer = Summarizer::new(&store, &mock).with_clock(epoch);
        summarizer.summarize_batch(&records[..4]).unwrap();

        let counting = crate::provider::CountingProvider::new(MockProvider::new());
        let report = Summarizer::new(&store, &counting).summarize_batch(&records).unwrap();
        assert_eq!(report.skipped_cached, 4);
        assert_eq!(report.succeeded, 6);
        assert!(counting.calls() <= 6);
        assert_eq!(report.total(), 10);

        let rerun = Summarizer::new(&store, &counting).summarize_batch(&records).unwrap();
        assert_eq!((rerun.succeeded, rerun.skipped_cached), (0, 10));

        let empty = Summarizer::new(&store, &counting).summarize_batch(&[]).unwrap();
        assert_eq!(empty.total(), 0);
    }

    #[test]
    fn mock_summary_is_deterministic_through_parse() {
        let rec = record("2603.00001", None);
        let req = build_request(&rec, false, None).request;
        let a = parse_summary(&MockProvider.complete(&req).unwrap(), &rec.paper_id, epoch()).unwrap();
        let b = parse_summary(&MockProvider.complete(&req).unwrap(), &rec.paper_id, epoch()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.topics, ["Efficient", "Video"]);
        assert_eq!(a.keywords, ["diffusion", "video", "costly", "train"]);
    }
}
