//! Language-model provider interface and the shipped implementations:
//! a deterministic mock, fixture replay, a scripted queue for tests, and a
//! thin OpenAI-compatible HTTP adapter.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::text::{title_case, word_tokens};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Text,
    TextList,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaField {
    pub name: String,
    pub kind: ValueKind,
    /// Inclusive arity bounds for lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<(usize, usize)>,
}

/// Field names and arities the response must carry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseSchema {
    pub fields: Vec<SchemaField>,
}

impl ResponseSchema {
    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&SchemaField> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Compact JSON description embedded in prompts.
    pub fn describe(&self) -> String {
        let mut obj = serde_json::Map::new();
        for f in &self.fields {
            let v = match (f.kind, f.arity) {
                (ValueKind::Text, _) => json!("string"),
                (ValueKind::TextList, Some((lo, hi))) => json!(format!("array of {lo}-{hi} strings")),
                (ValueKind::TextList, None) => json!("array of strings"),
            };
            obj.insert(f.name.clone(), v);
        }
        Value::Object(obj).to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestKind {
    Summarize,
    /// Re-prompt after an unusable response.
    Repair,
    Consolidate,
    Narrative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub kind: RequestKind,
    /// Paper id or other stable key (month, date) identifying the request subject.
    pub subject: String,
    pub instruction: String,
    pub title: String,
    pub abstract_text: String,
    /// Extra task input (label inventories, report statistics).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(skip)]
    pub document: Option<Vec<u8>>,
    pub schema: ResponseSchema,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderResponse {
    pub raw_text: String,
    pub provider_id: String,
    pub latency: Duration,
}

pub trait Provider: Send + Sync {
    fn id(&self) -> &str;

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse>;
}

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "across", "after", "again", "against", "all", "also", "although", "am",
    "among", "an", "and", "any", "are", "as", "at", "be", "because", "been", "before", "being",
    "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing", "during", "each",
    "either", "et", "etc", "few", "for", "from", "further", "had", "has", "have", "having", "he",
    "her", "here", "hers", "him", "his", "how", "however", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "may", "me", "might", "more", "most", "much", "must", "my", "new",
    "no", "nor", "not", "novel", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
    "out", "over", "own", "paper", "propose", "proposed", "same", "she", "should", "show", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "then", "there", "these",
    "they", "this", "those", "through", "thus", "to", "too", "under", "until", "up", "upon", "us",
    "use", "used", "using", "very", "via", "was", "we", "were", "what", "when", "where", "whether",
    "which", "while", "who", "whom", "why", "will", "with", "within", "without", "would", "yet",
    "you", "your",
];

/// Prefix applied to English text to fill `_zh` fields in the mock.
pub const MOCK_ZH_MARKER: &str = "[zh] ";

fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Deterministic stand-in for a model. Output is a pure function of the request.
///
/// Summaries: topics are the first two distinct title tokens longer than three
/// characters, title-cased; keywords are the four most frequent non-stopword
/// abstract tokens (lowercased, ties lexicographic); `_zh` fields repeat the
/// English ones behind [`MOCK_ZH_MARKER`].
#[derive(Debug, Clone, Default)]
pub struct MockProvider;

impl MockProvider {
    pub fn new() -> Self {
        Self
    }

    pub fn topics_for(title: &str) -> Vec<String> {
        let mut topics: Vec<String> = Vec::new();
        for tok in word_tokens(title) {
            if tok.chars().count() <= 3 {
                continue;
            }
            let t = title_case(tok);
            if !topics.contains(&t) {
                topics.push(t);
            }
            if topics.len() == 2 {
                break;
            }
        }
        if topics.is_empty() {
            topics.push("General".into());
        }
        topics
    }

    pub fn keywords_for(abstract_text: &str) -> Vec<String> {
        let mut freq: BTreeMap<String, usize> = BTreeMap::new();
        for tok in word_tokens(abstract_text) {
            let lower = tok.to_lowercase();
            if lower.chars().count() < 2 || is_stopword(&lower) || lower.chars().all(|c| c.is_ascii_digit()) {
                continue;
            }
            *freq.entry(lower).or_default() += 1;
        }
        let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut keywords: Vec<String> = ranked.into_iter().take(4).map(|(k, _)| k).collect();
        if keywords.is_empty() {
            keywords.push("general".into());
        }
        keywords
    }

    fn summary_json(title: &str, abstract_text: &str) -> Value {
        let topics = Self::topics_for(title);
        let keywords = Self::keywords_for(abstract_text);
        let first_sentence = abstract_text
            .split_inclusive(". ")
            .next()
            .unwrap_or(abstract_text)
            .trim()
            .to_string();
        let concise = format!("{title}: {first_sentence}");
        let detailed = format!(
            "Strengths: addresses {} with emphasis on {}. Limitations: evaluated only on the setting described in the abstract.",
            topics.join(" and "),
            keywords.join(", ")
        );
        let zh = |s: &str| format!("{MOCK_ZH_MARKER}{s}");
        json!({
            "concise_summary": concise,
            "detailed_analysis": detailed,
            "topics": topics,
            "keywords": keywords,
            "concise_summary_zh": zh(&concise),
            "detailed_analysis_zh": zh(&detailed),
            "topics_zh": topics.iter().map(|t| zh(t)).collect::<Vec<_>>(),
            "keywords_zh": keywords.iter().map(|k| zh(k)).collect::<Vec<_>>(),
        })
    }

    /// Groups labels case-insensitively; cluster name is the most frequent member.
    fn consolidation_json(context: &str) -> Result<Value> {
        let input: ConsolidationContext = serde_json::from_str(context)?;
        let mut groups: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
        for (label, count) in input.labels {
            groups.entry(label.to_lowercase()).or_default().push((label, count));
        }
        let clusters: Vec<Value> = groups
            .into_values()
            .map(|mut members| {
                members.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                let name = members[0].0.clone();
                let labels: Vec<String> = members.into_iter().map(|(l, _)| l).collect();
                json!({"name": name, "labels": labels})
            })
            .collect();
        Ok(json!({ "clusters": clusters }))
    }
}

/// Context payload sent with consolidation requests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsolidationContext {
    pub month: String,
    pub target_clusters: usize,
    pub labels: BTreeMap<String, u64>,
}

impl Provider for MockProvider {
    fn id(&self) -> &str {
        "mock"
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        let raw = match request.kind {
            RequestKind::Summarize | RequestKind::Repair => {
                Self::summary_json(&request.title, &request.abstract_text).to_string()
            }
            RequestKind::Consolidate => {
                let ctx = request
                    .context
                    .as_deref()
                    .ok_or_else(|| Error::Provider("consolidation request without context".into()))?;
                Self::consolidation_json(ctx)?.to_string()
            }
            RequestKind::Narrative => format!(
                "Mock narrative for {}: {}",
                request.subject,
                request.context.as_deref().unwrap_or_default()
            ),
        };
        Ok(ProviderResponse {
            raw_text: raw,
            provider_id: self.id().to_string(),
            latency: Duration::ZERO,
        })
    }
}

/// Replays recorded responses from disk.
///
/// Lookup for attempt `n` (1-based) of subject `s`: `<dir>/<s>.<n>.json`, then
/// `<dir>/<s>.json`. Subjects with `/` use `_` in file names. Consolidation
/// subjects are `consolidate-<month>`; narratives `narrative-<key>`.
#[derive(Debug)]
pub struct FixtureProvider {
    dir: PathBuf,
    attempts: Mutex<HashMap<String, usize>>,
}

impl FixtureProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            attempts: Mutex::new(HashMap::new()),
        }
    }

    fn subject_key(request: &ProviderRequest) -> String {
        let base = request.subject.replace('/', "_");
        match request.kind {
            RequestKind::Consolidate => format!("consolidate-{base}"),
            RequestKind::Narrative => format!("narrative-{base}"),
            RequestKind::Summarize | RequestKind::Repair => base,
        }
    }
}

impl Provider for FixtureProvider {
    fn id(&self) -> &str {
        "fixture"
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        let key = Self::subject_key(request);
        let attempt = {
            let mut map = self.attempts.lock().unwrap();
            let n = map.entry(key.clone()).or_default();
            *n += 1;
            *n
        };
        let candidates = [
            self.dir.join(format!("{key}.{attempt}.json")),
            self.dir.join(format!("{key}.json")),
        ];
        for path in &candidates {
            if let Ok(raw) = std::fs::read_to_string(path) {
                return Ok(ProviderResponse {
                    raw_text: raw,
                    provider_id: self.id().to_string(),
                    latency: Duration::ZERO,
                });
            }
        }
        Err(Error::Provider(format!("no recorded response for {key} (attempt {attempt})")))
    }
}

/// Returns queued responses in order, then repeats the last one. Counts calls.
#[derive(Debug)]
pub struct ScriptedProvider {
    queue: Mutex<VecDeque<String>>,
    last: Mutex<Option<String>>,
    calls: AtomicUsize,
    requests: Mutex<Vec<ProviderRequest>>,
}

impl ScriptedProvider {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            queue: Mutex::new(responses.into_iter().map(Into::into).collect()),
            last: Mutex::new(None),
            calls: AtomicUsize::new(0),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<ProviderRequest> {
        self.requests.lock().unwrap().clone()
    }
}

impl Provider for ScriptedProvider {
    fn id(&self) -> &str {
        "scripted"
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.requests.lock().unwrap().push(request.clone());
        let next = self.queue.lock().unwrap().pop_front();
        let mut last = self.last.lock().unwrap();
        let raw = match next {
            Some(r) => {
                *last = Some(r.clone());
                r
            }
            None => last
                .clone()
                .ok_or_else(|| Error::Provider("scripted provider has no responses".into()))?,
        };
        Ok(ProviderResponse {
            raw_text: raw,
            provider_id: self.id().to_string(),
            latency: Duration::ZERO,
        })
    }
}

/// Counts calls to an inner provider.
pub struct CountingProvider<P> {
    inner: P,
    calls: AtomicUsize,
}

impl<P: Provider> CountingProvider<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<P: Provider> Provider for CountingProvider<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(request)
    }
}

/// Minimal client for an OpenAI-compatible `chat/completions` endpoint
/// (LiteLLM proxies and most hosted gateways speak it).
#[derive(Debug)]
pub struct HttpProvider {
    endpoint: String,
    model: String,
    api_key: String,
    client: reqwest::blocking::Client,
    id: String,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>) -> Result<Self> {
        let model = model.into();
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(180))
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.into(),
            id: format!("live:{model}"),
            model,
            api_key: api_key.into(),
            client,
        })
    }

    fn body(&self, request: &ProviderRequest) -> Value {
        use base64::Engine as _;
        let mut user = format!(
            "Title: {}\n\nAbstract: {}\n\nRespond with one JSON object of this shape: {}",
            request.title,
            request.abstract_text,
            request.schema.describe()
        );
        if let Some(ctx) = &request.context {
            user.push_str("\n\nInput:\n");
            user.push_str(ctx);
        }
        let mut parts = vec![json!({"type": "text", "text": user})];
        if let Some(doc) = &request.document {
            let encoded = base64::engine::general_purpose::STANDARD.encode(doc);
            parts.push(json!({
                "type": "file",
                "file": {"file_data": format!("data:application/pdf;base64,{encoded}")}
            }));
        }
        let mut body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.instruction},
                {"role": "user", "content": parts},
            ],
        });
        if request.kind != RequestKind::Narrative {
            body["response_format"] = json!({"type": "json_object"});
        }
        body
    }
}

impl Provider for HttpProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse> {
        let started = Instant::now();
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&self.body(request))
            .send()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let status = resp.status();
        let payload: Value = resp.json().map_err(|e| Error::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(Error::Provider(format!("HTTP {status}: {payload}")));
        }
        let text = payload["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| Error::Provider("response has no message content".into()))?;
        Ok(ProviderResponse {
            raw_text: text.to_string(),
            provider_id: self.id.clone(),
            latency: started.elapsed(),
        })
    }
}
