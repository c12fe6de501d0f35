//! Record types for the four released datasets plus the in-memory trajectory
//! type, and the invariant checks that guard them.
//!
//! Every type serializes to one flat JSON object with snake_case keys. Dates are
//! ISO-8601 (`YYYY-MM-DD`), months are `YYYY-MM`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::LazyLock;

use chrono::{DateTime, NaiveDate, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::month::YearMonth;
use crate::text::collapse_whitespace;

pub const TOPICS_HARD: (usize, usize) = (1, 5);
pub const TOPICS_TARGET: (usize, usize) = (2, 3);
pub const KEYWORDS_HARD: (usize, usize) = (1, 8);
pub const KEYWORDS_TARGET: (usize, usize) = (4, 6);

static ARXIV_ID: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:\d{4}\.\d{4,5}|[a-z][a-z\-]*(?:\.[A-Z]{2})?/\d{7})(?:v\d+)?$").unwrap()
});

/// True for modern (`2403.01234`, optionally `v2`) and legacy (`hep-th/9901001`) ids.
pub fn is_arxiv_id(id: &str) -> bool {
    ARXIV_ID.is_match(id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    /// arXiv version suffix stripped from the id, when the feed carried one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub title: String,
    pub authors: Vec<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub upvotes: i64,
    pub published_at: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pdf_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredSummary {
    pub paper_id: String,
    pub concise_summary: String,
    pub detailed_analysis: String,
    pub topics: Vec<String>,
    pub keywords: Vec<String>,
    pub concise_summary_zh: String,
    pub detailed_analysis_zh: String,
    pub topics_zh: Vec<String>,
    pub keywords_zh: Vec<String>,
    pub provider_id: String,
    pub extracted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedCount {
    pub label: String,
    pub count: u64,
}

impl RankedCount {
    pub fn new(label: impl Into<String>, count: u64) -> Self {
        Self {
            label: label.into(),
            count,
        }
    }
}

/// Sorts by count descending, then label ascending.
pub fn rank_counts<I, S>(counts: I) -> Vec<RankedCount>
where
    I: IntoIterator<Item = (S, u64)>,
    S: Into<String>,
{
    let mut ranked: Vec<RankedCount> = counts
        .into_iter()
        .map(|(l, c)| RankedCount::new(l, c))
        .collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyTrendReport {
    pub date: NaiveDate,
    pub trending_summary: String,
    pub top_topics: Vec<RankedCount>,
    pub keywords: Vec<RankedCount>,
    pub daily_report: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyTrendReport {
    pub month: YearMonth,
    pub trending_summary: String,
    pub top_topics: Vec<RankedCount>,
    pub topic_mapping: BTreeMap<String, Vec<String>>,
    pub monthly_report: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    InnovationTrigger,
    Peak,
    Trough,
    Slope,
    Plateau,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::InnovationTrigger,
        Phase::Peak,
        Phase::Trough,
        Phase::Slope,
        Phase::Plateau,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            Phase::InnovationTrigger => "Innovation Trigger",
            Phase::Peak => "Peak of Inflated Expectations",
            Phase::Trough => "Trough of Disillusionment",
            Phase::Slope => "Slope of Enlightenment",
            Phase::Plateau => "Plateau of Productivity",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleEntry {
    pub phase: Phase,
    pub peak_proportion: f64,
    pub peak_month: YearMonth,
    pub current_level: f64,
    pub decline_ratio: f64,
    pub trend_slope: f64,
    pub recent_fraction: f64,
    pub total_count: u64,
    pub active_months: u32,
    /// First month with a nonzero count; drives the recency clause of the classifier.
    pub first_month: YearMonth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleSnapshot {
    pub snapshot_id: String,
    pub lifecycle_data: BTreeMap<String, LifecycleEntry>,
    pub sorted_months: Vec<YearMonth>,
    pub topics_by_month: BTreeMap<String, BTreeMap<YearMonth, u64>>,
    pub total_by_month: BTreeMap<YearMonth, u64>,
    pub n_papers: u64,
    pub n_months: u64,
}

/// A topic's month-indexed counts and proportions over a contiguous span.
/// Index `i` is month `first_month + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicTrajectory {
    pub label: String,
    pub counts: Vec<u64>,
    pub proportions: Vec<f64>,
    pub first_month: YearMonth,
    pub last_month: YearMonth,
}

impl TopicTrajectory {
    /// Builds a trajectory from parallel count/total series starting at `first_month`.
    /// Months with a zero total get proportion 0.
    pub fn from_counts(
        label: impl Into<String>,
        first_month: YearMonth,
        counts: Vec<u64>,
        totals: &[u64],
    ) -> Self {
        assert_eq!(counts.len(), totals.len(), "count/total length mismatch");
        assert!(!counts.is_empty(), "trajectory needs at least one month");
        let proportions = counts
            .iter()
            .zip(totals)
            .map(|(&c, &n)| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect();
        let last_month = first_month.offset(counts.len() as i64 - 1);
        Self {
            label: label.into(),
            counts,
            proportions,
            first_month,
            last_month,
        }
    }

    /// Proportion-only trajectory (counts are zero); handy for hand-built fixtures.
    pub fn from_proportions(label: impl Into<String>, first_month: YearMonth, p: &[f64]) -> Self {
        assert!(!p.is_empty(), "trajectory needs at least one month");
        Self {
            label: label.into(),
            counts: vec![0; p.len()],
            proportions: p.to_vec(),
            first_month,
            last_month: first_month.offset(p.len() as i64 - 1),
        }
    }

    pub fn len(&self) -> usize {
        self.proportions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proportions.is_empty()
    }

    pub fn month_at(&self, i: usize) -> YearMonth {
        self.first_month.offset(i as i64)
    }

    pub fn index_of(&self, month: YearMonth) -> Option<usize> {
        let i = month.months_since(self.first_month);
        (0..self.len() as i64).contains(&i).then_some(i as usize)
    }

    /// Proportion at `month`; months outside the span read as 0.
    pub fn proportion(&self, month: YearMonth) -> f64 {
        self.index_of(month).map_or(0.0, |i| self.proportions[i])
    }

    pub fn count(&self, month: YearMonth) -> u64 {
        self.index_of(month).map_or(0, |i| self.counts[i])
    }

    /// First month with a positive count, or positive proportion for
    /// proportion-only fixtures. Falls back to the span start.
    pub fn first_appearance(&self) -> YearMonth {
        let has_counts = self.counts.iter().any(|&c| c > 0);
        let idx = if has_counts {
            self.counts.iter().position(|&c| c > 0)
        } else {
            self.proportions.iter().position(|&p| p > 0.0)
        };
        self.month_at(idx.unwrap_or(0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    /// Breaks an invariant; the record must not be persisted.
    Hard,
    /// Outside the target range but tolerated.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn hard(&mut self, field: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_string(),
            message: message.into(),
            severity: Severity::Hard,
        });
    }

    fn soft(&mut self, field: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_string(),
            message: message.into(),
            severity: Severity::Soft,
        });
    }

    /// No hard violations (soft warnings allowed).
    pub fn is_ok(&self) -> bool {
        self.violations.iter().all(|v| v.severity == Severity::Soft)
    }

    pub fn hard_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Hard)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Soft)
    }

    pub fn has_message(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }

    /// Hard violations joined into one line, for error messages.
    pub fn describe_hard(&self) -> String {
        self.hard_violations()
            .map(|v| format!("{}: {}", v.field, v.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

/// Returns every violated invariant of `record`. Pure; never mutates.
pub fn validate_record<T: Validate + ?Sized>(record: &T) -> ValidationReport {
    record.validate()
}

impl Validate for PaperRecord {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if !is_arxiv_id(&self.paper_id) {
            r.hard("paper_id", format!("{:?} is not an arXiv identifier", self.paper_id));
        }
        if self.upvotes < 0 {
            r.hard("upvotes", "upvotes ≥ 0");
        }
        if self.title.trim().is_empty() {
            r.hard("title", "title must be non-empty");
        }
        if self.abstract_text.trim().is_empty() {
            r.hard("abstract", "abstract must be non-empty");
        }
        r
    }
}

fn check_arity(
    r: &mut ValidationReport,
    field: &str,
    len: usize,
    hard: (usize, usize),
    target: (usize, usize),
) {
    if len < hard.0 || len > hard.1 {
        r.hard(field, format!("{len} entries outside {}–{}", hard.0, hard.1));
    } else if len < target.0 || len > target.1 {
        r.soft(field, format!("{len} entries outside target {}–{}", target.0, target.1));
    }
}

impl Validate for StructuredSummary {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.paper_id.trim().is_empty() {
            r.hard("paper_id", "paper_id must be non-empty");
        }
        check_arity(&mut r, "topics", self.topics.len(), TOPICS_HARD, TOPICS_TARGET);
        check_arity(&mut r, "keywords", self.keywords.len(), KEYWORDS_HARD, KEYWORDS_TARGET);

        let mut seen = HashSet::new();
        for t in &self.topics {
            let norm = collapse_whitespace(t);
            if norm.is_empty() {
                r.hard("topics", "empty topic label");
            } else if !seen.insert(norm.clone()) {
                r.hard("topics", format!("duplicate topic label {norm:?}"));
            }
        }
        if self.keywords.iter().any(|k| k.trim().is_empty()) {
            r.hard("keywords", "empty keyword");
        }
        if self.topics_zh.len() != self.topics.len() {
            r.hard("topics_zh", "length differs from topics");
        }
        if self.keywords_zh.len() != self.keywords.len() {
            r.hard("keywords_zh", "length differs from keywords");
        }
        r
    }
}

fn check_ranked(r: &mut ValidationReport, field: &str, items: &[RankedCount]) {
    let sorted = items.windows(2).all(|w| {
        w[0].count > w[1].count || (w[0].count == w[1].count && w[0].label < w[1].label)
    });
    if !sorted {
        r.hard(field, "not sorted by count descending with lexicographic ties");
    }
}

impl Validate for DailyTrendReport {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        check_ranked(&mut r, "top_topics", &self.top_topics);
        check_ranked(&mut r, "keywords", &self.keywords);
        r
    }
}

impl Validate for MonthlyTrendReport {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        check_ranked(&mut r, "top_topics", &self.top_topics);
        for t in &self.top_topics {
            if !self.topic_mapping.contains_key(&t.label) {
                r.hard("topic_mapping", format!("cluster missing from mapping: {:?}", t.label));
            }
        }
        let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
        for (cluster, originals) in &self.topic_mapping {
            for o in originals {
                if let Some(prev) = owner.insert(o, cluster) {
                    r.hard(
                        "topic_mapping",
                        format!("label {o:?} mapped to both {prev:?} and {cluster:?}"),
                    );
                }
            }
        }
        r
    }
}

impl MonthlyTrendReport {
    /// Checks that the mapping values cover exactly `labels` (the labels submitted
    /// for consolidation). Complements [`Validate`], which cannot see the input.
    pub fn validate_coverage<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> ValidationReport {
        let mut r = ValidationReport::default();
        let expected: BTreeSet<&str> = labels.into_iter().collect();
        let mapped: BTreeSet<&str> = self
            .topic_mapping
            .values()
            .flatten()
            .map(String::as_str)
            .collect();
        for missing in expected.difference(&mapped) {
            r.hard("topic_mapping", format!("input label not mapped: {missing:?}"));
        }
        for extra in mapped.difference(&expected) {
            r.hard("topic_mapping", format!("mapped label not in input: {extra:?}"));
        }
        r
    }
}

impl Validate for LifecycleEntry {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if !(0.0..=1.0).contains(&self.peak_proportion) {
            r.hard("peak_proportion", "p* outside [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.recent_fraction) {
            r.hard("recent_fraction", "ρ outside [0, 1]");
        }
        if self.decline_ratio < 0.0 || !self.decline_ratio.is_finite() {
            r.hard("decline_ratio", "δ must be finite and ≥ 0");
        }
        if self.peak_proportion > 0.0 {
            let expected = self.current_level / self.peak_proportion;
            if (expected - self.decline_ratio).abs() > 1e-9 {
                r.hard("decline_ratio", "δ ≠ current_level / peak_proportion");
            }
        }
        r
    }
}

impl Validate for LifecycleSnapshot {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self
            .sorted_months
            .windows(2)
            .any(|w| w[1].months_since(w[0]) != 1)
        {
            r.hard("sorted_months", "months not strictly ascending and contiguous");
        }
        if self.n_months != self.sorted_months.len() as u64 {
            r.hard("n_months", "n_months ≠ |sorted_months|");
        }
        let mut per_month: BTreeMap<YearMonth, u64> = BTreeMap::new();
        for series in self.topics_by_month.values() {
            for (m, c) in series {
                *per_month.entry(*m).or_default() += c;
            }
        }
        for (m, sum) in per_month {
            let total = self.total_by_month.get(&m).copied().unwrap_or(0);
            if sum > total {
                r.hard("topics_by_month", format!("{m}: topic counts {sum} exceed total {total}"));
            }
        }
        for (topic, entry) in &self.lifecycle_data {
            for v in entry.validate().violations {
                r.violations.push(Violation {
                    field: format!("lifecycle_data[{topic}].{}", v.field),
                    ..v
                });
            }
        }
        r
    }
}

impl Validate for TopicTrajectory {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.proportions.iter().any(|p| !(0.0..=1.0).contains(p)) {
            r.hard("proportions", "p_t outside [0, 1]");
        }
        if self.counts.len() != self.proportions.len() {
            r.hard("counts", "counts and proportions differ in length");
        }
        if self.first_month.offset(self.proportions.len() as i64 - 1) != self.last_month {
            r.hard("last_month", "span does not match series length");
        }
        r
    }
}
