use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::datamodel::{PaperRecord, StructuredSummary, TopicTrajectory};
use crate::error::{Error, Result};
use crate::month::YearMonth;
use crate::text::collapse_whitespace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperEntry {
    pub topics: BTreeSet<String>,
    pub keywords: BTreeSet<String>,
    pub upvotes: i64,
    pub date: NaiveDate,
    pub month: YearMonth,
}

/// Forward and inverted views of a summarized corpus.
///
/// `assignments_by_month[t]` is N_t, the number of (paper, topic) pairs in
/// month t after per-paper de-duplication of labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusIndex {
    papers: BTreeMap<String, PaperEntry>,
    topic_papers: BTreeMap<String, BTreeSet<String>>,
    assignments_by_month: BTreeMap<YearMonth, u64>,
    papers_by_month: BTreeMap<YearMonth, u64>,
}

impl CorpusIndex {
    fn from_entries(papers: BTreeMap<String, PaperEntry>) -> Self {
        let mut topic_papers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut assignments_by_month: BTreeMap<YearMonth, u64> = BTreeMap::new();
        let mut papers_by_month: BTreeMap<YearMonth, u64> = BTreeMap::new();
        for (id, p) in &papers {
            for t in &p.topics {
                topic_papers.entry(t.clone()).or_default().insert(id.clone());
            }
            *assignments_by_month.entry(p.month).or_default() += p.topics.len() as u64;
            *papers_by_month.entry(p.month).or_default() += 1;
        }
        Self {
            papers,
            topic_papers,
            assignments_by_month,
            papers_by_month,
        }
    }

    pub fn papers(&self) -> &BTreeMap<String, PaperEntry> {
        &self.papers
    }

    pub fn paper(&self, id: &str) -> Option<&PaperEntry> {
        self.papers.get(id)
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.topic_papers.keys().map(String::as_str)
    }

    pub fn papers_with(&self, topic: &str) -> Option<&BTreeSet<String>> {
        self.topic_papers.get(topic)
    }

    /// Total papers carrying `topic` (0 if unknown).
    pub fn topic_count(&self, topic: &str) -> u64 {
        self.topic_papers.get(topic).map_or(0, |s| s.len() as u64)
    }

    pub fn assignments(&self, month: YearMonth) -> u64 {
        self.assignments_by_month.get(&month).copied().unwrap_or(0)
    }

    pub fn papers_in(&self, month: YearMonth) -> u64 {
        self.papers_by_month.get(&month).copied().unwrap_or(0)
    }

    /// First and last month holding any paper.
    pub fn span(&self) -> Option<(YearMonth, YearMonth)> {
        let first = *self.papers_by_month.keys().next()?;
        let last = *self.papers_by_month.keys().next_back()?;
        Some((first, last))
    }

    /// Every month from the first populated one to the last, gaps included.
    pub fn months(&self) -> Vec<YearMonth> {
        self.span()
            .map(|(a, b)| YearMonth::range(a, b).collect())
            .unwrap_or_default()
    }

    /// Keeps only papers published in or before `month`.
    pub fn truncated_to(&self, month: YearMonth) -> CorpusIndex {
        Self::from_entries(
            self.papers
                .iter()
                .filter(|(_, p)| p.month <= month)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Rewrites every paper's topics through `map(month, label)`, collapsing
    /// labels that land on the same name.
    pub fn remap_topics(&self, map: impl Fn(YearMonth, &str) -> String) -> CorpusIndex {
        let papers = self
            .papers
            .iter()
            .map(|(id, p)| {
                let topics = p.topics.iter().map(|t| map(p.month, t)).collect();
                (id.clone(), PaperEntry { topics, ..p.clone() })
            })
            .collect();
        Self::from_entries(papers)
    }

    /// Per-month topic counts for a topic across the whole span.
    pub fn topic_counts_by_month(&self, topic: &str) -> BTreeMap<YearMonth, u64> {
        let mut out = BTreeMap::new();
        if let Some(ids) = self.topic_papers.get(topic) {
            for id in ids {
                *out.entry(self.papers[id].month).or_default() += 1;
            }
        }
        out
    }
}

/// Joins summaries to their paper records. Papers without a summary are left
/// out; a summary without a record is an error listing the orphan ids.
pub fn build_index(summaries: &[StructuredSummary], records: &[PaperRecord]) -> Result<CorpusIndex> {
    let by_id: HashMap<&str, &PaperRecord> = records.iter().map(|r| (r.paper_id.as_str(), r)).collect();
    let mut orphans: Vec<String> = summaries
        .iter()
        .filter(|s| !by_id.contains_key(s.paper_id.as_str()))
        .map(|s| s.paper_id.clone())
        .collect();
    if !orphans.is_empty() {
        orphans.sort();
        orphans.dedup();
        return Err(Error::OrphanSummaries(orphans));
    }
    let mut papers = BTreeMap::new();
    for s in summaries {
        let r = by_id[s.paper_id.as_str()];
        let clean = |items: &[String]| -> BTreeSet<String> {
            items
                .iter()
                .map(|t| collapse_whitespace(t))
                .filter(|t| !t.is_empty())
                .collect()
        };
        papers.insert(
            s.paper_id.clone(),
            PaperEntry {
                topics: clean(&s.topics),
                keywords: clean(&s.keywords),
                upvotes: r.upvotes,
                date: r.published_at,
                month: YearMonth::of(r.published_at),
            },
        );
    }
    Ok(CorpusIndex::from_entries(papers))
}

/// Maps raw labels to consolidated cluster names using each month's mapping.
/// Labels with no mapping for their month keep their raw name; the returned
/// list names the months that had no mapping at all.
pub fn consolidated_index(
    raw: &CorpusIndex,
    mappings: &BTreeMap<YearMonth, BTreeMap<String, String>>,
) -> (CorpusIndex, Vec<YearMonth>) {
    let unmapped: Vec<YearMonth> = raw
        .months()
        .into_iter()
        .filter(|m| raw.papers_in(*m) > 0 && !mappings.contains_key(m))
        .collect();
    let index = raw.remap_topics(|month, label| {
        mappings
            .get(&month)
            .and_then(|m| m.get(label))
            .cloned()
            .unwrap_or_else(|| label.to_string())
    });
    (index, unmapped)
}

/// c_t and p_t = c_t / N_t for `topic` over the index span.
pub fn monthly_proportions(index: &CorpusIndex, topic: &str) -> Result<TopicTrajectory> {
    if !index.topic_papers.contains_key(topic) {
        return Err(Error::UnknownTopic(topic.to_string()));
    }
    let (first, last) = index.span().expect("non-empty index has a span");
    let by_month = index.topic_counts_by_month(topic);
    let months: Vec<YearMonth> = YearMonth::range(first, last).collect();
    let counts = months.iter().map(|m| by_month.get(m).copied().unwrap_or(0)).collect();
    let totals: Vec<u64> = months.iter().map(|m| index.assignments(*m)).collect();
    Ok(TopicTrajectory::from_counts(topic, first, counts, &totals))
}
