//! Upvote distribution and publication-rhythm statistics.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use super::index::CorpusIndex;
use crate::datamodel::PaperRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementStats {
    pub n: usize,
    pub median: i64,
    pub p90: i64,
    pub max: i64,
    pub mean: f64,
    pub skewness: f64,
}

/// Nearest-rank percentile of an ascending slice: element ceil(pct·n/100),
/// 1-indexed.
pub fn nearest_rank(sorted: &[i64], pct: u32) -> Option<i64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = (pct as usize * n).div_ceil(100).clamp(1, n);
    Some(sorted[rank - 1])
}

/// Population skewness g1 = m3 / m2^1.5; 0 for a constant sample.
pub fn skewness(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

pub fn engagement_stats(upvotes: &[i64]) -> Result<EngagementStats> {
    if upvotes.is_empty() {
        return Err(Error::Precondition("engagement statistics need at least one paper".into()));
    }
    let mut sorted = upvotes.to_vec();
    sorted.sort_unstable();
    let as_f: Vec<f64> = sorted.iter().map(|&v| v as f64).collect();
    Ok(EngagementStats {
        n: sorted.len(),
        median: nearest_rank(&sorted, 50).expect("non-empty"),
        p90: nearest_rank(&sorted, 90).expect("non-empty"),
        max: *sorted.last().expect("non-empty"),
        mean: as_f.iter().sum::<f64>() / as_f.len() as f64,
        skewness: skewness(&as_f),
    })
}

/// Median (nearest rank) of each topic's upvotes, and the median of those.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMedians {
    pub per_topic: BTreeMap<String, i64>,
    pub median_of_medians: Option<i64>,
}

pub fn topic_medians(index: &CorpusIndex) -> TopicMedians {
    let mut per_topic = BTreeMap::new();
    for topic in index.topics() {
        let mut ups: Vec<i64> = index
            .papers_with(topic)
            .into_iter()
            .flatten()
            .map(|id| index.papers()[id].upvotes)
            .collect();
        ups.sort_unstable();
        if let Some(m) = nearest_rank(&ups, 50) {
            per_topic.insert(topic.to_string(), m);
        }
    }
    let mut meds: Vec<i64> = per_topic.values().copied().collect();
    meds.sort_unstable();
    TopicMedians {
        median_of_medians: nearest_rank(&meds, 50),
        per_topic,
    }
}

/// Inclusive calendar-day range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateSpan {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        Self { start, end }
    }

    /// From the earliest to the latest publication date.
    pub fn covering(records: &[PaperRecord]) -> Option<Self> {
        let start = records.iter().map(|r| r.published_at).min()?;
        let end = records.iter().map(|r| r.published_at).max()?;
        Some(Self { start, end })
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        self.start.iter_days().take_while(move |d| *d <= end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayRhythm {
    pub weekday_mean: f64,
    pub weekend_mean: f64,
    pub weekdays: u32,
    pub weekend_days: u32,
}

fn is_weekend(d: NaiveDate) -> bool {
    matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

/// Papers per day on weekdays and weekends across `span`, counting days with
/// no papers. Records outside the span are ignored. A class with no days in
/// the span has mean 0.
pub fn weekday_weekend_means(records: &[PaperRecord], span: DateSpan) -> Result<DayRhythm> {
    if span.end < span.start {
        return Err(Error::Precondition(format!("empty date span {}..{}", span.start, span.end)));
    }
    let (mut wd_days, mut we_days) = (0u32, 0u32);
    for d in span.days() {
        if is_weekend(d) {
            we_days += 1;
        } else {
            wd_days += 1;
        }
    }
    let (mut wd_papers, mut we_papers) = (0u64, 0u64);
    for r in records.iter().filter(|r| r.published_at >= span.start && r.published_at <= span.end) {
        if is_weekend(r.published_at) {
            we_papers += 1;
        } else {
            wd_papers += 1;
        }
    }
    let mean = |p: u64, d: u32| if d == 0 { 0.0 } else { p as f64 / d as f64 };
    Ok(DayRhythm {
        weekday_mean: mean(wd_papers, wd_days),
        weekend_mean: mean(we_papers, we_days),
        weekdays: wd_days,
        weekend_days: we_days,
    })
}
