//! Topic diversity: entropy, emergence, co-occurrence and keyword evolution.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::index::CorpusIndex;
use crate::error::{Error, Result};
use crate::month::YearMonth;

/// Shannon entropy in bits of a label → count distribution. Zero counts are
/// ignored; a distribution with no positive count is an error.
pub fn shannon_entropy<'a, I>(counts: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a u64>,
{
    let positive: Vec<f64> = counts.into_iter().filter(|&&c| c > 0).map(|&c| c as f64).collect();
    let total: f64 = positive.iter().sum();
    if positive.is_empty() {
        return Err(Error::Precondition("entropy of an all-zero distribution".into()));
    }
    let h = -positive
        .iter()
        .map(|c| {
            let p = c / total;
            p * p.log2()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Entropy of each month's label distribution. Months with no labels are
/// left out.
pub fn monthly_entropy(index: &CorpusIndex) -> BTreeMap<YearMonth, f64> {
    let mut by_month: BTreeMap<YearMonth, BTreeMap<&str, u64>> = BTreeMap::new();
    for p in index.papers().values() {
        let dist = by_month.entry(p.month).or_default();
        for t in &p.topics {
            *dist.entry(t.as_str()).or_default() += 1;
        }
    }
    by_month
        .into_iter()
        .filter_map(|(m, dist)| shannon_entropy(dist.values()).ok().map(|h| (m, h)))
        .collect()
}

/// Number of labels debuting in each month of the index span (zeros
/// included). Sums to the number of distinct labels.
pub fn new_topic_counts(index: &CorpusIndex) -> BTreeMap<YearMonth, u64> {
    let mut out: BTreeMap<YearMonth, u64> = index.months().into_iter().map(|m| (m, 0)).collect();
    for topic in index.topics() {
        let first = index.papers_with(topic).into_iter().flatten().map(|id| index.papers()[id].month).min();
        if let Some(m) = first {
            *out.entry(m).or_default() += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStat {
    pub a: String,
    pub b: String,
    pub count: u64,
    pub jaccard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    /// Selected topics, most frequent first.
    pub topics: Vec<String>,
    /// One entry per unordered pair with `a` listed before `b` in `topics`.
    pub pairs: Vec<PairStat>,
}

impl CooccurrenceMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<&PairStat> {
        self.pairs
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }
}

/// |A ∩ B| / |A ∪ B|, or 0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// The `k` most frequent topics, ties broken lexicographically.
pub fn top_topics(index: &CorpusIndex, k: usize) -> Vec<String> {
    let mut topics: Vec<(&str, u64)> = index.topics().map(|t| (t, index.topic_count(t))).collect();
    topics.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(y.0)));
    topics.into_iter().take(k).map(|(t, _)| t.to_string()).collect()
}

/// Pairwise co-occurrence counts and Jaccard similarity among the top `k` topics.
pub fn cooccurrence(index: &CorpusIndex, k: usize) -> CooccurrenceMatrix {
    let topics = top_topics(index, k);
    let empty = BTreeSet::new();
    let sets: Vec<&BTreeSet<String>> = topics.iter().map(|t| index.papers_with(t).unwrap_or(&empty)).collect();
    let mut pairs = Vec::new();
    for i in 0..topics.len() {
        for j in i + 1..topics.len() {
            pairs.push(PairStat {
                a: topics[i].clone(),
                b: topics[j].clone(),
                count: sets[i].intersection(sets[j]).count() as u64,
                jaccard: jaccard(sets[i], sets[j]),
            });
        }
    }
    CooccurrenceMatrix { topics, pairs }
}

/// Keyword → month → percentage of the topic's papers that month mentioning it.
pub type KeywordSeries = BTreeMap<String, BTreeMap<YearMonth, Option<f64>>>;

/// Tracks the `top_m` most frequent keywords within `topic` across the index
/// span. Months where the topic has no papers are `None`.
pub fn keyword_evolution(index: &CorpusIndex, topic: &str, top_m: usize) -> Result<KeywordSeries> {
    let ids = index
        .papers_with(topic)
        .ok_or_else(|| Error::UnknownTopic(topic.to_string()))?;
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    let mut per_month: BTreeMap<YearMonth, (u64, BTreeMap<&str, u64>)> = BTreeMap::new();
    for id in ids {
        let p = &index.papers()[id];
        let slot = per_month.entry(p.month).or_default();
        slot.0 += 1;
        for kw in &p.keywords {
            *freq.entry(kw).or_default() += 1;
            *slot.1.entry(kw).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = freq.into_iter().collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(y.0)));

    let months = index.months();
    Ok(ranked
        .into_iter()
        .take(top_m)
        .map(|(kw, _)| {
            let series = months
                .iter()
                .map(|m| {
                    let v = per_month.get(m).map(|(n, counts)| {
                        100.0 * counts.get(kw).copied().unwrap_or(0) as f64 / *n as f64
                    });
                    (*m, v)
                })
                .collect();
            (kw.to_string(), series)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::index::build_index;
    use super::super::index::tests::{record, summary};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&[5, 5, 5, 5]).unwrap(), 2.0);
        assert_eq!(shannon_entropy(&[7]).unwrap(), 0.0);
        let h = shannon_entropy(&[3, 1, 0]).unwrap();
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h - oracle).abs() < 1e-12);
        assert!((h - 0.811278).abs() < 1e-6);
        assert!(shannon_entropy(&[0, 0]).is_err());
        assert!(shannon_entropy(&[]).is_err());
    }

    proptest! {
        #[test]
        fn entropy_bounds(counts in proptest::collection::vec(0u64..50, 1..30)) {
            let k = counts.iter().filter(|&&c| c > 0).count();
            prop_assume!(k > 0);
            let h = shannon_entropy(&counts).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (k as f64).log2() + 1e-12);
        }

        #[test]
        fn jaccard_symmetric_and_bounded(
            a in proptest::collection::btree_set(0u32..20, 0..10),
            b in proptest::collection::btree_set(0u32..20, 0..10),
        ) {
            let j = jaccard(&a, &b);
            prop_assert_eq!(j, jaccard(&b, &a));
            prop_assert!((0.0..=1.0).contains(&j));
            if !a.is_empty() {
                prop_assert_eq!(jaccard(&a, &a), 1.0);
            }
        }
    }

    fn corpus(rows: &[(&str, &str, &[&str], &[&str])]) -> CorpusIndex {
        let s: Vec<_> = rows.iter().map(|(id, _, t, k)| summary(id, t, k)).collect();
        let r: Vec<_> = rows.iter().map(|(id, d, _, _)| record(id, d, 0)).collect();
        build_index(&s, &r).unwrap()
    }

    #[test]
    fn jaccard_example() {
        let idx = corpus(&[
            ("1", "2025-01-01", &["A"], &[]),
            ("2", "2025-01-01", &["A", "B"], &[]),
            ("3", "2025-01-01", &["A", "B"], &[]),
            ("4", "2025-01-01", &["B"], &[]),
            ("5", "2025-01-01", &["C"], &[]),
        ]);
        let m = cooccurrence(&idx, 3);
        assert_eq!(m.topics, ["A", "B", "C"]);
        let ab = m.get("B", "A").unwrap();
        assert_eq!((ab.count, ab.jaccard), (2, 0.5));
        let ac = m.get("A", "C").unwrap();
        assert_eq!((ac.count, ac.jaccard), (0, 0.0));
        assert_eq!(cooccurrence(&idx, 2).pairs.len(), 1);
    }

    #[test]
    fn emergence_counts_first_month_only() {
        let idx = corpus(&[
            ("1", "2025-02-01", &["A"], &[]),
            ("2", "2025-05-01", &["A", "B"], &[]),
        ]);
        let n = new_topic_counts(&idx);
        assert_eq!(n.len(), 4);
        assert_eq!(n[&"2025-02".parse().unwrap()], 1);
        assert_eq!(n[&"2025-05".parse().unwrap()], 1);
        assert_eq!(n.values().sum::<u64>(), 2);
        assert!(new_topic_counts(&CorpusIndex::default()).is_empty());
    }

    #[test]
    fn keyword_percentages_and_gaps() {
        let idx = corpus(&[
            ("1", "2025-01-01", &["T"], &["k", "z"]),
            ("2", "2025-01-02", &["T"], &["z"]),
            ("3", "2025-01-03", &["T"], &["z"]),
            ("4", "2025-01-04", &["T"], &["z"]),
            ("5", "2025-02-01", &["U"], &["k"]),
            ("6", "2025-03-01", &["T"], &["z"]),
        ]);
        let ev = keyword_evolution(&idx, "T", 2).unwrap();
        let jan: YearMonth = "2025-01".parse().unwrap();
        let feb: YearMonth = "2025-02".parse().unwrap();
        assert_eq!(ev["k"][&jan], Some(25.0));
        assert_eq!(ev["k"][&feb], None);
        assert_eq!(ev["k"][&"2025-03".parse().unwrap()], Some(0.0));
        assert_eq!(ev.keys().collect::<Vec<_>>(), ["k", "z"]);
        assert!(keyword_evolution(&idx, "nope", 2).is_err());
    }

    #[test]
    fn monthly_entropy_series() {
        let idx = corpus(&[
            ("1", "2025-01-01", &["A", "B"], &[]),
            ("2", "2025-03-01", &["A"], &[]),
        ]);
        let h = monthly_entropy(&idx);
        assert_eq!(h.len(), 2);
        assert_eq!(h[&"2025-01".parse().unwrap()], 1.0);
        assert_eq!(h[&"2025-03".parse().unwrap()], 0.0);
    }
}
