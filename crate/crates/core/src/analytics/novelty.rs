//! PMI novelty of a paper's topic combination.

use serde::{Deserialize, Serialize};

use super::index::CorpusIndex;
use super::lifecycle::median;
use crate::error::{Error, Result};
use crate::month::YearMonth;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoveltyConfig {
    /// Joint pseudo-count used for pairs never seen together.
    pub alpha: f64,
    pub min_topics: usize,
}

impl Default for NoveltyConfig {
    fn default() -> Self {
        Self { alpha: 0.5, min_topics: 2 }
    }
}

/// log2(P(a,b) / (P(a)·P(b))) with P(x) = |papers(x)| / N. A zero joint
/// count is replaced by `alpha`.
///
/// Evaluated as log2(ĉ·N / (|a|·|b|)), which is the same quantity with fewer
/// roundings.
pub fn pmi(index: &CorpusIndex, a: &str, b: &str, alpha: f64) -> Result<f64> {
    let pa = index.papers_with(a).ok_or_else(|| Error::UnknownTopic(a.to_string()))?;
    let pb = index.papers_with(b).ok_or_else(|| Error::UnknownTopic(b.to_string()))?;
    let joint = pa.intersection(pb).count();
    let joint = if joint == 0 { alpha } else { joint as f64 };
    let n = index.paper_count() as f64;
    Ok((joint * n / (pa.len() as f64 * pb.len() as f64)).log2())
}

/// Negated mean PMI over every unordered pair of `topics`. `None` when fewer
/// than `min_topics` distinct topics are given.
pub fn novelty_score<S: AsRef<str>>(topics: &[S], index: &CorpusIndex, cfg: &NoveltyConfig) -> Result<Option<f64>> {
    if cfg.alpha <= 0.0 {
        return Err(Error::Config("novelty alpha must be positive".into()));
    }
    let mut uniq: Vec<&str> = topics.iter().map(AsRef::as_ref).collect();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() < cfg.min_topics.max(2) {
        return Ok(None);
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..uniq.len() {
        for j in i + 1..uniq.len() {
            sum += pmi(index, uniq[i], uniq[j], cfg.alpha)?;
            pairs += 1;
        }
    }
    Ok(Some(-(sum / pairs as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperNovelty {
    pub paper_id: String,
    pub score: f64,
    pub upvotes: i64,
    pub month: YearMonth,
}

/// Scores every eligible paper, most novel first (ties by id).
pub fn novelty_scores(index: &CorpusIndex, cfg: &NoveltyConfig) -> Result<Vec<PaperNovelty>> {
    let mut out = Vec::new();
    for (id, p) in index.papers() {
        let topics: Vec<&str> = p.topics.iter().map(String::as_str).collect();
        if let Some(score) = novelty_score(&topics, index, cfg)? {
            out.push(PaperNovelty {
                paper_id: id.clone(),
                score,
                upvotes: p.upvotes,
                month: p.month,
            });
        }
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.paper_id.cmp(&b.paper_id)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecileEffect {
    pub papers_per_decile: usize,
    pub top_median_upvotes: f64,
    pub bottom_median_upvotes: f64,
    /// `None` when the bottom decile's median is zero.
    pub ratio: Option<f64>,
}

/// Median upvotes of the most novel tenth against the least novel tenth.
/// Expects `scored` in the order returned by [`novelty_scores`]. Needs at
/// least ten papers.
pub fn decile_effect(scored: &[PaperNovelty]) -> Option<DecileEffect> {
    let k = scored.len() / 10;
    if k == 0 {
        return None;
    }
    let ups = |s: &[PaperNovelty]| s.iter().map(|p| p.upvotes as f64).collect::<Vec<_>>();
    let top = median(&ups(&scored[..k]))?;
    let bottom = median(&ups(&scored[scored.len() - k..]))?;
    Some(DecileEffect {
        papers_per_decile: k,
        top_median_upvotes: top,
        bottom_median_upvotes: bottom,
        ratio: (bottom != 0.0).then(|| top / bottom),
    })
}

#[cfg(test)]
mod tests {
    use super::super::index::build_index;
    use super::super::index::tests::{record, summary};
    use super::*;
    use crate::datamodel::{PaperRecord, StructuredSummary};

    fn build(rows: Vec<Vec<&str>>) -> CorpusIndex {
        let mut s: Vec<StructuredSummary> = Vec::new();
        let mut r: Vec<PaperRecord> = Vec::new();
        for (i, topics) in rows.iter().enumerate() {
            let id = format!("p{i:03}");
            s.push(summary(&id, topics, &[]));
            r.push(record(&id, "2025-01-01", i as i64));
        }
        build_index(&s, &r).unwrap()
    }

    #[test]
    fn unseen_pair_gives_minus_one() {
        // N = 100, |A| = |B| = 10, never together
        let mut rows = Vec::new();
        rows.extend((0..10).map(|_| vec!["A"]));
        rows.extend((0..10).map(|_| vec!["B"]));
        rows.extend((0..80).map(|_| vec!["C"]));
        let idx = build(rows);
        assert_eq!(pmi(&idx, "A", "B", 0.5).unwrap(), -1.0);
        assert_eq!(novelty_score(&["A", "B"], &idx, &NoveltyConfig::default()).unwrap(), Some(1.0));
    }

    #[test]
    fn always_together_pair() {
        // k = 4 of N = 16 carry {A, B}
        let mut rows = Vec::new();
        rows.extend((0..4).map(|_| vec!["A", "B"]));
        rows.extend((0..12).map(|_| vec!["C"]));
        let idx = build(rows);
        let oracle = (16.0f64 / 4.0).log2();
        let p = pmi(&idx, "A", "B", 0.5).unwrap();
        assert!((p - oracle).abs() < 1e-12);
        assert_eq!(p, pmi(&idx, "B", "A", 0.5).unwrap());
        let s = novelty_score(&["A", "B"], &idx, &NoveltyConfig::default()).unwrap().unwrap();
        assert!((s + oracle).abs() < 1e-12);
    }

    #[test]
    fn eligibility_and_unknown_topics() {
        let idx = build(vec![vec!["A", "B"], vec!["A"]]);
        let cfg = NoveltyConfig::default();
        assert_eq!(novelty_score(&["A"], &idx, &cfg).unwrap(), None);
        assert_eq!(novelty_score(&["A", "A"], &idx, &cfg).unwrap(), None);
        assert!(novelty_score(&["A", "Z"], &idx, &cfg).is_err());
        let bad = NoveltyConfig { alpha: 0.0, ..cfg };
        assert!(novelty_score(&["A", "B"], &idx, &bad).is_err());
        assert_eq!(novelty_scores(&idx, &cfg).unwrap().len(), 1);
    }

    #[test]
    fn decile_ratio() {
        let scored: Vec<PaperNovelty> = (0..20)
            .map(|i| PaperNovelty {
                paper_id: format!("{i:02}"),
                score: -(i as f64),
                upvotes: if i < 2 { 20 } else { 10 },
                month: "2025-01".parse().unwrap(),
            })
            .collect();
        let e = decile_effect(&scored).unwrap();
        assert_eq!(e.papers_per_decile, 2);
        assert_eq!(e.ratio, Some(2.0));
        assert!(decile_effect(&scored[..9]).is_none());
    }
}
