//! Brute-force reimplementations of the corpus analytics, written against the
//! raw records and summaries only. Shared by the oracle and acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use chrono::Datelike;
use paperbrew::analytics::{build_index, cooccurrence, monthly_proportions, new_topic_counts, novelty_scores, NoveltyConfig};
use paperbrew::synth::SynthCorpus;

pub struct Paper {
    pub id: String,
    pub month: String,
    pub topics: Vec<String>,
}

pub fn flatten(corpus: &SynthCorpus) -> Vec<Paper> {
    corpus
        .summaries
        .iter()
        .map(|s| {
            let r = corpus.records.iter().find(|r| r.paper_id == s.paper_id).expect("record for summary");
            let mut topics: Vec<String> = Vec::new();
            for t in &s.topics {
                let t = t.split_whitespace().collect::<Vec<_>>().join(" ");
                if !t.is_empty() && !topics.contains(&t) {
                    topics.push(t);
                }
            }
            let d = r.published_at;
            Paper {
                id: s.paper_id.clone(),
                month: format!("{:04}-{:02}", d.year(), d.month()),
                topics,
            }
        })
        .collect()
}

fn has(p: &Paper, t: &str) -> bool {
    p.topics.iter().any(|x| x == t)
}

fn papers_with(papers: &[Paper], t: &str) -> usize {
    papers.iter().filter(|p| has(p, t)).count()
}

fn all_topics(papers: &[Paper]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in papers {
        for t in &p.topics {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
    out.sort();
    out
}

fn month_span(papers: &[Paper]) -> Vec<String> {
    let first = papers.iter().map(|p| p.month.clone()).min().unwrap();
    let last = papers.iter().map(|p| p.month.clone()).max().unwrap();
    let (mut y, mut m): (i32, u32) = (first[..4].parse().unwrap(), first[5..].parse().unwrap());
    let mut out = Vec::new();
    loop {
        let label = format!("{y:04}-{m:02}");
        out.push(label.clone());
        if label == last {
            return out;
        }
        m += 1;
        if m == 13 {
            m = 1;
            y += 1;
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Compares the library against the brute-force versions. Counts must match
/// exactly and ratios to 1e-12.
pub fn check_equivalence(corpus: &SynthCorpus) -> Result<(), String> {
    let papers = flatten(corpus);
    let index = build_index(&corpus.summaries, &corpus.records).map_err(|e| e.to_string())?;
    let n = papers.len() as f64;
    let topics = all_topics(&papers);

    // co-occurrence among the top 10
    let mut ranked: Vec<(String, usize)> = topics.iter().map(|t| (t.clone(), papers_with(&papers, t))).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: Vec<String> = ranked.iter().take(10).map(|(t, _)| t.clone()).collect();
    let matrix = cooccurrence(&index, 10);
    if matrix.topics != top {
        return Err(format!("top topics differ: {:?} vs {:?}", matrix.topics, top));
    }
    for i in 0..top.len() {
        for j in 0..top.len() {
            if i == j {
                continue;
            }
            let mut both = 0u64;
            for p in &papers {
                if has(p, &top[i]) && has(p, &top[j]) {
                    both += 1;
                }
            }
            let union = papers_with(&papers, &top[i]) + papers_with(&papers, &top[j]) - both as usize;
            let jac = both as f64 / union as f64;
            let got = matrix.get(&top[i], &top[j]).ok_or("missing pair")?;
            if got.count != both || !close(got.jaccard, jac, 1e-12) {
                return Err(format!("pair {} x {}: {} {} vs {} {}", top[i], top[j], got.count, got.jaccard, both, jac));
            }
        }
    }

    // novelty
    let scored = novelty_scores(&index, &NoveltyConfig::default()).map_err(|e| e.to_string())?;
    let mut expected = 0;
    for p in &papers {
        if p.topics.len() < 2 {
            continue;
        }
        expected += 1;
        let mut sum = 0.0;
        let mut pairs = 0.0;
        for i in 0..p.topics.len() {
            for j in i + 1..p.topics.len() {
                let joint = papers.iter().filter(|q| has(q, &p.topics[i]) && has(q, &p.topics[j])).count();
                let pj = if joint == 0 { 0.5 / n } else { joint as f64 / n };
                let pa = papers_with(&papers, &p.topics[i]) as f64 / n;
                let pb = papers_with(&papers, &p.topics[j]) as f64 / n;
                sum += (pj / (pa * pb)).log2();
                pairs += 1.0;
            }
        }
        let want = -sum / pairs;
        let got = scored.iter().find(|s| s.paper_id == p.id).ok_or("unscored paper")?;
        if !close(got.score, want, 1e-12) {
            return Err(format!("novelty {}: {} vs {}", p.id, got.score, want));
        }
    }
    if scored.len() != expected {
        return Err(format!("{} scored papers, expected {expected}", scored.len()));
    }

    // emergence
    let span = month_span(&papers);
    let mut debut: BTreeMap<String, u64> = span.iter().map(|m| (m.clone(), 0)).collect();
    for t in &topics {
        let first = papers.iter().filter(|p| has(p, t)).map(|p| p.month.clone()).min().unwrap();
        *debut.get_mut(&first).unwrap() += 1;
    }
    let got: BTreeMap<String, u64> = new_topic_counts(&index).into_iter().map(|(m, c)| (m.to_string(), c)).collect();
    if got != debut {
        return Err(format!("new topic counts differ: {got:?} vs {debut:?}"));
    }

    // monthly proportions
    for t in &topics {
        let traj = monthly_proportions(&index, t).map_err(|e| e.to_string())?;
        if traj.counts.len() != span.len() {
            return Err(format!("{t}: trajectory covers {} months, span is {}", traj.counts.len(), span.len()));
        }
        for (k, m) in span.iter().enumerate() {
            let in_month: Vec<&Paper> = papers.iter().filter(|p| &p.month == m).collect();
            let c = in_month.iter().filter(|p| has(p, t)).count() as u64;
            let total: usize = in_month.iter().map(|p| p.topics.len()).sum();
            let prop = if total == 0 { 0.0 } else { c as f64 / total as f64 };
            if traj.counts[k] != c || !close(traj.proportions[k], prop, 1e-12) {
                return Err(format!("{t} {m}: {} {} vs {c} {prop}", traj.counts[k], traj.proportions[k]));
            }
        }
    }
    Ok(())
}
