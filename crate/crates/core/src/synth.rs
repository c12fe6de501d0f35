//! Seeded synthetic corpora for examples, tests and benchmarks.
//!
//! Topics follow rise-and-fall popularity curves so that lifecycle phases,
//! emergence and co-occurrence all have something to find.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, Utc, Weekday};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consolidate::LabelInventory;
use crate::datamodel::{PaperRecord, StructuredSummary};
use crate::error::Result;
use crate::ingest::to_entry;
use crate::month::YearMonth;
use crate::provider::MOCK_ZH_MARKER;
use crate::store::write_atomic;

const TOPIC_NAMES: &[&str] = &[
    "Large Language Models",
    "Vision-Language Models",
    "Diffusion Models",
    "Multimodal LLMs",
    "Reinforcement Learning",
    "Efficient Inference",
    "Code Generation",
    "AI Agents",
    "Video Generation",
    "Embodied AI",
    "Vision-Language-Action Models",
    "Mixture of Experts",
    "Retrieval-Augmented Generation",
    "3D Reconstruction",
    "Speech Synthesis",
    "Benchmarks",
    "Reward Modeling",
    "Mathematical Reasoning",
    "Computer Use Agents",
    "Pre-training Strategies",
];

const KEYWORDS: &[&str] = &[
    "alignment", "attention", "benchmark", "chain-of-thought", "compression", "contrastive", "dataset",
    "distillation", "evaluation", "fine-tuning", "grpo", "hallucination", "instruction", "kv-cache",
    "latency", "long-context", "lora", "planning", "quantization", "reasoning", "retrieval", "reward",
    "rlvr", "robotics", "scaling", "segmentation", "speculative", "synthetic-data", "tokenizer",
    "tool-use", "transformer", "video", "world-model", "zero-shot",
];

const TITLE_WORDS: &[&str] = &[
    "Scaling", "Efficient", "Adaptive", "Robust", "Unified", "Sparse", "Grounded", "Hierarchical",
    "Verifiable", "Modular", "Latent", "Streaming", "Compositional", "Causal", "Generative",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub papers: usize,
    pub first_month: YearMonth,
    pub months: u32,
    /// Distinct topic labels to draw from (extra ones are named `Topic NN`).
    pub topics: usize,
    pub max_topics_per_paper: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            papers: 300,
            first_month: YearMonth::new(2024, 1).expect("valid month"),
            months: 18,
            topics: 20,
            max_topics_per_paper: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub records: Vec<PaperRecord>,
    pub summaries: Vec<StructuredSummary>,
}

impl SynthCorpus {
    pub fn months(&self) -> Vec<YearMonth> {
        let mut m: Vec<YearMonth> = self.records.iter().map(|r| YearMonth::of(r.published_at)).collect();
        m.sort();
        m.dedup();
        m
    }
}

pub fn topic_name(i: usize) -> String {
    TOPIC_NAMES.get(i).map_or_else(|| format!("Topic {i:02}"), |s| s.to_string())
}

struct Curve {
    birth: f64,
    peak: f64,
    width: f64,
    height: f64,
}

impl Curve {
    fn weight(&self, t: f64) -> f64 {
        if t < self.birth {
            return 0.0;
        }
        let d = t - self.peak;
        // a floor keeps established topics alive after their peak
        self.height * ((-d * d / (2.0 * self.width * self.width)).exp() + 0.05)
    }
}

fn random_day(rng: &mut ChaCha8Rng, month: YearMonth) -> NaiveDate {
    let last = month.last_day().day();
    loop {
        let d = month.first_day().with_day(rng.gen_range(1..=last)).expect("day in month");
        let weekend = matches!(d.weekday(), Weekday::Sat | Weekday::Sun);
        // weekends are much quieter on the trending feed
        if !weekend || rng.gen_bool(0.2) {
            return d;
        }
    }
}

/// Heavy-tailed upvote count.
fn upvotes(rng: &mut ChaCha8Rng) -> i64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    ((3.0 * u.powf(-0.75)) as i64 - 2).clamp(0, 2000)
}

fn weighted_pick(rng: &mut ChaCha8Rng, weights: &[f64], taken: &[usize]) -> Option<usize> {
    let total: f64 = weights.iter().enumerate().filter(|(i, _)| !taken.contains(i)).map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if taken.contains(&i) {
            continue;
        }
        if x < *w {
            return Some(i);
        }
        x -= w;
    }
    (0..weights.len()).rev().find(|i| !taken.contains(i))
}

fn summary_for(id: &str, topics: Vec<String>, keywords: Vec<String>, extracted_at: DateTime<Utc>) -> StructuredSummary {
    let zh = |v: &[String]| v.iter().map(|s| format!("{MOCK_ZH_MARKER}{s}")).collect::<Vec<_>>();
    let concise = format!("A study of {}.", topics.join(" and "));
    let detailed = format!("Covers {}.", keywords.join(", "));
    StructuredSummary {
        paper_id: id.to_string(),
        concise_summary_zh: format!("{MOCK_ZH_MARKER}{concise}"),
        detailed_analysis_zh: format!("{MOCK_ZH_MARKER}{detailed}"),
        concise_summary: concise,
        detailed_analysis: detailed,
        topics_zh: zh(&topics),
        keywords_zh: zh(&keywords),
        topics,
        keywords,
        provider_id: "synth".into(),
        extracted_at,
    }
}

/// Generates `cfg.papers` papers with summaries. Same config, same corpus.
pub fn synth_corpus(cfg: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let months = cfg.months.max(1) as f64;
    let curves: Vec<Curve> = (0..cfg.topics.max(1))
        .map(|i| {
            // the first few topics exist from the start
            let birth = if i < 4 { 0.0 } else { rng.gen_range(0.0..months) };
            Curve {
                birth,
                peak: birth + rng.gen_range(0.0..months),
                width: rng.gen_range(1.5..6.0),
                height: 1.0 / (1.0 + i as f64 * 0.15),
            }
        })
        .collect();
    let extracted_at = DateTime::from_timestamp(1_700_000_000, 0).expect("valid timestamp");

    let mut seq: BTreeMap<YearMonth, u32> = BTreeMap::new();
    let mut records = Vec::with_capacity(cfg.papers);
    let mut summaries = Vec::with_capacity(cfg.papers);
    for _ in 0..cfg.papers {
        let offset = rng.gen_range(0..cfg.months.max(1));
        let month = cfg.first_month.offset(offset as i64);
        let weights: Vec<f64> = curves.iter().map(|c| c.weight(offset as f64 + 0.5)).collect();
        let k = rng.gen_range(1..=cfg.max_topics_per_paper.clamp(1, 3));
        let mut picked: Vec<usize> = Vec::new();
        while picked.len() < k {
            match weighted_pick(&mut rng, &weights, &picked) {
                Some(i) => picked.push(i),
                None => break,
            }
        }
        if picked.is_empty() {
            picked.push(0);
        }
        let n = seq.entry(month).or_insert(0);
        *n += 1;
        let id = format!("{:02}{:02}.{:05}", month.year() % 100, month.month(), *n);
        let date = random_day(&mut rng, month);

        let n_kw = rng.gen_range(4..=6);
        let mut kws: Vec<String> = KEYWORDS
            .choose_multiple(&mut rng, n_kw)
            .map(|s| s.to_string())
            .collect();
        kws.sort();
        let topics: Vec<String> = picked.iter().map(|&i| topic_name(i)).collect();
        let title = format!(
            "{} {} via {}",
            TITLE_WORDS.choose(&mut rng).expect("non-empty"),
            topics[0],
            kws[0]
        );
        records.push(PaperRecord {
            paper_id: id.clone(),
            version: Some(1),
            title,
            authors: vec![format!("Author {}", rng.gen_range(1..500))],
            abstract_text: format!(
                "We study {} with a focus on {}. Experiments cover {}.",
                topics.join(" and "),
                kws.join(", "),
                kws[kws.len() - 1]
            ),
            upvotes: upvotes(&mut rng),
            published_at: date,
            pdf_ref: None,
        });
        summaries.push(summary_for(&id, topics, kws, extracted_at));
    }
    SynthCorpus { records, summaries }
}

/// A label inventory of `n` distinct labels built from case and alias
/// variants of a small base vocabulary, with random counts.
pub fn fuzz_inventory(seed: u64, month: YearMonth, n: usize) -> LabelInventory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let mut attempts = 0;
    while counts.len() < n && attempts < n * 50 {
        attempts += 1;
        let base = topic_name(rng.gen_range(0..TOPIC_NAMES.len() + n / 4));
        let label = match rng.gen_range(0..5) {
            0 => base.to_lowercase(),
            1 => base.to_uppercase(),
            2 => format!("{base} {}", rng.gen_range(0..n)),
            3 => format!("{} for {base}", KEYWORDS.choose(&mut rng).expect("non-empty")),
            _ => base,
        };
        counts.insert(label, rng.gen_range(1..40));
    }
    LabelInventory { month, counts }
}

/// Writes `<dir>/feed/<date>.json` files in the trending-feed format for
/// every date carrying a record.
pub fn write_feed_fixtures(dir: &Path, records: &[PaperRecord]) -> Result<()> {
    let mut by_date: BTreeMap<NaiveDate, Vec<serde_json::Value>> = BTreeMap::new();
    for r in records {
        let mut entry = to_entry(r);
        entry.published_at = Some(format!("{}T09:00:00Z", r.published_at));
        by_date.entry(r.published_at).or_default().push(serde_json::to_value(entry)?);
    }
    for (date, entries) in by_date {
        let path = dir.join("feed").join(format!("{date}.json"));
        write_atomic(&path, serde_json::to_string_pretty(&entries)?.as_bytes())?;
    }
    Ok(())
}
