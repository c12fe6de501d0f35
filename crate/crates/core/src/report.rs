//! Daily, monthly and lifecycle renderers plus CSV plot series.
//!
//! Rendering is pure. The only nondeterministic text is an optional provider
//! narrative, and it only ever lands in `trending_summary`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analytics::{gaussian_smooth, KeywordSeries, SMOOTHING_SIGMA};
use crate::consolidate::{normalize_label, Consolidation};
use crate::datamodel::{
    rank_counts, DailyTrendReport, LifecycleEntry, LifecycleSnapshot, MonthlyTrendReport, PaperRecord, Phase,
    RankedCount, StructuredSummary, TopicTrajectory,
};
use crate::error::{Error, Result};
use crate::month::YearMonth;
use crate::provider::{Provider, ProviderRequest, RequestKind, ResponseSchema};
use crate::store::write_atomic;

/// Topics named in a template summary.
const SUMMARY_TOPICS: usize = 3;
const MONTHLY_TABLE_ROWS: usize = 5;
const KEYWORD_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Daily,
    Monthly,
    Lifecycle,
}

impl ReportKind {
    pub fn dir_name(self) -> &'static str {
        match self {
            ReportKind::Daily => "daily",
            ReportKind::Monthly => "monthly",
            ReportKind::Lifecycle => "lifecycle",
        }
    }
}

/// A rendered report: the structured record plus its Markdown view.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered<T> {
    pub report: T,
    pub markdown: String,
    pub warnings: Vec<String>,
}

impl<T: Serialize> Rendered<T> {
    pub fn json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report)? + "\n")
    }

    /// Writes `<data_dir>/reports/<kind>/<key>.md` and `.json`.
    pub fn emit(&self, data_dir: &Path, kind: ReportKind, key: &str) -> Result<Vec<PathBuf>> {
        let dir = data_dir.join("reports").join(kind.dir_name());
        let md = dir.join(format!("{key}.md"));
        let json = dir.join(format!("{key}.json"));
        write_atomic(&md, self.markdown.as_bytes())?;
        write_atomic(&json, self.json()?.as_bytes())?;
        Ok(vec![md, json])
    }
}

/// Asks the provider for a narrative, falling back to `template` on any
/// failure or empty answer.
fn narrate(provider: Option<&dyn Provider>, subject: &str, template: &str, context: String, warnings: &mut Vec<String>) -> String {
    let Some(p) = provider else {
        return template.to_string();
    };
    let request = ProviderRequest {
        kind: RequestKind::Narrative,
        subject: subject.to_string(),
        instruction: "Write a short trend summary (2-4 sentences) of the research papers described in the context. Plain prose, no lists.".into(),
        title: format!("Trend summary for {subject}"),
        abstract_text: String::new(),
        context: Some(context),
        document: None,
        schema: ResponseSchema::default(),
    };
    match p.complete(&request) {
        Ok(r) if !r.raw_text.trim().is_empty() => r.raw_text.trim().to_string(),
        Ok(_) => {
            warnings.push(format!("{subject}: provider returned an empty narrative; template used"));
            template.to_string()
        }
        Err(e) => {
            warnings.push(format!("{subject}: narrative failed ({e}); template used"));
            template.to_string()
        }
    }
}

fn template_summary(n_papers: usize, topics: &[RankedCount]) -> String {
    let named: Vec<String> = topics
        .iter()
        .take(SUMMARY_TOPICS)
        .map(|t| format!("{} ({})", t.label, t.count))
        .collect();
    let list = if named.is_empty() { "none".to_string() } else { named.join(", ") };
    format!("{n_papers} papers; top topics: {list}")
}

/// Upvotes descending, then id ascending.
pub fn order_by_upvotes(records: &mut [PaperRecord]) {
    records.sort_by(|a, b| b.upvotes.cmp(&a.upvotes).then_with(|| a.paper_id.cmp(&b.paper_id)));
}

/// Counts each normalized label once per summary.
fn label_counts<'a>(summaries: impl IntoIterator<Item = &'a StructuredSummary>, pick: fn(&StructuredSummary) -> &[String]) -> Vec<RankedCount> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for s in summaries {
        let labels: BTreeSet<String> = pick(s)
            .iter()
            .map(|l| normalize_label(l, None))
            .filter(|l| !l.is_empty())
            .collect();
        for l in labels {
            *counts.entry(l).or_default() += 1;
        }
    }
    rank_counts(counts)
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn paper_list(out: &mut String, records: &[PaperRecord], by_id: &HashMap<&str, &StructuredSummary>) {
    for (i, r) in records.iter().enumerate() {
        let _ = writeln!(out, "{}. **{}** ({}, {} upvotes)", i + 1, md_escape(&r.title), r.paper_id, r.upvotes);
        match by_id.get(r.paper_id.as_str()) {
            Some(s) => {
                let _ = writeln!(out, "   - TL;DR: {}", md_escape(&s.concise_summary));
                let _ = writeln!(out, "   - Topics: {}", s.topics.join(", "));
            }
            None => {
                let _ = writeln!(out, "   - not summarized yet");
            }
        }
    }
}

fn ranked_list(out: &mut String, items: &[RankedCount], limit: usize) {
    if items.is_empty() {
        out.push_str("_none_\n");
    }
    for t in items.iter().take(limit) {
        let _ = writeln!(out, "- {} ({})", t.label, t.count);
    }
}

/// Builds the daily report for `date` from that day's records and whatever
/// summaries exist for them. An empty day still yields a report.
pub fn render_daily(
    date: NaiveDate,
    records: &[PaperRecord],
    summaries: &[StructuredSummary],
    narrator: Option<&dyn Provider>,
) -> Rendered<DailyTrendReport> {
    let mut papers: Vec<PaperRecord> = records.iter().filter(|r| r.published_at == date).cloned().collect();
    order_by_upvotes(&mut papers);
    let ids: BTreeSet<&str> = papers.iter().map(|r| r.paper_id.as_str()).collect();
    let day_summaries: Vec<&StructuredSummary> = summaries.iter().filter(|s| ids.contains(s.paper_id.as_str())).collect();
    let by_id: HashMap<&str, &StructuredSummary> = day_summaries.iter().map(|s| (s.paper_id.as_str(), *s)).collect();

    let top_topics = label_counts(day_summaries.iter().copied(), |s| &s.topics);
    let keywords = label_counts(day_summaries.iter().copied(), |s| &s.keywords);
    let template = template_summary(papers.len(), &top_topics);
    let mut warnings = Vec::new();
    let context = format!(
        "{template}. Titles: {}",
        papers.iter().map(|p| p.title.as_str()).collect::<Vec<_>>().join("; ")
    );
    let trending_summary = narrate(narrator, &date.to_string(), &template, context, &mut warnings);

    let mut md = String::new();
    let _ = writeln!(md, "# Trending papers for {date}\n");
    let _ = writeln!(md, "{trending_summary}\n");
    md.push_str("## Papers\n\n");
    if papers.is_empty() {
        md.push_str("_no papers_\n");
    }
    paper_list(&mut md, &papers, &by_id);
    md.push_str("\n## Top topics\n\n");
    ranked_list(&mut md, &top_topics, KEYWORD_ROWS);
    md.push_str("\n## Keywords\n\n");
    ranked_list(&mut md, &keywords, KEYWORD_ROWS);

    Rendered {
        report: DailyTrendReport {
            date,
            trending_summary,
            top_topics,
            keywords,
            daily_report: md.clone(),
        },
        markdown: md,
        warnings,
    }
}

/// Cluster → number of distinct papers carrying any member label.
pub fn cluster_paper_counts(consolidation: &Consolidation, summaries: &[&StructuredSummary]) -> (BTreeMap<String, u64>, BTreeSet<String>) {
    let lookup = consolidation.label_to_cluster();
    let mut counts: BTreeMap<String, u64> = consolidation.clusters.iter().map(|c| (c.name.clone(), 0)).collect();
    let mut unmapped = BTreeSet::new();
    for s in summaries {
        let mut hit = BTreeSet::new();
        for t in &s.topics {
            let label = normalize_label(t, None);
            match lookup.get(&label) {
                Some(c) => {
                    hit.insert(c.clone());
                }
                None if !label.is_empty() => {
                    unmapped.insert(label);
                }
                None => {}
            }
        }
        for c in hit {
            *counts.entry(c).or_default() += 1;
        }
    }
    (counts, unmapped)
}

/// Builds the monthly report. `records` are the month's deduplicated papers;
/// `consolidation` must exist for the month.
pub fn render_monthly(
    month: YearMonth,
    records: &[PaperRecord],
    summaries: &[StructuredSummary],
    consolidation: Option<&Consolidation>,
    narrator: Option<&dyn Provider>,
) -> Result<Rendered<MonthlyTrendReport>> {
    let consolidation = consolidation.ok_or_else(|| Error::MissingConsolidation(month.to_string()))?;
    let mut papers: Vec<PaperRecord> = records.iter().filter(|r| YearMonth::of(r.published_at) == month).cloned().collect();
    order_by_upvotes(&mut papers);
    let ids: BTreeSet<&str> = papers.iter().map(|r| r.paper_id.as_str()).collect();
    let month_summaries: Vec<&StructuredSummary> = summaries.iter().filter(|s| ids.contains(s.paper_id.as_str())).collect();
    let by_id: HashMap<&str, &StructuredSummary> = month_summaries.iter().map(|s| (s.paper_id.as_str(), *s)).collect();

    let (counts, unmapped) = cluster_paper_counts(consolidation, &month_summaries);
    let mut warnings = Vec::new();
    if !unmapped.is_empty() {
        warnings.push(format!(
            "{month}: {} label(s) absent from the consolidation mapping",
            unmapped.len()
        ));
    }
    let top_topics = rank_counts(counts);
    let keywords = label_counts(month_summaries.iter().copied(), |s| &s.keywords);
    let n = papers.len();
    let template = template_summary(n, &top_topics);
    let context = format!(
        "{template}. Keywords: {}",
        keywords.iter().take(KEYWORD_ROWS).map(|k| k.label.as_str()).collect::<Vec<_>>().join(", ")
    );
    let trending_summary = narrate(narrator, &month.to_string(), &template, context, &mut warnings);

    let mut md = String::new();
    let _ = writeln!(md, "# Monthly trends for {month}\n");
    let _ = writeln!(md, "{trending_summary}\n");
    let _ = writeln!(md, "{n} unique papers.\n");
    md.push_str("## Top topics\n\n");
    md.push_str("| Rank | Topic | Count | % | Cum. % |\n|---:|---|---:|---:|---:|\n");
    let mut cum = 0.0;
    for (i, t) in top_topics.iter().take(MONTHLY_TABLE_ROWS).enumerate() {
        let pct = if n == 0 { 0.0 } else { 100.0 * t.count as f64 / n as f64 };
        cum += pct;
        let _ = writeln!(md, "| {} | {} | {} | {:.1} | {:.1} |", i + 1, md_escape(&t.label), t.count, pct, cum);
    }
    md.push_str("\n## Topic mapping\n\n");
    for c in &consolidation.clusters {
        let _ = writeln!(md, "- **{}**: {}", md_escape(&c.name), c.members.join(", "));
    }
    md.push_str("\n## Trending keywords\n\n");
    ranked_list(&mut md, &keywords, KEYWORD_ROWS);
    md.push_str("\n## Most upvoted\n\n");
    paper_list(&mut md, &papers[..papers.len().min(MONTHLY_TABLE_ROWS)], &by_id);

    Ok(Rendered {
        report: MonthlyTrendReport {
            month,
            trending_summary,
            top_topics,
            topic_mapping: consolidation.topic_mapping(),
            monthly_report: md.clone(),
        },
        markdown: md,
        warnings,
    })
}

/// A topic's position on the hype-cycle chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypeCyclePlacement {
    pub topic: String,
    pub phase: Phase,
    pub x: f64,
    /// Total count relative to the largest topic in the snapshot.
    pub dot_size: f64,
}

/// Half-open x-interval of each phase; the last band is closed at 1.
pub fn phase_band(phase: Phase) -> (f64, f64) {
    match phase {
        Phase::InnovationTrigger => (0.0, 0.18),
        Phase::Peak => (0.18, 0.38),
        Phase::Trough => (0.38, 0.60),
        Phase::Slope => (0.60, 0.80),
        Phase::Plateau => (0.80, 1.0),
    }
}

/// Spreads each phase's topics evenly over its band, largest first.
pub fn hype_cycle_placements(snapshot: &LifecycleSnapshot) -> Vec<HypeCyclePlacement> {
    let max = snapshot.lifecycle_data.values().map(|e| e.total_count).max().unwrap_or(0);
    let mut out = Vec::new();
    for phase in Phase::ALL {
        let mut members: Vec<(&String, &LifecycleEntry)> =
            snapshot.lifecycle_data.iter().filter(|(_, e)| e.phase == phase).collect();
        members.sort_by(|a, b| b.1.total_count.cmp(&a.1.total_count).then_with(|| a.0.cmp(b.0)));
        let (lo, hi) = phase_band(phase);
        let step = (hi - lo) / members.len().max(1) as f64;
        for (i, (topic, e)) in members.into_iter().enumerate() {
            out.push(HypeCyclePlacement {
                topic: topic.clone(),
                phase,
                x: lo + (i as f64 + 0.5) * step,
                dot_size: if max == 0 { 0.0 } else { e.total_count as f64 / max as f64 },
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleReport {
    pub snapshot: LifecycleSnapshot,
    pub placements: Vec<HypeCyclePlacement>,
}

/// Per-topic table plus chart placements. Fails on an empty snapshot.
pub fn render_lifecycle(snapshot: &LifecycleSnapshot) -> Result<Rendered<LifecycleReport>> {
    if snapshot.lifecycle_data.is_empty() {
        return Err(Error::Precondition(format!(
            "lifecycle snapshot {} has no admitted topics",
            snapshot.snapshot_id
        )));
    }
    let placements = hype_cycle_placements(snapshot);
    let mut md = String::new();
    let _ = writeln!(md, "# Topic lifecycle as of {}\n", snapshot.snapshot_id);
    let _ = writeln!(
        md,
        "{} papers over {} months; {} topics classified.\n",
        snapshot.n_papers,
        snapshot.n_months,
        snapshot.lifecycle_data.len()
    );
    for phase in Phase::ALL {
        let rows: Vec<&HypeCyclePlacement> = placements.iter().filter(|p| p.phase == phase).collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(md, "## {}\n", phase.display_name());
        md.push_str("| Topic | Papers | Peak share | Peak month | Decline ratio | Slope | Recent fraction |\n");
        md.push_str("|---|---:|---:|---|---:|---:|---:|\n");
        for p in rows {
            let e = &snapshot.lifecycle_data[&p.topic];
            let _ = writeln!(
                md,
                "| {} | {} | {:.4} | {} | {:.3} | {:.5} | {:.3} |",
                md_escape(&p.topic),
                e.total_count,
                e.peak_proportion,
                e.peak_month,
                e.decline_ratio,
                e.trend_slope,
                e.recent_fraction
            );
        }
        md.push('\n');
    }
    Ok(Rendered {
        report: LifecycleReport {
            snapshot: snapshot.clone(),
            placements,
        },
        markdown: md,
        warnings: Vec::new(),
    })
}

/// A labelled table of optional numbers; `None` renders as an empty cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl SeriesTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for (label, values) in &self.rows {
            let mut rec = vec![label.clone()];
            rec.extend(values.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))
    }
}

/// Columns month, raw, smoothed.
pub fn trajectory_series(trajectory: &TopicTrajectory) -> SeriesTable {
    let raw: Vec<Option<f64>> = trajectory.proportions.iter().copied().map(Some).collect();
    let smooth = gaussian_smooth(&raw, SMOOTHING_SIGMA);
    let mut t = SeriesTable::new(["month", "raw", "smoothed"]);
    for (i, (r, s)) in raw.into_iter().zip(smooth).enumerate() {
        t.rows.push((trajectory.month_at(i).to_string(), vec![r, s]));
    }
    t
}

/// One raw and one smoothed column per keyword; months with no topic papers
/// stay empty.
pub fn keyword_series(series: &KeywordSeries) -> SeriesTable {
    let mut columns = vec!["month".to_string()];
    let mut cols: Vec<Vec<Option<f64>>> = Vec::new();
    let months: Vec<YearMonth> = series.values().next().map(|m| m.keys().copied().collect()).unwrap_or_default();
    for (kw, by_month) in series {
        let raw: Vec<Option<f64>> = months.iter().map(|m| by_month.get(m).copied().flatten()).collect();
        columns.push(kw.clone());
        columns.push(format!("{kw} (smoothed)"));
        cols.push(gaussian_smooth(&raw, SMOOTHING_SIGMA));
        let idx = cols.len() - 1;
        cols.insert(idx, raw);
    }
    let mut t = SeriesTable::new(columns);
    for (i, m) in months.iter().enumerate() {
        t.rows.push((m.to_string(), cols.iter().map(|c| c[i]).collect()));
    }
    t
}

/// Writes `<data_dir>/plots/<name>.csv`.
pub fn emit_series(data_dir: &Path, name: &str, table: &SeriesTable) -> Result<PathBuf> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(Error::Invalid(format!("bad series name {name:?}")));
    }
    let path = data_dir.join("plots").join(format!("{name}.csv"));
    write_atomic(&path, &table.to_csv()?)?;
    Ok(path)
}
