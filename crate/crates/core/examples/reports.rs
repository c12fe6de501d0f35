// Render daily, monthly and lifecycle reports plus a plot series into a
// scratch data directory.
//
// `cargo run --example reports`

use paperbrew::analytics::{build_index, build_snapshot, monthly_proportions};
use paperbrew::consolidate::{consolidate_fallback, LabelInventory};
use paperbrew::report::{emit_series, render_daily, render_lifecycle, render_monthly, trajectory_series, ReportKind};
use paperbrew::synth::{synth_corpus, SynthConfig};
use paperbrew::{StructuredSummary, YearMonth};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let work = tempfile::tempdir()?;
    let corpus = synth_corpus(&SynthConfig { papers: 800, ..SynthConfig::default() });

    let day = corpus.records[0].published_at;
    let daily = render_daily(day, &corpus.records, &corpus.summaries, None);
    daily.emit(work.path(), ReportKind::Daily, &day.to_string())?;
    println!("{}", daily.report.trending_summary);

    let month = YearMonth::of(day);
    let in_month: Vec<&StructuredSummary> = corpus
        .summaries
        .iter()
        .zip(&corpus.records)
        .filter(|(_, r)| YearMonth::of(r.published_at) == month)
        .map(|(s, _)| s)
        .collect();
    let consolidation = consolidate_fallback(&LabelInventory::from_summaries(month, in_month), None);
    let monthly = render_monthly(month, &corpus.records, &corpus.summaries, Some(&consolidation), None)?;
    monthly.emit(work.path(), ReportKind::Monthly, &month.to_string())?;
    println!("{}", monthly.markdown.lines().take(12).collect::<Vec<_>>().join("\n"));

    let index = build_index(&corpus.summaries, &corpus.records)?;
    let (_, last) = index.span().ok_or("empty corpus")?;
    let snapshot = build_snapshot(&index, last, 15)?;
    let lifecycle = render_lifecycle(&snapshot)?;
    let files = lifecycle.emit(work.path(), ReportKind::Lifecycle, &snapshot.snapshot_id)?;
    println!("lifecycle report: {} placements, files {:?}", lifecycle.report.placements.len(), files);

    let traj = monthly_proportions(&index, "Large Language Models")?;
    let csv = emit_series(work.path(), "llms", &trajectory_series(&traj))?;
    println!("plot data: {}", csv.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
