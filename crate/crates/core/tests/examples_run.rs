// Every example doubles as a smoke test.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(ingest_fixture, "ingest_fixture.rs");
example!(summarize_mock, "summarize_mock.rs");
example!(consolidate_month, "consolidate_month.rs");
example!(lifecycle_phases, "lifecycle_phases.rs");
example!(novelty_pmi, "novelty_pmi.rs");
example!(engagement_stats, "engagement_stats.rs");
example!(cooccurrence_jaccard, "cooccurrence_jaccard.rs");
example!(reports, "reports.rs");
example!(cli_pipeline, "cli_pipeline.rs");

#[test]
fn ingest_fixture_runs() {
    ingest_fixture::run_example().expect("ingest_fixture example failed");
}

#[test]
fn summarize_mock_runs() {
    summarize_mock::run_example().expect("summarize_mock example failed");
}

#[test]
fn consolidate_month_runs() {
    consolidate_month::run_example().expect("consolidate_month example failed");
}

#[test]
fn lifecycle_phases_runs() {
    lifecycle_phases::run_example().expect("lifecycle_phases example failed");
}

#[test]
fn novelty_pmi_runs() {
    novelty_pmi::run_example().expect("novelty_pmi example failed");
}

#[test]
fn engagement_stats_runs() {
    engagement_stats::run_example().expect("engagement_stats example failed");
}

#[test]
fn cooccurrence_jaccard_runs() {
    cooccurrence_jaccard::run_example().expect("cooccurrence_jaccard example failed");
}

#[test]
fn reports_runs() {
    reports::run_example().expect("reports example failed");
}

#[test]
fn cli_pipeline_runs() {
    cli_pipeline::run_example().expect("cli_pipeline example failed");
}
