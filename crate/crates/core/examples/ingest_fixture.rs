// Ingest two weeks of a recorded trending feed into the date-partitioned store.
//
// `cargo run --example ingest_fixture`

use paperbrew::ingest::{FixtureFeed, Ingestor};
use paperbrew::synth::{synth_corpus, write_feed_fixtures, SynthConfig};
use paperbrew::{Dataset, PaperRecord, Store, YearMonth};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let work = tempfile::tempdir()?;
    let fixtures = work.path().join("fixtures");
    let corpus = synth_corpus(&SynthConfig {
        papers: 40,
        months: 1,
        first_month: YearMonth::new(2026, 3).ok_or("bad month")?,
        ..SynthConfig::default()
    });
    write_feed_fixtures(&fixtures, &corpus.records)?;

    let store = Store::open(work.path().join("data"));
    let ingestor = Ingestor::new(Box::new(FixtureFeed::new(&fixtures)));
    let from = "2026-03-01".parse()?;
    let to = "2026-03-31".parse()?;
    let first = ingestor.ingest_range(&store, from, to)?;
    println!("first run: {} days, {} entries, {} stored", first.days, first.entries, first.stored);

    // a second run merges into the same partitions instead of duplicating
    ingestor.ingest_range(&store, from, to)?;
    let stored: Vec<PaperRecord> = store.read_all(Dataset::Papers)?;
    println!("after rerun: {} papers in {} partitions", stored.len(), store.partition_keys(Dataset::Papers)?.len());
    assert_eq!(stored.len(), corpus.records.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
