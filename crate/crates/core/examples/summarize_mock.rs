// Summarize stored papers with the deterministic mock provider. The second
// pass hits the cache for every paper.
//
// `cargo run --example summarize_mock`

use paperbrew::provider::MockProvider;
use paperbrew::summarize::Summarizer;
use paperbrew::synth::{synth_corpus, SynthConfig};
use paperbrew::{Dataset, Store, StructuredSummary};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let work = tempfile::tempdir()?;
    let store = Store::open(work.path());
    let corpus = synth_corpus(&SynthConfig { papers: 12, ..SynthConfig::default() });
    for r in &corpus.records {
        store.modify_partition(Dataset::Papers, &r.published_at.to_string(), |v| v.push(r.clone()))?;
    }

    let provider = MockProvider::new();
    let summarizer = Summarizer::new(&store, &provider);
    let first = summarizer.summarize_batch(&corpus.records)?;
    let second = summarizer.summarize_batch(&corpus.records)?;
    println!("first: {} succeeded; second: {} skipped", first.succeeded, second.skipped_cached);
    assert_eq!(second.succeeded, 0);

    let summaries: Vec<StructuredSummary> = store.read_all(Dataset::Summaries)?;
    let s = &summaries[0];
    println!("{}: topics {:?}, keywords {:?}", s.paper_id, s.topics, s.keywords);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
