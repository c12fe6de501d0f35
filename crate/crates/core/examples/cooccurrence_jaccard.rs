// Topic diversity: monthly entropy, new-topic emergence, the co-occurrence
// matrix with Jaccard similarity, and keyword evolution inside one topic.
//
// `cargo run --example cooccurrence_jaccard`

use paperbrew::analytics::{build_index, cooccurrence, keyword_evolution, monthly_entropy, new_topic_counts};
use paperbrew::report::{keyword_series, SeriesTable};
use paperbrew::synth::{synth_corpus, SynthConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth_corpus(&SynthConfig { papers: 1200, ..SynthConfig::default() });
    let index = build_index(&corpus.summaries, &corpus.records)?;

    let entropy = monthly_entropy(&index);
    let new_topics = new_topic_counts(&index);
    for (m, h) in entropy.iter().take(4) {
        println!("{m}: H = {h:.3} bits, {} new labels", new_topics[m]);
    }

    let matrix = cooccurrence(&index, 8);
    let mut pairs = matrix.pairs.clone();
    pairs.sort_by(|a, b| b.jaccard.total_cmp(&a.jaccard));
    for p in pairs.iter().take(3) {
        println!("{} x {}: {} papers together, Jaccard {:.3}", p.a, p.b, p.count, p.jaccard);
    }

    let evolution = keyword_evolution(&index, &matrix.topics[0], 3)?;
    let table: SeriesTable = keyword_series(&evolution);
    print!("{}", String::from_utf8(table.to_csv()?)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
