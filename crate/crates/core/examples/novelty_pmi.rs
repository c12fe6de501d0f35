// Score papers by how unusual their topic combination is (negated mean PMI)
// and compare engagement between the most and least novel tenth.
//
// `cargo run --example novelty_pmi`

use paperbrew::analytics::{build_index, decile_effect, novelty_scores, pmi, NoveltyConfig};
use paperbrew::synth::{synth_corpus, SynthConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth_corpus(&SynthConfig { papers: 2000, ..SynthConfig::default() });
    let index = build_index(&corpus.summaries, &corpus.records)?;
    let cfg = NoveltyConfig::default();

    let p = pmi(&index, "Large Language Models", "Reinforcement Learning", cfg.alpha)?;
    println!("PMI(LLMs, RL) = {p:.3} bits");

    let scored = novelty_scores(&index, &cfg)?;
    println!("{} papers with two or more topics", scored.len());
    for s in scored.iter().take(3) {
        println!("  {} novelty {:.3}: {:?}", s.paper_id, s.score, index.paper(&s.paper_id).map(|e| &e.topics));
    }
    if let Some(effect) = decile_effect(&scored) {
        println!(
            "top decile median upvotes {} vs bottom {} (ratio {:?})",
            effect.top_median_upvotes, effect.bottom_median_upvotes, effect.ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
