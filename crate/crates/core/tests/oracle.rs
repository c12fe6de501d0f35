mod support;

use paperbrew::synth::{synth_corpus, SynthConfig};

#[test]
fn analytics_match_brute_force_on_300_papers() {
    let corpus = synth_corpus(&SynthConfig {
        papers: 300,
        max_topics_per_paper: 3,
        ..SynthConfig::default()
    });
    support::check_equivalence(&corpus).unwrap();
}

#[test]
fn analytics_match_brute_force_across_seeds() {
    for seed in 1..6 {
        let corpus = synth_corpus(&SynthConfig {
            seed,
            papers: 150,
            months: 6,
            topics: 8,
            ..SynthConfig::default()
        });
        support::check_equivalence(&corpus).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}
