// Upvote distribution summary and the weekday/weekend publication rhythm.
//
// `cargo run --example engagement_stats`

use paperbrew::analytics::{build_index, engagement_stats, topic_medians, weekday_weekend_means, DateSpan};
use paperbrew::synth::{synth_corpus, SynthConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth_corpus(&SynthConfig { papers: 1500, ..SynthConfig::default() });
    let upvotes: Vec<i64> = corpus.records.iter().map(|r| r.upvotes).collect();
    let stats = engagement_stats(&upvotes)?;
    println!(
        "n={} median={} p90={} max={} mean={:.1} skewness={:.2}",
        stats.n, stats.median, stats.p90, stats.max, stats.mean, stats.skewness
    );

    let span = DateSpan::covering(&corpus.records).ok_or("empty corpus")?;
    let rhythm = weekday_weekend_means(&corpus.records, span)?;
    println!("papers/day: weekdays {:.1}, weekends {:.1}", rhythm.weekday_mean, rhythm.weekend_mean);

    let index = build_index(&corpus.summaries, &corpus.records)?;
    let medians = topic_medians(&index);
    println!("median of per-topic medians: {:?}", medians.median_of_medians);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
