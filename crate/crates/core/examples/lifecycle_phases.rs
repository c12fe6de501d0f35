// Place every sufficiently large topic of a synthetic corpus on the hype
// cycle and report how fast topics peak and fade.
//
// `cargo run --example lifecycle_phases`

use paperbrew::analytics::{build_index, build_snapshot, velocity_summary, HalfLife, MIN_PAPERS};
use paperbrew::synth::{synth_corpus, SynthConfig};
use paperbrew::YearMonth;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth_corpus(&SynthConfig {
        papers: 3000,
        months: 24,
        ..SynthConfig::default()
    });
    let index = build_index(&corpus.summaries, &corpus.records)?;
    let window_end = YearMonth::new(2025, 12).ok_or("bad month")?;
    let snapshot = build_snapshot(&index, window_end, MIN_PAPERS)?;

    println!("{:<32} {:<30} {:>6} {:>7} {:>9}", "topic", "phase", "papers", "delta", "slope");
    for (topic, e) in &snapshot.lifecycle_data {
        println!(
            "{topic:<32} {:<30} {:>6} {:>7.3} {:>9.5}",
            e.phase.display_name(),
            e.total_count,
            e.decline_ratio,
            e.trend_slope
        );
    }

    let v = velocity_summary(&index)?;
    for t in v.topics.iter().take(5) {
        let hl = match t.half_life {
            HalfLife::Months(m) => format!("{m} months"),
            HalfLife::Censored => "censored".into(),
        };
        println!("{}: peaked after {} months, half-life {hl}", t.topic, t.time_to_peak);
    }
    println!("median time to peak {:?}, median half-life {:?}", v.median_time_to_peak, v.median_half_life);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
