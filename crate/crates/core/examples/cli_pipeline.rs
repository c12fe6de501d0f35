// The operator workflow end to end through the CLI entry point, fully
// offline: fixture feed, mock provider.
//
// `cargo run --example cli_pipeline`

use std::collections::HashMap;

use paperbrew::cli::run_with;
use paperbrew::synth::{synth_corpus, write_feed_fixtures, SynthConfig};
use paperbrew::YearMonth;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let work = tempfile::tempdir()?;
    let fixtures = work.path().join("fixtures");
    let corpus = synth_corpus(&SynthConfig {
        papers: 400,
        months: 6,
        first_month: YearMonth::new(2025, 10).ok_or("bad month")?,
        ..SynthConfig::default()
    });
    write_feed_fixtures(&fixtures, &corpus.records)?;

    let env = HashMap::from([("PAPERBREW_DATA_DIR".to_string(), work.path().join("data").display().to_string())]);
    let fx = fixtures.display().to_string();
    let mut steps: Vec<Vec<String>> = vec![
        vec!["ingest", "--from", "2025-10-01", "--to", "2026-03-31"],
        vec!["summarize", "--from", "2025-10-01", "--to", "2026-03-31"],
    ]
    .into_iter()
    .map(|s| s.into_iter().map(String::from).collect())
    .collect();
    for m in ["2025-10", "2025-11", "2025-12", "2026-01", "2026-02", "2026-03"] {
        steps.push(vec!["monthly".into(), "--month".into(), m.into()]);
    }
    steps.push(vec!["daily".into(), "--date".into(), corpus.records[0].published_at.to_string()]);
    steps.push(vec!["lifecycle".into(), "--window-end".into(), "2026-03".into()]);
    steps.push(vec!["stats".into(), "--from".into(), "2025-10-01".into(), "--to".into(), "2026-03-31".into()]);
    steps.push(vec!["novelty".into(), "--month".into(), "2026-03".into(), "--top".into(), "3".into()]);

    for step in steps {
        let mut args = vec!["paperbrew".to_string(), "--fixtures-dir".into(), fx.clone()];
        args.extend(step.iter().cloned());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&args, &env, &mut out, &mut err);
        println!("$ paperbrew {} -> exit {code}", step.join(" "));
        if code != 0 {
            return Err(String::from_utf8_lossy(&err).into_owned().into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
