// Merge a month's free-form topic labels into named clusters, once with the
// lexical fallback and once through a provider.
//
// `cargo run --example consolidate_month`

use paperbrew::consolidate::{consolidate_fallback, consolidate_month, AliasTable, LabelInventory};
use paperbrew::provider::MockProvider;
use paperbrew::YearMonth;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let month = YearMonth::new(2026, 3).ok_or("bad month")?;
    let inventory = LabelInventory {
        month,
        counts: [
            ("Large Language Models", 40),
            ("large language models", 6),
            ("LLMs", 9),
            ("Diffusion Models", 12),
            ("VLMs", 7),
            ("Vision-Language Models", 15),
        ]
        .into_iter()
        .map(|(l, c)| (l.to_string(), c))
        .collect(),
    };
    let aliases = AliasTable::parse("LLMs\tLarge Language Models\nVLMs\tVision-Language Models\n")?;

    let lexical = consolidate_fallback(&inventory, Some(&aliases));
    for c in &lexical.clusters {
        println!("{:<24} {:>3}  <- {:?}", c.name, c.label_count, c.members);
    }
    assert_eq!(lexical.clusters.iter().map(|c| c.label_count).sum::<u64>(), inventory.total());

    let via_provider = consolidate_month(&inventory, Some(&MockProvider::new()), Some(&aliases), 20)?;
    println!("provider path: {:?}, {} clusters", via_provider.path, via_provider.clusters.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
