//! Command-line front end: configuration, subcommands, exit codes and the
//! operation log.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{NaiveDate, Utc};
use clap::{CommandFactory, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytics::{
    self, build_index, build_snapshot, consolidated_index, cooccurrence, decile_effect, engagement_stats,
    monthly_entropy, monthly_proportions, new_topic_counts, novelty_scores, topic_medians, velocity_summary,
    weekday_weekend_means, CorpusIndex, DateSpan, NoveltyConfig,
};
use crate::consolidate::{collect_labels, consolidate_month, AliasTable, Consolidation, DEFAULT_TARGET_CLUSTERS};
use crate::datamodel::{LifecycleSnapshot, MonthlyTrendReport, PaperRecord, StructuredSummary};
use crate::error::{Error, Result};
use crate::ingest::{dedupe_month, FixtureAbstracts, FixtureFeed, HttpFeed, Ingestor, DEFAULT_FEED_URL};
use crate::month::YearMonth;
use crate::provider::{FixtureProvider, HttpProvider, MockProvider, Provider};
use crate::report::{
    emit_series, render_daily, render_lifecycle, render_monthly, trajectory_series, ReportKind, SeriesTable,
};
use crate::store::{Dataset, DirRemote, NoRemote, RemoteLookup, Store};
use crate::summarize::{SummarizeOptions, Summarizer};

pub const DEFAULT_DATA_DIR: &str = "paperbrew-data";
pub const DEFAULT_LIVE_ENDPOINT: &str = "http://localhost:4000/v1/chat/completions";
pub const DEFAULT_LIVE_MODEL: &str = "gemini/gemini-2.5-flash";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Mock,
    Fixture,
    Live,
}

/// Optional keys of the TOML config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data_dir: Option<PathBuf>,
    pub feed_url: Option<String>,
    pub feed_token: Option<String>,
    pub provider: Option<ProviderKind>,
    pub provider_key: Option<String>,
    pub provider_endpoint: Option<String>,
    pub provider_model: Option<String>,
    pub fixtures_dir: Option<PathBuf>,
    pub remote_dir: Option<PathBuf>,
    pub concurrency: Option<usize>,
    pub alias_table: Option<PathBuf>,
    pub raw_labels: Option<bool>,
    pub narrative: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub data_dir: PathBuf,
    pub feed_url: String,
    pub feed_token: Option<String>,
    pub provider: ProviderKind,
    pub provider_key: Option<String>,
    pub provider_endpoint: String,
    pub provider_model: String,
    /// Offline mode: feed payloads, abstracts and provider responses come from here.
    pub fixtures_dir: Option<PathBuf>,
    /// Mirror consulted as the second cache tier.
    pub remote_dir: Option<PathBuf>,
    pub concurrency: usize,
    pub alias_table: Option<PathBuf>,
    pub raw_labels: bool,
    /// Ask the provider for report narratives instead of the template.
    pub narrative: bool,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.provider == ProviderKind::Live && self.provider_key.is_none() {
            return Err(Error::Config(
                "provider=live needs a key (PAPERBREW_PROVIDER_KEY or provider_key)".into(),
            ));
        }
        if self.provider == ProviderKind::Fixture && self.fixtures_dir.is_none() {
            return Err(Error::Config("provider=fixture needs fixtures_dir".into()));
        }
        if self.concurrency == 0 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "paperbrew", version, about = "Trending-paper ingestion, summarization and trend analytics")]
pub struct Cli {
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    /// TOML config file (default: <data_dir>/config).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub fixtures_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub concurrency: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch the trending feed for a day or a range of days.
    Ingest {
        #[arg(long, conflicts_with_all = ["from", "to"], required_unless_present_all = ["from", "to"])]
        date: Option<NaiveDate>,
        #[arg(long, requires = "to")]
        from: Option<NaiveDate>,
        #[arg(long, requires = "from")]
        to: Option<NaiveDate>,
    },
    /// Summarize stored papers, skipping cached ones.
    Summarize {
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        #[arg(long, value_enum)]
        provider: Option<ProviderKind>,
    },
    /// Render the daily report.
    Daily {
        #[arg(long)]
        date: NaiveDate,
    },
    /// Consolidate the month's topics and render the monthly report.
    Monthly {
        #[arg(long)]
        month: YearMonth,
    },
    /// Classify topics into hype-cycle phases.
    Lifecycle {
        #[arg(long)]
        window_end: YearMonth,
        #[arg(long, default_value_t = analytics::MIN_PAPERS)]
        min_papers: u64,
        /// Use raw labels instead of consolidated clusters.
        #[arg(long)]
        raw_labels: bool,
    },
    /// Corpus statistics over a date range.
    Stats {
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        /// Use consolidated clusters instead of raw labels.
        #[arg(long)]
        consolidated: bool,
    },
    /// Most novel papers of a month.
    Novelty {
        #[arg(long)]
        month: YearMonth,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::Summarize { .. } => "summarize",
            Command::Daily { .. } => "daily",
            Command::Monthly { .. } => "monthly",
            Command::Lifecycle { .. } => "lifecycle",
            Command::Stats { .. } => "stats",
            Command::Novelty { .. } => "novelty",
        }
    }
}

/// Layers flags over environment over file over defaults.
pub fn resolve_config(cli: &Cli, env: &HashMap<String, String>) -> Result<Config> {
    let env_path = |k: &str| env.get(k).map(PathBuf::from);
    let early_dir = cli.data_dir.clone().or_else(|| env_path("PAPERBREW_DATA_DIR"));
    let file_path = cli
        .config
        .clone()
        .or_else(|| early_dir.as_ref().map(|d| d.join("config")).filter(|p| p.is_file()));
    let file: FileConfig = match &file_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let provider = match env.get("PAPERBREW_PROVIDER") {
        Some(v) => match v.to_ascii_lowercase().as_str() {
            "mock" => Some(ProviderKind::Mock),
            "fixture" => Some(ProviderKind::Fixture),
            "live" => Some(ProviderKind::Live),
            other => return Err(Error::Config(format!("PAPERBREW_PROVIDER: unknown provider {other:?}"))),
        },
        None => None,
    };
    let cmd_provider = match &cli.command {
        Command::Summarize { provider, .. } => *provider,
        _ => None,
    };
    let config = Config {
        data_dir: early_dir.or(file.data_dir).unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR)),
        feed_url: env
            .get("PAPERBREW_FEED_URL")
            .cloned()
            .or(file.feed_url)
            .unwrap_or_else(|| DEFAULT_FEED_URL.to_string()),
        feed_token: env.get("PAPERBREW_FEED_TOKEN").cloned().or(file.feed_token),
        provider: cmd_provider.or(provider).or(file.provider).unwrap_or(ProviderKind::Mock),
        provider_key: env.get("PAPERBREW_PROVIDER_KEY").cloned().or(file.provider_key),
        provider_endpoint: file.provider_endpoint.unwrap_or_else(|| DEFAULT_LIVE_ENDPOINT.to_string()),
        provider_model: file.provider_model.unwrap_or_else(|| DEFAULT_LIVE_MODEL.to_string()),
        fixtures_dir: cli.fixtures_dir.clone().or(file.fixtures_dir),
        remote_dir: file.remote_dir,
        concurrency: cli.concurrency.or(file.concurrency).unwrap_or(4),
        alias_table: file.alias_table,
        raw_labels: file.raw_labels.unwrap_or(false),
        narrative: file.narrative.unwrap_or(false),
    };
    config.validate()?;
    Ok(config)
}

fn build_provider(config: &Config) -> Result<Box<dyn Provider>> {
    Ok(match config.provider {
        ProviderKind::Mock => Box::new(MockProvider::new()),
        ProviderKind::Fixture => {
            let dir = config.fixtures_dir.as_ref().expect("validated").join("responses");
            Box::new(FixtureProvider::new(dir))
        }
        ProviderKind::Live => Box::new(HttpProvider::new(
            &config.provider_endpoint,
            &config.provider_model,
            config.provider_key.clone().expect("validated"),
        )?),
    })
}

fn open_store(config: &Config) -> Store {
    let remote: Box<dyn RemoteLookup> = match &config.remote_dir {
        Some(d) => Box::new(DirRemote::new(d)),
        None => Box::new(NoRemote),
    };
    Store::with_remote(&config.data_dir, remote)
}

/// Outcome of a subcommand: 0 done, 1 partial.
struct Outcome {
    code: i32,
    output: Value,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Self { code: 0, output }
    }
}

/// Every stored paper (deduplicated) and summary.
fn load_corpus(store: &Store) -> Result<(Vec<PaperRecord>, Vec<StructuredSummary>)> {
    let records: Vec<PaperRecord> = store.read_all(Dataset::Papers)?;
    let summaries: Vec<StructuredSummary> = store.read_all(Dataset::Summaries)?;
    Ok((dedupe_month(&records), summaries))
}

fn raw_index(store: &Store) -> Result<(CorpusIndex, Vec<PaperRecord>)> {
    let (records, summaries) = load_corpus(store)?;
    Ok((build_index(&summaries, &records)?, records))
}

/// Stored month consolidations as label → cluster maps.
fn stored_mappings(store: &Store) -> Result<BTreeMap<YearMonth, BTreeMap<String, String>>> {
    let reports: Vec<MonthlyTrendReport> = store.read_all(Dataset::MonthlyTrending)?;
    Ok(reports
        .iter()
        .map(|r| (r.month, Consolidation::from_report(r).label_to_cluster()))
        .collect())
}

fn consolidated(store: &Store, raw: &CorpusIndex, warnings: &mut Vec<String>) -> Result<CorpusIndex> {
    let (idx, unmapped) = consolidated_index(raw, &stored_mappings(store)?);
    if !unmapped.is_empty() {
        let months: Vec<String> = unmapped.iter().map(ToString::to_string).collect();
        warnings.push(format!("no consolidation for {}; raw labels used there", months.join(", ")));
    }
    Ok(idx)
}

fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    s.split('-').filter(|p| !p.is_empty()).collect::<Vec<_>>().join("-")
}

fn paths_json(paths: &[PathBuf]) -> Value {
    json!(paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>())
}

fn cmd_ingest(config: &Config, store: &Store, from: NaiveDate, to: NaiveDate) -> Result<Outcome> {
    let mut ingestor = match &config.fixtures_dir {
        Some(dir) => {
            let mut i = Ingestor::new(Box::new(FixtureFeed::new(dir)));
            let abstracts = dir.join("abstracts");
            if abstracts.is_dir() {
                i = i.with_abstract_source(Box::new(FixtureAbstracts::new(abstracts)));
            }
            i
        }
        None => Ingestor::new(Box::new(HttpFeed::new(&config.feed_url, config.feed_token.clone())?)),
    };
    ingestor = ingestor.with_concurrency(config.concurrency);
    let report = ingestor.ingest_range(store, from, to)?;
    let code = if report.rejected > 0 { 1 } else { 0 };
    Ok(Outcome {
        code,
        output: serde_json::to_value(&report)?,
    })
}

fn cmd_summarize(config: &Config, store: &Store, from: NaiveDate, to: NaiveDate) -> Result<Outcome> {
    let records: Vec<PaperRecord> = store.read_range(Dataset::Papers, &from.to_string(), &to.to_string())?;
    let provider = build_provider(config)?;
    let summarizer = Summarizer::new(store, provider.as_ref()).with_options(SummarizeOptions {
        concurrency: config.concurrency,
        ..SummarizeOptions::default()
    });
    let mut report = summarizer.summarize_batch(&records)?;
    report.warnings.extend(store.warnings());
    Ok(Outcome {
        code: if report.failed > 0 { 1 } else { 0 },
        output: serde_json::to_value(&report)?,
    })
}

fn narrator(config: &Config) -> Result<Option<Box<dyn Provider>>> {
    if config.narrative {
        build_provider(config).map(Some)
    } else {
        Ok(None)
    }
}

fn cmd_daily(config: &Config, store: &Store, date: NaiveDate) -> Result<Outcome> {
    let key = date.to_string();
    let records: Vec<PaperRecord> = store.read_partition(Dataset::Papers, &key)?;
    let summaries: Vec<StructuredSummary> = store.read_partition(Dataset::Summaries, &key)?;
    let narrator = narrator(config)?;
    let rendered = render_daily(date, &records, &summaries, narrator.as_deref());
    store.write_partition(Dataset::DailyTrending, &key, std::slice::from_ref(&rendered.report))?;
    let paths = rendered.emit(&config.data_dir, ReportKind::Daily, &key)?;
    Ok(Outcome::ok(json!({
        "date": key,
        "papers": records.len(),
        "trending_summary": rendered.report.trending_summary,
        "files": paths_json(&paths),
        "warnings": rendered.warnings,
    })))
}

fn cmd_monthly(config: &Config, store: &Store, month: YearMonth) -> Result<Outcome> {
    let inventory = collect_labels(month, store)?;
    let aliases = config.alias_table.as_deref().map(AliasTable::load).transpose()?;
    let provider = build_provider(config)?;
    let consolidation = consolidate_month(&inventory, Some(provider.as_ref()), aliases.as_ref(), DEFAULT_TARGET_CLUSTERS)?;

    let first = month.first_day().to_string();
    let last = month.last_day().to_string();
    let records: Vec<PaperRecord> = store.read_range(Dataset::Papers, &first, &last)?;
    let summaries: Vec<StructuredSummary> = store.read_range(Dataset::Summaries, &first, &last)?;
    let narrator = narrator(config)?;
    let rendered = render_monthly(month, &dedupe_month(&records), &summaries, Some(&consolidation), narrator.as_deref())?;
    let coverage = rendered.report.validate_coverage(inventory.counts.keys().map(String::as_str));
    if !coverage.is_ok() {
        return Err(Error::Validation(coverage.describe_hard()));
    }
    let key = month.to_string();
    store.write_partition(Dataset::MonthlyTrending, &key, std::slice::from_ref(&rendered.report))?;
    let paths = rendered.emit(&config.data_dir, ReportKind::Monthly, &key)?;
    let mut warnings = consolidation.warnings.clone();
    warnings.extend(rendered.warnings.iter().cloned());
    Ok(Outcome::ok(json!({
        "month": key,
        "path": consolidation.path,
        "clusters": consolidation.clusters.len(),
        "labels": inventory.counts.len(),
        "files": paths_json(&paths),
        "warnings": warnings,
    })))
}

fn cmd_lifecycle(config: &Config, store: &Store, window_end: YearMonth, min_papers: u64, raw_labels: bool) -> Result<Outcome> {
    let (raw, _) = raw_index(store)?;
    let mut warnings = Vec::new();
    let index = if raw_labels || config.raw_labels {
        raw
    } else {
        consolidated(store, &raw, &mut warnings)?
    };
    let snapshot: LifecycleSnapshot = build_snapshot(&index, window_end, min_papers)?;
    let rendered = render_lifecycle(&snapshot)?;
    store.write_partition(Dataset::Lifecycle, &snapshot.snapshot_id, std::slice::from_ref(&snapshot))?;
    let mut paths = rendered.emit(&config.data_dir, ReportKind::Lifecycle, &snapshot.snapshot_id)?;
    let truncated = index.truncated_to(window_end);
    for topic in snapshot.lifecycle_data.keys() {
        let traj = monthly_proportions(&truncated, topic)?;
        let name = format!("lifecycle-{}-{}", snapshot.snapshot_id, slug(topic));
        paths.push(emit_series(&config.data_dir, &name, &trajectory_series(&traj))?);
    }
    let phases: BTreeMap<String, String> = snapshot
        .lifecycle_data
        .iter()
        .map(|(t, e)| (t.clone(), e.phase.display_name().to_string()))
        .collect();
    Ok(Outcome::ok(json!({
        "snapshot_id": snapshot.snapshot_id,
        "topics": phases,
        "files": paths_json(&paths),
        "warnings": warnings,
    })))
}

fn cmd_stats(config: &Config, store: &Store, from: NaiveDate, to: NaiveDate, use_consolidated: bool) -> Result<Outcome> {
    let records: Vec<PaperRecord> = dedupe_month(&store.read_range(Dataset::Papers, &from.to_string(), &to.to_string())?);
    let summaries: Vec<StructuredSummary> = store.read_range(Dataset::Summaries, &from.to_string(), &to.to_string())?;
    let ups: Vec<i64> = records.iter().map(|r| r.upvotes).collect();
    let engagement = engagement_stats(&ups)?;
    let rhythm = weekday_weekend_means(&records, DateSpan::new(from, to))?;
    let raw = build_index(&summaries, &records)?;
    let mut warnings = Vec::new();
    let index = if use_consolidated {
        consolidated(store, &raw, &mut warnings)?
    } else {
        raw
    };
    let entropy = monthly_entropy(&index);
    let emergence = new_topic_counts(&index);
    let medians = topic_medians(&index);
    let velocity = velocity_summary(&index)?;
    let pairs = cooccurrence(&index, 20);

    let mut paths = Vec::new();
    let mut table = SeriesTable::new(["month", "entropy_bits", "new_topics"]);
    for m in index.months() {
        table.rows.push((
            m.to_string(),
            vec![entropy.get(&m).copied(), emergence.get(&m).map(|&c| c as f64)],
        ));
    }
    paths.push(emit_series(&config.data_dir, &format!("stats-{from}-{to}"), &table)?);
    let entropy_mean = if entropy.is_empty() {
        None
    } else {
        Some(entropy.values().sum::<f64>() / entropy.len() as f64)
    };
    Ok(Outcome::ok(json!({
        "papers": records.len(),
        "summarized": index.paper_count(),
        "engagement": engagement,
        "weekday_weekend": rhythm,
        "topic_median_of_medians": medians.median_of_medians,
        "distinct_topics": index.topics().count(),
        "entropy_mean_bits": entropy_mean,
        "velocity": {
            "eligible_topics": velocity.topics.len(),
            "median_time_to_peak": velocity.median_time_to_peak,
            "median_half_life": velocity.median_half_life,
            "censored": velocity.censored,
        },
        "cooccurrence": pairs,
        "files": paths_json(&paths),
        "warnings": warnings,
    })))
}

fn cmd_novelty(store: &Store, month: YearMonth, top: usize) -> Result<Outcome> {
    let (index, records) = raw_index(store)?;
    let scored = novelty_scores(&index, &NoveltyConfig::default())?;
    let titles: HashMap<&str, &str> = records.iter().map(|r| (r.paper_id.as_str(), r.title.as_str())).collect();
    let top_papers: Vec<Value> = scored
        .iter()
        .filter(|p| p.month == month)
        .take(top)
        .map(|p| {
            json!({
                "paper_id": p.paper_id,
                "title": titles.get(p.paper_id.as_str()),
                "score": p.score,
                "upvotes": p.upvotes,
                "topics": index.paper(&p.paper_id).map(|e| &e.topics),
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "month": month.to_string(),
        "scored_papers": scored.len(),
        "top": top_papers,
        "decile_effect": decile_effect(&scored),
    })))
}

fn dispatch(cli: &Cli, config: &Config) -> Result<Outcome> {
    let store = open_store(config);
    match &cli.command {
        Command::Ingest { date, from, to } => {
            let (a, b) = match (date, from, to) {
                (Some(d), _, _) => (*d, *d),
                (None, Some(a), Some(b)) => (*a, *b),
                _ => return Err(Error::Invalid("ingest needs --date or --from/--to".into())),
            };
            cmd_ingest(config, &store, a, b)
        }
        Command::Summarize { from, to, .. } => cmd_summarize(config, &store, *from, *to),
        Command::Daily { date } => cmd_daily(config, &store, *date),
        Command::Monthly { month } => cmd_monthly(config, &store, *month),
        Command::Lifecycle {
            window_end,
            min_papers,
            raw_labels,
        } => cmd_lifecycle(config, &store, *window_end, *min_papers, *raw_labels),
        Command::Stats { from, to, consolidated } => cmd_stats(config, &store, *from, *to, *consolidated),
        Command::Novelty { month, top } => cmd_novelty(&store, *month, *top),
    }
}

#[derive(Serialize)]
struct OplogLine<'a> {
    ts: String,
    command: &'a str,
    args: Vec<String>,
    exit_code: i32,
    duration_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn append_oplog(data_dir: &Path, line: &OplogLine<'_>) -> Result<()> {
    std::fs::create_dir_all(data_dir).map_err(|e| Error::io(data_dir, e))?;
    let path = data_dir.join("oplog.jsonl");
    let mut text = serde_json::to_string(line)?;
    text.push('\n');
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))
}

/// Runs one command with explicit environment and output streams. Returns the
/// process exit code: 0 success, 1 partial, 2 fault.
pub fn run_with<I, T>(args: I, env: &HashMap<String, String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let mut text = e.render().to_string();
            if e.use_stderr() {
                if !text.contains("Usage:") {
                    text.push_str(&format!("\n{}\n", Cli::command().render_usage()));
                }
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let config = match resolve_config(&cli, env) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let started = Instant::now();
    let result = dispatch(&cli, &config);
    let (code, error) = match result {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&outcome.output).unwrap_or_default());
            (outcome.code, None)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            (2, Some(e.to_string()))
        }
    };
    let line = OplogLine {
        ts: Utc::now().to_rfc3339(),
        command: cli.command.name(),
        args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        exit_code: code,
        duration_ms: started.elapsed().as_millis(),
        error,
    };
    if let Err(e) = append_oplog(&config.data_dir, &line) {
        let _ = writeln!(err, "warning: could not append to the operation log: {e}");
    }
    code
}

/// [`run_with`] against the process environment and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env: HashMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("PAPERBREW_")).collect();
    run_with(args, &env, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn precedence_flags_env_file_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("config"),
            "concurrency = 7\nprovider = \"mock\"\nfeed_url = \"http://file\"\nraw_labels = true\n",
        )
        .unwrap();
        let data = dir.path().to_str().unwrap();
        let env = HashMap::from([
            ("PAPERBREW_DATA_DIR".to_string(), data.to_string()),
            ("PAPERBREW_FEED_URL".to_string(), "http://env".to_string()),
        ]);
        let c = resolve_config(&parse(&["paperbrew", "daily", "--date", "2026-03-02"]), &env).unwrap();
        assert_eq!(c.data_dir, dir.path());
        assert_eq!(c.feed_url, "http://env");
        assert_eq!(c.concurrency, 7);
        assert!(c.raw_labels);
        let c = resolve_config(&parse(&["paperbrew", "--concurrency", "2", "daily", "--date", "2026-03-02"]), &env).unwrap();
        assert_eq!(c.concurrency, 2);

        let c = resolve_config(&parse(&["paperbrew", "daily", "--date", "2026-03-02"]), &HashMap::new()).unwrap();
        assert_eq!(c.data_dir, PathBuf::from(DEFAULT_DATA_DIR));
        assert_eq!(c.feed_url, DEFAULT_FEED_URL);
        assert_eq!(c.provider, ProviderKind::Mock);
    }

    #[test]
    fn live_requires_key() {
        let env = HashMap::from([("PAPERBREW_PROVIDER".to_string(), "live".to_string())]);
        let cli = parse(&["paperbrew", "daily", "--date", "2026-03-02"]);
        assert!(matches!(resolve_config(&cli, &env), Err(Error::Config(_))));
        let mut env = env;
        env.insert("PAPERBREW_PROVIDER_KEY".into(), "k".into());
        assert!(resolve_config(&cli, &env).is_ok());
    }

    #[test]
    fn bad_arguments_exit_2_with_usage() {
        let dir = tempfile::tempdir().unwrap();
        let env = HashMap::from([("PAPERBREW_DATA_DIR".to_string(), dir.path().display().to_string())]);
        for args in [
            vec!["paperbrew", "daily", "--date", "2026-13-01"],
            vec!["paperbrew", "lifecycle", "--window-end", "2026-3"],
            vec!["paperbrew", "summarize", "--from", "2026-03-01", "--to", "2026-03-02", "--bogus"],
            vec!["paperbrew", "ingest"],
        ] {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            assert_eq!(run_with(&args, &env, &mut out, &mut err), 2, "{args:?}");
            let err = String::from_utf8(err).unwrap();
            assert!(err.contains("Usage"), "{err}");
        }
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Vision-Language Models (VLMs)"), "vision-language-models-vlms");
    }
}
