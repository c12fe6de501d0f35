//! Monthly topic consolidation: collapse a month's open-vocabulary labels into
//! a few dozen named clusters with an explicit mapping back to the originals.
//!
//! Two paths produce the same [`Consolidation`] shape:
//! - provider: the model proposes clusters; the result is checked to be a
//!   partition of the inventory and repaired, or abandoned for the fallback.
//! - fallback: lexical grouping by case-insensitive equality after alias
//!   substitution. Deterministic and order-independent.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::datamodel::{rank_counts, MonthlyTrendReport, RankedCount, StructuredSummary};
use crate::error::{Error, Result};
use crate::month::YearMonth;
use crate::provider::{
    ConsolidationContext, Provider, ProviderRequest, RequestKind, ResponseSchema, SchemaField, ValueKind,
};
use crate::store::{Dataset, Store};
use crate::summarize::extract_json_object;
use crate::text::collapse_whitespace;

pub const DEFAULT_TARGET_CLUSTERS: usize = 20;
pub const CATCH_ALL: &str = "Other";

/// Exact-match label substitutions, loaded from `original<TAB>canonical` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    map: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, original: impl AsRef<str>, canonical: impl AsRef<str>) {
        self.map.insert(
            collapse_whitespace(original.as_ref()),
            collapse_whitespace(canonical.as_ref()),
        );
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.map.get(label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (orig, canon) = line
                .split_once('\t')
                .ok_or_else(|| Error::Invalid(format!("alias table line {}: expected a TAB", n + 1)))?;
            if orig.trim().is_empty() || canon.trim().is_empty() {
                return Err(Error::Invalid(format!("alias table line {}: empty side", n + 1)));
            }
            table.insert(orig, canon);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Trim, collapse internal whitespace, then apply an exact alias match.
/// Casing is preserved.
pub fn normalize_label(label: &str, aliases: Option<&AliasTable>) -> String {
    let clean = collapse_whitespace(label);
    match aliases.and_then(|a| a.get(&clean)) {
        Some(canonical) => canonical.to_string(),
        None => clean,
    }
}

/// A month's raw labels with per-paper occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelInventory {
    pub month: YearMonth,
    pub counts: BTreeMap<String, u64>,
}

impl LabelInventory {
    /// Counts each whitespace-normalized label once per summary.
    pub fn from_summaries<'a>(month: YearMonth, summaries: impl IntoIterator<Item = &'a StructuredSummary>) -> Self {
        let mut counts = BTreeMap::new();
        for s in summaries {
            let labels: BTreeSet<String> = s
                .topics
                .iter()
                .map(|t| normalize_label(t, None))
                .filter(|t| !t.is_empty())
                .collect();
            for l in labels {
                *counts.entry(l).or_default() += 1;
            }
        }
        Self { month, counts }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Reads the month's summary partitions and counts their labels.
pub fn collect_labels(month: YearMonth, store: &Store) -> Result<LabelInventory> {
    let summaries: Vec<StructuredSummary> = store.read_range(
        Dataset::Summaries,
        &month.first_day().to_string(),
        &month.last_day().to_string(),
    )?;
    Ok(LabelInventory::from_summaries(month, &summaries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsolidationPath {
    Provider,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub name: String,
    /// Original inventory labels, sorted.
    pub members: Vec<String>,
    /// Sum of the members' inventory counts.
    pub label_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consolidation {
    pub month: YearMonth,
    pub path: ConsolidationPath,
    /// Ordered by label_count descending, then name.
    pub clusters: Vec<Cluster>,
    pub warnings: Vec<String>,
}

impl Consolidation {
    pub fn topic_mapping(&self) -> BTreeMap<String, Vec<String>> {
        self.clusters
            .iter()
            .map(|c| (c.name.clone(), c.members.clone()))
            .collect()
    }

    /// Original label -> cluster name.
    pub fn label_to_cluster(&self) -> BTreeMap<String, String> {
        self.clusters
            .iter()
            .flat_map(|c| c.members.iter().map(move |m| (m.clone(), c.name.clone())))
            .collect()
    }

    /// Cluster names with their attributed label counts.
    pub fn top_topics(&self) -> Vec<RankedCount> {
        rank_counts(self.clusters.iter().map(|c| (c.name.clone(), c.label_count)))
    }

    /// Recovers a consolidation from a stored monthly report.
    pub fn from_report(report: &MonthlyTrendReport) -> Self {
        let clusters = report
            .topic_mapping
            .iter()
            .map(|(name, members)| Cluster {
                name: name.clone(),
                members: members.clone(),
                label_count: report
                    .top_topics
                    .iter()
                    .find(|t| &t.label == name)
                    .map_or(0, |t| t.count),
            })
            .collect();
        Self {
            month: report.month,
            path: ConsolidationPath::Provider,
            clusters,
            warnings: Vec::new(),
        }
    }
}

fn finish(month: YearMonth, path: ConsolidationPath, groups: BTreeMap<String, BTreeSet<String>>, inventory: &LabelInventory, warnings: Vec<String>) -> Consolidation {
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|(name, members)| {
            let label_count = members.iter().map(|m| inventory.counts[m]).sum();
            Cluster {
                name,
                members: members.into_iter().collect(),
                label_count,
            }
        })
        .collect();
    clusters.sort_by(|a, b| b.label_count.cmp(&a.label_count).then_with(|| a.name.cmp(&b.name)));
    Consolidation {
        month,
        path,
        clusters,
        warnings,
    }
}

/// Lexical clustering: labels whose alias-substituted forms match
/// case-insensitively share a cluster, named after the canonical form of the
/// highest-count member (ties: lexicographically smallest).
pub fn consolidate_fallback(inventory: &LabelInventory, aliases: Option<&AliasTable>) -> Consolidation {
    let mut by_key: BTreeMap<String, Vec<(&String, u64)>> = BTreeMap::new();
    for (label, &count) in &inventory.counts {
        let key = normalize_label(label, aliases).to_lowercase();
        by_key.entry(key).or_default().push((label, count));
    }
    let mut groups: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for members in by_key.into_values() {
        let (head, _) = members
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
            .expect("non-empty group");
        let name = normalize_label(head, aliases);
        groups
            .entry(name)
            .or_default()
            .extend(members.iter().map(|(l, _)| (*l).clone()));
    }
    finish(inventory.month, ConsolidationPath::Fallback, groups, inventory, Vec::new())
}

fn consolidation_schema() -> ResponseSchema {
    ResponseSchema {
        fields: vec![SchemaField {
            name: "clusters".into(),
            kind: ValueKind::TextList,
            arity: None,
        }],
    }
}

fn consolidation_request(inventory: &LabelInventory, target: usize, problem: Option<&str>) -> Result<ProviderRequest> {
    let context = ConsolidationContext {
        month: inventory.month.to_string(),
        target_clusters: target,
        labels: inventory.counts.clone(),
    };
    let mut instruction = format!(
        "Group these research topic labels into about {target} coherent clusters. Merge labels that name the \
same research area even when worded differently. Every input label must appear in exactly one cluster. Return \
JSON only: {{\"clusters\": [{{\"name\": \"cluster name\", \"labels\": [\"original label\", ...]}}]}}."
    );
    if let Some(p) = problem {
        instruction.push_str("\n\nYour previous answer was not a valid partition: ");
        instruction.push_str(p);
        instruction.push_str(". Return only valid JSON matching the schema.");
    }
    Ok(ProviderRequest {
        kind: if problem.is_some() { RequestKind::Repair } else { RequestKind::Consolidate },
        subject: inventory.month.to_string(),
        instruction,
        title: format!("Topic labels for {}", inventory.month),
        abstract_text: String::new(),
        context: Some(serde_json::to_string(&context)?),
        document: None,
        schema: consolidation_schema(),
    })
}

/// Outcome of checking a proposed clustering against the inventory.
struct Proposal {
    groups: BTreeMap<String, BTreeSet<String>>,
    missing: Vec<String>,
    double: Vec<String>,
    unknown: Vec<String>,
}

fn parse_proposal(raw: &str, inventory: &LabelInventory) -> std::result::Result<Proposal, String> {
    let obj = extract_json_object(raw).ok_or("no JSON object in response")?;
    let clusters = obj
        .get("clusters")
        .and_then(Value::as_array)
        .ok_or("missing clusters array")?;
    let mut groups: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut owner: BTreeMap<String, String> = BTreeMap::new();
    let mut double = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    for c in clusters {
        let name = c
            .get("name")
            .and_then(Value::as_str)
            .map(collapse_whitespace)
            .filter(|n| !n.is_empty())
            .ok_or("cluster without a name")?;
        let labels = c.get("labels").and_then(Value::as_array).ok_or("cluster without labels")?;
        for l in labels {
            let l = l.as_str().map(collapse_whitespace).ok_or("non-string label")?;
            if !inventory.counts.contains_key(&l) {
                unknown.insert(l);
                continue;
            }
            match owner.get(&l) {
                Some(prev) if prev != &name => {
                    double.insert(l.clone());
                }
                Some(_) => {}
                None => {
                    owner.insert(l.clone(), name.clone());
                    groups.entry(name.clone()).or_default().insert(l);
                }
            }
        }
    }
    let missing = inventory
        .counts
        .keys()
        .filter(|l| !owner.contains_key(*l))
        .cloned()
        .collect();
    Ok(Proposal {
        groups,
        missing,
        double: double.into_iter().collect(),
        unknown: unknown.into_iter().collect(),
    })
}

fn describe(p: &Proposal) -> String {
    let mut parts = Vec::new();
    if !p.missing.is_empty() {
        parts.push(format!("labels not assigned: {:?}", p.missing));
    }
    if !p.double.is_empty() {
        parts.push(format!("labels assigned twice: {:?}", p.double));
    }
    parts.join("; ")
}

/// Provider-assisted consolidation.
///
/// The first answer is accepted if it is a partition. Otherwise the model gets
/// one repair round. After that, labels still unassigned go to the catch-all
/// [`CATCH_ALL`] cluster; a double assignment or an unparseable answer falls
/// back to [`consolidate_fallback`] with a warning. Labels the model invents are
/// ignored.
pub fn consolidate_with_provider(
    inventory: &LabelInventory,
    provider: &dyn Provider,
    aliases: Option<&AliasTable>,
    target_clusters: usize,
) -> Result<Consolidation> {
    if inventory.is_empty() {
        return Err(Error::Precondition(format!("{}: empty label inventory", inventory.month)));
    }
    let mut warnings = Vec::new();
    let mut problem: Option<String> = None;
    for round in 0..2 {
        let request = consolidation_request(inventory, target_clusters, problem.as_deref())?;
        let proposal = provider
            .complete(&request)
            .map_err(|e| e.to_string())
            .and_then(|resp| parse_proposal(&resp.raw_text, inventory));
        let proposal = match proposal {
            Ok(p) => p,
            Err(e) => {
                problem = Some(e);
                continue;
            }
        };
        if !proposal.unknown.is_empty() {
            warnings.push(format!("ignored labels not in the inventory: {:?}", proposal.unknown));
        }
        let is_partition = proposal.missing.is_empty() && proposal.double.is_empty();
        if is_partition {
            return Ok(finish(inventory.month, ConsolidationPath::Provider, proposal.groups, inventory, warnings));
        }
        if round == 0 {
            problem = Some(describe(&proposal));
            continue;
        }
        if proposal.double.is_empty() {
            let mut groups = proposal.groups;
            warnings.push(format!(
                "{} label(s) left unassigned after repair; placed in {CATCH_ALL:?}",
                proposal.missing.len()
            ));
            groups.entry(CATCH_ALL.to_string()).or_default().extend(proposal.missing);
            return Ok(finish(inventory.month, ConsolidationPath::Provider, groups, inventory, warnings));
        }
        problem = Some(describe(&proposal));
    }
    let reason = problem.unwrap_or_default();
    tracing::warn!("{}: provider consolidation unusable ({reason}); using lexical fallback", inventory.month);
    let mut fallback = consolidate_fallback(inventory, aliases);
    warnings.push(format!("provider consolidation failed after repair ({reason}); lexical fallback used"));
    fallback.warnings = warnings;
    Ok(fallback)
}

/// Dispatches on whether a provider is available.
pub fn consolidate_month(
    inventory: &LabelInventory,
    provider: Option<&dyn Provider>,
    aliases: Option<&AliasTable>,
    target_clusters: usize,
) -> Result<Consolidation> {
    if inventory.is_empty() {
        return Err(Error::Precondition(format!("{}: empty label inventory", inventory.month)));
    }
    match provider {
        Some(p) => consolidate_with_provider(inventory, p, aliases, target_clusters),
        None => Ok(consolidate_fallback(inventory, aliases)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::{MockProvider, ScriptedProvider};

    fn inv(pairs: &[(&str, u64)]) -> LabelInventory {
        LabelInventory {
            month: "2026-03".parse().unwrap(),
            counts: pairs.iter().map(|(l, c)| (l.to_string(), *c)).collect(),
        }
    }

    fn summary(topics: &[&str]) -> StructuredSummary {
        StructuredSummary {
            paper_id: "2603.00001".into(),
            concise_summary: String::new(),
            detailed_analysis: String::new(),
            topics: topics.iter().map(|s| s.to_string()).collect(),
            keywords: vec![],
            concise_summary_zh: String::new(),
            detailed_analysis_zh: String::new(),
            topics_zh: vec![],
            keywords_zh: vec![],
            provider_id: String::new(),
            extracted_at: chrono::DateTime::from_timestamp(0, 0).unwrap(),
        }
    }

    #[test]
    fn label_normalization() {
        assert_eq!(normalize_label("  Diffusion   Models ", None), "Diffusion Models");
        let mut aliases = AliasTable::new();
        aliases.insert("VLMs", "Vision-Language Models (VLMs)");
        assert_eq!(normalize_label("VLMs", Some(&aliases)), "Vision-Language Models (VLMs)");
        assert_eq!(normalize_label("LLMs", Some(&aliases)), "LLMs");
    }

    #[test]
    fn alias_file_format() {
        let t = AliasTable::parse("# comment\nVLMs\tVision-Language Models (VLMs)\n\nllms\tLLMs\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("llms"), Some("LLMs"));
        assert!(AliasTable::parse("no tab here").is_err());
    }

    #[test]
    fn collect_counts_once_per_paper() {
        let m = "2026-03".parse().unwrap();
        let i = LabelInventory::from_summaries(m, &[summary(&["A", "B"]), summary(&["B", "C"])]);
        assert_eq!(i.counts, inv(&[("A", 1), ("B", 2), ("C", 1)]).counts);

        let i = LabelInventory::from_summaries(m, &[summary(&["LLMs", "LLMs "])]);
        assert_eq!(i.counts, inv(&[("LLMs", 1)]).counts);

        assert!(LabelInventory::from_summaries(m, &[]).is_empty());
    }

    #[test]
    fn fallback_merges_case_and_alias() {
        let mut aliases = AliasTable::new();
        aliases.insert("llms", "LLMs");
        let c = consolidate_fallback(&inv(&[("LLMs", 3), ("llms", 2), ("Diffusion", 1)]), Some(&aliases));
        assert_eq!(c.clusters.len(), 2);
        assert_eq!(c.clusters[0].name, "LLMs");
        assert_eq!(c.clusters[0].label_count, 5);
        assert_eq!(c.clusters[0].members, ["LLMs", "llms"]);
        assert_eq!(c.path, ConsolidationPath::Fallback);
    }

    #[test]
    fn single_label_maps_to_itself() {
        let c = consolidate_month(&inv(&[("World Models", 4)]), None, None, 20).unwrap();
        assert_eq!(c.topic_mapping(), BTreeMap::from([("World Models".to_string(), vec!["World Models".to_string()])]));
    }

    #[test]
    fn empty_inventory_is_precondition_error() {
        assert!(consolidate_month(&inv(&[]), None, None, 20).is_err());
    }

    #[test]
    fn provider_semantic_merge() {
        let provider = ScriptedProvider::new([r#"{"clusters":[{"name":"VLMs","labels":["Multimodal LLMs","Vision-Language Models (VLMs)"]}]}"#]);
        let i = inv(&[("Multimodal LLMs", 5), ("Vision-Language Models (VLMs)", 7)]);
        let c = consolidate_month(&i, Some(&provider), None, 20).unwrap();
        assert_eq!(c.path, ConsolidationPath::Provider);
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.clusters[0].name, "VLMs");
        assert_eq!(c.clusters[0].label_count, 12);
        assert_eq!(provider.calls(), 1);
    }

    #[test]
    fn provider_omission_repaired_then_catch_all() {
        let provider = ScriptedProvider::new([r#"{"clusters":[{"name":"X","labels":["A","Invented"]}]}"#]);
        let c = consolidate_month(&inv(&[("A", 1), ("B", 2)]), Some(&provider), None, 20).unwrap();
        assert_eq!(provider.calls(), 2);
        assert_eq!(provider.requests()[1].kind, RequestKind::Repair);
        assert_eq!(c.path, ConsolidationPath::Provider);
        let mapping = c.topic_mapping();
        assert_eq!(mapping["Other"], ["B"]);
        assert_eq!(mapping["X"], ["A"]);
        assert!(c.warnings.iter().any(|w| w.contains("Invented")));
    }

    #[test]
    fn provider_double_assignment_falls_back() {
        let bad = r#"{"clusters":[{"name":"X","labels":["A","B"]},{"name":"Y","labels":["B"]}]}"#;
        let provider = ScriptedProvider::new([bad]);
        let c = consolidate_month(&inv(&[("A", 1), ("B", 2)]), Some(&provider), None, 20).unwrap();
        assert_eq!(c.path, ConsolidationPath::Fallback);
        assert_eq!(provider.calls(), 2);
        assert!(!c.warnings.is_empty());
    }

    #[test]
    fn provider_repair_round_can_succeed() {
        let provider = ScriptedProvider::new([
            "garbage",
            r#"{"clusters":[{"name":"All","labels":["A","B"]}]}"#,
        ]);
        let c = consolidate_month(&inv(&[("A", 1), ("B", 2)]), Some(&provider), None, 20).unwrap();
        assert_eq!(c.path, ConsolidationPath::Provider);
        assert_eq!(c.clusters[0].members, ["A", "B"]);
    }

    #[test]
    fn mock_provider_path_is_partition() {
        let i = inv(&[("LLMs", 3), ("llms", 2), ("Diffusion", 1)]);
        let c = consolidate_month(&i, Some(&MockProvider), None, 20).unwrap();
        assert_eq!(c.path, ConsolidationPath::Provider);
        assert_eq!(c.clusters.len(), 2);
    }
}
