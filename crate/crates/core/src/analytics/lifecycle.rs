//! Hype-cycle indicators, the five-phase classifier and topic velocity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::index::{monthly_proportions, CorpusIndex};
use super::trend::{ols_slope, SLOPE_WINDOW};
use crate::datamodel::{LifecycleEntry, LifecycleSnapshot, Phase, TopicTrajectory};
use crate::error::{Error, Result};
use crate::month::YearMonth;

/// Topics need at least this many papers to be classified.
pub const MIN_PAPERS: u64 = 15;
/// Velocity additionally needs this many months with a nonzero count.
pub const MIN_ACTIVE_MONTHS: u32 = 4;
/// Months averaged for the current level.
pub const CURRENT_MONTHS: i64 = 3;
/// Months counted toward the recent fraction.
pub const RECENT_MONTHS: i64 = 8;

const TRIGGER_MAX_AGE: i64 = 8;
const TRIGGER_RECENT_FRACTION: f64 = 0.60;
const TRIGGER_MAX_PAPERS: u64 = 200;
const PEAK_DECLINE: f64 = 0.70;
const PEAK_RECENCY_MONTHS: i64 = 6;
const RISING_SLOPE: f64 = 0.001;
const RISING_DECLINE: f64 = 0.65;
const LOW_DECLINE: f64 = 0.65;
const FLAT_SLOPE: f64 = 0.0003;
const FALLING_SLOPE: f64 = -0.001;
const FALLING_DECLINE: f64 = 0.75;

/// Indicators for one topic, before classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleIndicators {
    pub peak_proportion: f64,
    pub peak_month: YearMonth,
    pub current_level: f64,
    pub decline_ratio: f64,
    pub trend_slope: f64,
    pub recent_fraction: f64,
    pub total_count: u64,
    pub active_months: u32,
    pub first_month: YearMonth,
}

impl LifecycleIndicators {
    pub fn into_entry(self, phase: Phase) -> LifecycleEntry {
        LifecycleEntry {
            phase,
            peak_proportion: self.peak_proportion,
            peak_month: self.peak_month,
            current_level: self.current_level,
            decline_ratio: self.decline_ratio,
            trend_slope: self.trend_slope,
            recent_fraction: self.recent_fraction,
            total_count: self.total_count,
            active_months: self.active_months,
            first_month: self.first_month,
        }
    }
}

/// Computes p*, p̄_cur, δ, β and ρ over the trajectory up to `window_end`.
///
/// Months between the trajectory end and `window_end` read as p = 0. The
/// current level averages the last three calendar months of the window (fewer
/// if the window is shorter), β is the OLS slope over the last six, and ρ is
/// the share of `total_count` falling in the last eight.
pub fn lifecycle_indicators(trajectory: &TopicTrajectory, window_end: YearMonth, total_count: u64) -> LifecycleIndicators {
    let start = trajectory.first_month;
    let months: Vec<YearMonth> = YearMonth::range(start, window_end).collect();
    let p: Vec<f64> = months.iter().map(|m| trajectory.proportion(*m)).collect();

    let mut peak_idx = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[peak_idx] {
            peak_idx = i;
        }
    }
    let peak_proportion = p.get(peak_idx).copied().unwrap_or(0.0);
    let peak_month = months.get(peak_idx).copied().unwrap_or(start);

    let cur = &p[p.len().saturating_sub(CURRENT_MONTHS as usize)..];
    let current_level = if cur.is_empty() {
        0.0
    } else {
        cur.iter().sum::<f64>() / cur.len() as f64
    };
    let decline_ratio = if peak_proportion > 0.0 {
        current_level / peak_proportion
    } else {
        0.0
    };

    let recent_start = window_end.offset(-(RECENT_MONTHS - 1));
    let recent: u64 = months
        .iter()
        .filter(|m| **m >= recent_start)
        .map(|m| trajectory.count(*m))
        .sum();
    let recent_fraction = if total_count == 0 {
        0.0
    } else {
        (recent as f64 / total_count as f64).min(1.0)
    };

    let has_counts = trajectory.counts.iter().any(|&c| c > 0);
    let active_months = months
        .iter()
        .zip(&p)
        .filter(|(m, &pv)| if has_counts { trajectory.count(**m) > 0 } else { pv > 0.0 })
        .count() as u32;

    LifecycleIndicators {
        peak_proportion,
        peak_month,
        current_level,
        decline_ratio,
        trend_slope: ols_slope(&p, SLOPE_WINDOW),
        recent_fraction,
        total_count,
        active_months,
        first_month: trajectory.first_appearance(),
    }
}

/// First matching rule wins, in this order:
/// 1. Innovation Trigger: first seen ≤ 8 months before `window_end`, or ρ > 0.60 with < 200 papers.
/// 2. Peak: δ > 0.70 with the peak in the last 6 months, or β > 0.001 with δ > 0.65.
/// 3. Trough: δ < 0.65 with β ≤ 0.0003, or β < −0.001 with δ < 0.75.
/// 4. Slope: δ < 0.65 with β > 0.0003.
/// 5. Plateau otherwise.
pub fn classify_phase(ind: &LifecycleIndicators, window_end: YearMonth) -> Phase {
    let age = window_end.months_since(ind.first_month);
    let (delta, beta) = (ind.decline_ratio, ind.trend_slope);
    let recent_peak = ind.peak_month >= window_end.offset(-(PEAK_RECENCY_MONTHS - 1));

    if age <= TRIGGER_MAX_AGE || (ind.recent_fraction > TRIGGER_RECENT_FRACTION && ind.total_count < TRIGGER_MAX_PAPERS) {
        Phase::InnovationTrigger
    } else if (delta > PEAK_DECLINE && recent_peak) || (beta > RISING_SLOPE && delta > RISING_DECLINE) {
        Phase::Peak
    } else if (delta < LOW_DECLINE && beta <= FLAT_SLOPE) || (beta < FALLING_SLOPE && delta < FALLING_DECLINE) {
        Phase::Trough
    } else if delta < LOW_DECLINE && beta > FLAT_SLOPE {
        Phase::Slope
    } else {
        Phase::Plateau
    }
}

/// Classifies every topic with at least `min_papers` papers published up to
/// `window_end`. The snapshot id is the window-end month label.
pub fn build_snapshot(index: &CorpusIndex, window_end: YearMonth, min_papers: u64) -> Result<LifecycleSnapshot> {
    let idx = index.truncated_to(window_end);
    let (first, _) = idx
        .span()
        .ok_or_else(|| Error::Precondition(format!("no papers on or before {window_end}")))?;
    let sorted_months: Vec<YearMonth> = YearMonth::range(first, window_end).collect();
    let total_by_month: BTreeMap<YearMonth, u64> =
        sorted_months.iter().map(|m| (*m, idx.assignments(*m))).collect();

    let mut lifecycle_data = BTreeMap::new();
    let mut topics_by_month = BTreeMap::new();
    for topic in idx.topics() {
        let total = idx.topic_count(topic);
        if total < min_papers {
            continue;
        }
        let traj = monthly_proportions(&idx, topic)?;
        let ind = lifecycle_indicators(&traj, window_end, total);
        let phase = classify_phase(&ind, window_end);
        lifecycle_data.insert(topic.to_string(), ind.into_entry(phase));
        topics_by_month.insert(topic.to_string(), idx.topic_counts_by_month(topic));
    }
    Ok(LifecycleSnapshot {
        snapshot_id: window_end.to_string(),
        lifecycle_data,
        n_months: sorted_months.len() as u64,
        sorted_months,
        topics_by_month,
        total_by_month,
        n_papers: idx.paper_count() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfLife {
    Months(u32),
    /// Never fell to half the peak within the data window.
    Censored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicVelocity {
    pub topic: String,
    pub time_to_peak: u32,
    pub half_life: HalfLife,
}

/// Time to peak and half-life for an eligible topic (≥ 15 papers and ≥ 4
/// active months); `None` otherwise. Months after the trajectory's last month
/// are outside the window, so a topic still at its peak there is censored.
pub fn topic_velocity(trajectory: &TopicTrajectory, total_count: u64, active_months: u32) -> Option<TopicVelocity> {
    if total_count < MIN_PAPERS || active_months < MIN_ACTIVE_MONTHS || trajectory.is_empty() {
        return None;
    }
    let p = &trajectory.proportions;
    let mut peak = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[peak] {
            peak = i;
        }
    }
    let first = trajectory.first_appearance();
    let time_to_peak = trajectory.month_at(peak).months_since(first).max(0) as u32;
    let threshold = 0.5 * p[peak];
    let half_life = (peak + 1..p.len())
        .find(|&j| p[j] <= threshold)
        .map_or(HalfLife::Censored, |j| HalfLife::Months((j - peak) as u32));
    Some(TopicVelocity {
        topic: trajectory.label.clone(),
        time_to_peak,
        half_life,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySummary {
    pub topics: Vec<TopicVelocity>,
    pub median_time_to_peak: Option<f64>,
    /// Over uncensored topics only.
    pub median_half_life: Option<f64>,
    pub censored: usize,
}

/// Conventional median (mean of the two middle values for even counts).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Velocity for every eligible topic in the index.
pub fn velocity_summary(index: &CorpusIndex) -> Result<VelocitySummary> {
    let mut topics = Vec::new();
    for topic in index.topics() {
        let traj = monthly_proportions(index, topic)?;
        let active = traj.counts.iter().filter(|&&c| c > 0).count() as u32;
        if let Some(v) = topic_velocity(&traj, index.topic_count(topic), active) {
            topics.push(v);
        }
    }
    let ttp: Vec<f64> = topics.iter().map(|v| v.time_to_peak as f64).collect();
    let hl: Vec<f64> = topics
        .iter()
        .filter_map(|v| match v.half_life {
            HalfLife::Months(m) => Some(m as f64),
            HalfLife::Censored => None,
        })
        .collect();
    Ok(VelocitySummary {
        median_time_to_peak: median(&ttp),
        median_half_life: median(&hl),
        censored: topics.len() - hl.len(),
        topics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::Validate;

    fn ym(s: &str) -> YearMonth {
        s.parse().unwrap()
    }

    fn traj(start: &str, p: &[f64]) -> TopicTrajectory {
        TopicTrajectory::from_proportions("T", ym(start), p)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn indicators_on_falling_fixture() {
        let t = traj("2025-01", &[0.10, 0.20, 0.05, 0.05, 0.05]);
        let ind = lifecycle_indicators(&t, ym("2025-05"), 30);
        assert!(close(ind.peak_proportion, 0.20));
        assert_eq!(ind.peak_month, ym("2025-02"));
        assert!(close(ind.current_level, 0.05));
        assert!(close(ind.decline_ratio, 0.25));
    }

    #[test]
    fn indicators_on_rising_fixture() {
        let t = traj("2025-01", &[0.1, 0.2, 0.3]);
        let ind = lifecycle_indicators(&t, ym("2025-03"), 30);
        assert!(close(ind.peak_proportion, 0.3));
        assert!(close(ind.current_level, 0.2));
        assert!(close(ind.decline_ratio, 2.0 / 3.0));
        assert!(close(ind.trend_slope, 0.1));
    }

    #[test]
    fn indicators_all_zero() {
        let t = traj("2025-01", &[0.0; 6]);
        let ind = lifecycle_indicators(&t, ym("2025-06"), 0);
        assert_eq!((ind.peak_proportion, ind.decline_ratio, ind.trend_slope), (0.0, 0.0, 0.0));
    }

    #[test]
    fn window_extends_past_trajectory_with_zeros() {
        let t = traj("2025-01", &[0.2, 0.2]);
        let ind = lifecycle_indicators(&t, ym("2025-04"), 20);
        // last three months: 0.2, 0, 0
        assert!(close(ind.current_level, 0.2 / 3.0));
    }

    #[test]
    fn recent_fraction_counts_last_eight_months() {
        let first = ym("2024-01");
        let counts: Vec<u64> = vec![1; 12];
        let totals = vec![10; 12];
        let t = TopicTrajectory::from_counts("T", first, counts, &totals);
        let ind = lifecycle_indicators(&t, ym("2024-12"), 12);
        assert!(close(ind.recent_fraction, 8.0 / 12.0));
        assert_eq!(ind.active_months, 12);
    }

    fn ind(first: &str, peak: &str, delta: f64, beta: f64, rho: f64, total: u64) -> LifecycleIndicators {
        LifecycleIndicators {
            peak_proportion: 0.1,
            peak_month: ym(peak),
            current_level: 0.1 * delta,
            decline_ratio: delta,
            trend_slope: beta,
            recent_fraction: rho,
            total_count: total,
            active_months: 10,
            first_month: ym(first),
        }
    }

    #[test]
    fn cascade_rules() {
        let end = ym("2026-03");
        // recent debut wins regardless of the other indicators
        assert_eq!(classify_phase(&ind("2025-10", "2025-11", 0.1, -0.01, 0.1, 30), end), Phase::InnovationTrigger);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.1, 0.0, 0.61, 199), end), Phase::InnovationTrigger);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.1, 0.0, 0.61, 200), end), Phase::Trough);
        assert_eq!(classify_phase(&ind("2024-01", "2025-10", 0.71, 0.0, 0.3, 300), end), Phase::Peak);
        assert_eq!(classify_phase(&ind("2024-01", "2025-09", 0.71, 0.0, 0.3, 300), end), Phase::Plateau);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.66, 0.0011, 0.3, 300), end), Phase::Peak);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.70, -0.002, 0.3, 300), end), Phase::Trough);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.50, 0.0010, 0.3, 300), end), Phase::Slope);
        assert_eq!(classify_phase(&ind("2024-01", "2024-06", 0.50, 0.0003, 0.3, 300), end), Phase::Trough);
    }

    #[test]
    fn velocity_examples() {
        let v = topic_velocity(&traj("2025-01", &[0.1, 0.3, 0.1]), 15, 4).unwrap();
        assert_eq!(v.time_to_peak, 1);
        assert_eq!(v.half_life, HalfLife::Months(1));

        let v = topic_velocity(&traj("2025-01", &[0.1, 0.2, 0.3, 0.4]), 15, 4).unwrap();
        assert_eq!(v.half_life, HalfLife::Censored);

        let v = topic_velocity(&traj("2025-01", &[0.5, 0.3, 0.2]), 15, 4).unwrap();
        assert_eq!(v.time_to_peak, 0);
        assert_eq!(v.half_life, HalfLife::Months(2));

        assert!(topic_velocity(&traj("2025-01", &[0.1, 0.3, 0.1]), 14, 4).is_none());
        assert!(topic_velocity(&traj("2025-01", &[0.1, 0.3, 0.1]), 15, 3).is_none());
    }

    #[test]
    fn time_to_peak_measured_from_first_appearance() {
        let t = TopicTrajectory::from_counts("T", ym("2025-01"), vec![0, 0, 1, 3, 1], &[10; 5]);
        let v = topic_velocity(&t, 15, 4).unwrap();
        assert_eq!(v.time_to_peak, 1);
    }

    #[test]
    fn median_helper() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn snapshot_shape() {
        use super::super::index::{build_index, tests::{record, summary}};
        let mut summaries = Vec::new();
        let mut records = Vec::new();
        for i in 0..40 {
            let id = format!("p{i}");
            let month = 1 + (i % 4);
            let topics: &[&str] = if i % 2 == 0 { &["Big", "Small"] } else { &["Big"] };
            summaries.push(summary(&id, topics, &[]));
            records.push(record(&id, &format!("2025-{month:02}-10"), 1));
        }
        let idx = build_index(&summaries, &records).unwrap();
        let snap = build_snapshot(&idx, ym("2025-05"), 15).unwrap();
        assert!(snap.validate().is_ok(), "{:?}", snap.validate());
        assert_eq!(snap.n_months, 5);
        assert_eq!(snap.n_papers, 40);
        assert_eq!(snap.lifecycle_data.len(), 2);
        assert_eq!(snap.total_by_month[&ym("2025-05")], 0);

        let strict = build_snapshot(&idx, ym("2025-05"), 21).unwrap();
        assert_eq!(strict.lifecycle_data.keys().collect::<Vec<_>>(), ["Big"]);
        assert!(build_snapshot(&idx, ym("2024-12"), 15).is_err());
    }
}
