//! Quantitative trend analysis over a summarized corpus. Everything here is
//! pure and deterministic.

pub mod diversity;
pub mod engagement;
pub mod index;
pub mod lifecycle;
pub mod novelty;
pub mod trend;

pub use diversity::{
    cooccurrence, jaccard, keyword_evolution, monthly_entropy, new_topic_counts, shannon_entropy, top_topics,
    CooccurrenceMatrix, KeywordSeries, PairStat,
};
pub use engagement::{
    engagement_stats, nearest_rank, skewness, topic_medians, weekday_weekend_means, DateSpan, DayRhythm,
    EngagementStats, TopicMedians,
};
pub use index::{build_index, consolidated_index, monthly_proportions, CorpusIndex, PaperEntry};
pub use lifecycle::{
    build_snapshot, classify_phase, lifecycle_indicators, median, topic_velocity, velocity_summary, HalfLife,
    LifecycleIndicators, TopicVelocity, VelocitySummary, MIN_ACTIVE_MONTHS, MIN_PAPERS,
};
pub use novelty::{decile_effect, novelty_score, novelty_scores, pmi, DecileEffect, NoveltyConfig, PaperNovelty};
pub use trend::{gaussian_smooth, gaussian_smooth_dense, ols_slope, SLOPE_WINDOW, SMOOTHING_SIGMA};
