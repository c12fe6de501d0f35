//! Ingest trending research papers, summarize them through a pluggable model
//! provider, consolidate their topics each month and analyse how those topics
//! rise and fall.
//!
//! The `examples/` directory walks through each stage; `paperbrew --help`
//! lists the operator commands.

pub mod analytics;
pub mod cli;
pub mod consolidate;
pub mod datamodel;
pub mod error;
pub mod ingest;
pub mod month;
pub mod par;
pub mod provider;
pub mod report;
pub mod store;
pub mod summarize;
pub mod synth;
pub mod text;

pub use datamodel::{
    DailyTrendReport, LifecycleEntry, LifecycleSnapshot, MonthlyTrendReport, PaperRecord, Phase, RankedCount,
    StructuredSummary, TopicTrajectory,
};
pub use error::{Error, Result};
pub use month::YearMonth;
pub use store::{Dataset, Store};
