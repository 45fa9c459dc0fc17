//! Monte Carlo campaigns, scenario presets and files, and measured-trace ingestion.

pub mod campaign;
pub mod config;
pub mod placement;
pub mod presets;
pub mod stats;
pub mod trace;

pub use campaign::{
    aggregate_runs, run_campaign, run_once, run_seed, write_stats_json, CampaignConfig,
    CampaignResult, NoiseModel, RunOutcome, ScenarioSource, DEFAULT_INITIAL_SNR_DB,
};
pub use config::ScenarioConfig;
pub use placement::{sample_placement, sample_placement_with, Placement, PlacementConstraints};
pub use presets::{builtin_presets, preset, ScenarioPreset};
pub use stats::{aggregate_boxplot, quantile_sorted, BoxStats, RunStatistics};
pub use trace::{
    block_dbfs, noise_floor_report, parse_trace, read_trace, secrecy_trace, MeasuredTrace,
    NoiseFloorReport,
};
