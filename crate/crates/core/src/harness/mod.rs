//! Seeded experiment sweeps, error-rate summaries and the scaling fit.

mod alternative;
mod config;
mod scaling;
mod summary;
mod sweep;

pub use alternative::{least_sensitive_direction, scaled_alternative, AlternativeGenerator};
pub use config::{rate_sample_size, AlternativeSpec, SampleSizeRule, SweepConfig};
pub use scaling::{
    calibrate_constant, minimal_n_from_summaries, minimal_sample_size, scaling_fit, ScalingFit,
    ScalingGroup, SearchSettings,
};
pub use summary::{summarize, wilson_interval, write_summary_csv, CellSummary};
pub use sweep::{read_records, run_sweep, trial_seed, Cell, Label, RecordKey, TrialRecord};
